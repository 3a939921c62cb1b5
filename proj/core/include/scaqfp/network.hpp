#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlohmann/json_fwd.hpp"
#include "scaqfp/bitstream.hpp"

namespace scaqfp {

/// Dense HWC tensor of reals in [-1, 1].
struct Tensor {
  std::size_t height{0};
  std::size_t width{0};
  std::size_t channels{0};
  std::vector<double> values;

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return values[(y * width + x) * channels + c];
  }
  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return values[(y * width + x) * channels + c];
  }
};

struct LayerSpec {
  enum class Type { conv, avgpool, fc_feature, fc_categorize };

  Type type{Type::conv};
  std::size_t kernel{0};  // square kernel side (conv, avgpool)
  std::size_t maps{0};    // conv output maps
  std::size_t stride{1};
  std::size_t width{0};   // fc output count
  std::string weights_ref;
};

/// Layer chain plus the stochastic configuration they run under. Convolution
/// and fc_feature layers are realized by feature-extraction blocks, avgpool
/// by the sorter pooling block, fc_categorize by majority chains.
struct NetworkSpec {
  std::vector<LayerSpec> layers;
  std::size_t stream_length{1024};
  unsigned sng_bits{10};

  static NetworkSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct WeightLayer {
  std::string name;
  std::vector<std::size_t> shape;  // conv: [k, k, in_c, maps]; fc: [inputs, width]
  std::vector<double> values;     // flat, row-major over shape
  std::vector<double> bias;       // one per output map / fc output
};

struct WeightFile {
  std::vector<WeightLayer> layers;

  const WeightLayer& find(const std::string& name) const;
  void validate() const;  // counts match shapes, all values in [-1, 1]

  static WeightFile from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct NetworkResult {
  /// Per image: decoded class scores in output order.
  std::vector<std::vector<double>> scores;
  /// Per image: argmax class (ties break toward the lower index).
  std::vector<std::size_t> top1;
};

/// Stochastic forward pass: inputs and weights are encoded into bit streams
/// (weights through shared RNG-matrix SNGs, sized per layer), products via
/// XNOR, convolutions and fc_feature through feature-extraction blocks,
/// pooling through the sorter pooling block and the final categorization
/// through majority chains.
NetworkResult run_network(const NetworkSpec& spec, const WeightFile& weights,
                          const std::vector<Tensor>& inputs, uint64_t seed);

/// Floating-point reference with idealized semantics: conv/fc_feature
/// activations are clip(sum + bias, -1, 1), pooling is the arithmetic mean,
/// categorization scores are raw sums.
NetworkResult float_reference_forward(const NetworkSpec& spec, const WeightFile& weights,
                                      const std::vector<Tensor>& inputs);

/// The infinite-stream-length surrogate of the implemented network: every
/// layer is evaluated in exact probability calculus (feature extraction by
/// the stationary carry-chain value, pooling by the mean, categorization by
/// the exact majority-chain probability). run_network converges to this
/// forward pass as the stream length grows.
NetworkResult surrogate_forward(const NetworkSpec& spec, const WeightFile& weights,
                                const std::vector<Tensor>& inputs);

/// Seeded uniform[-1,1] weights shaped to fit `spec` applied to inputs of
/// the given geometry; `scale` shrinks the draw range.
WeightFile make_synthetic_weights(const NetworkSpec& spec, std::size_t in_height,
                                  std::size_t in_width, std::size_t in_channels, uint64_t seed,
                                  double scale = 1.0);

/// Seeded uniform[-1,1] input tensors.
std::vector<Tensor> make_synthetic_inputs(std::size_t count, std::size_t height, std::size_t width,
                                          std::size_t channels, uint64_t seed);

}  // namespace scaqfp
