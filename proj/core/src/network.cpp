#include "scaqfp/network.hpp"

#include <algorithm>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "scaqfp/blocks.hpp"
#include "scaqfp/parallel.hpp"
#include "scaqfp/prng.hpp"
#include "scaqfp/rng_matrix.hpp"
#include "scaqfp/sng.hpp"

namespace scaqfp {

namespace {

LayerSpec::Type layer_type_from_name(const std::string& name) {
  if (name == "conv") return LayerSpec::Type::conv;
  if (name == "avgpool") return LayerSpec::Type::avgpool;
  if (name == "fc_feature") return LayerSpec::Type::fc_feature;
  if (name == "fc_categorize") return LayerSpec::Type::fc_categorize;
  throw std::invalid_argument("NetworkSpec: unknown layer type '" + name + "'");
}

std::string layer_type_name(LayerSpec::Type t) {
  switch (t) {
    case LayerSpec::Type::conv:
      return "conv";
    case LayerSpec::Type::avgpool:
      return "avgpool";
    case LayerSpec::Type::fc_feature:
      return "fc_feature";
    case LayerSpec::Type::fc_categorize:
      return "fc_categorize";
  }
  throw std::invalid_argument("layer_type_name: unknown type");
}

}  // namespace

NetworkSpec NetworkSpec::from_json(const nlohmann::json& j) {
  NetworkSpec spec;
  spec.stream_length = j.value("stream_length", spec.stream_length);
  spec.sng_bits = j.value("sng_bits", spec.sng_bits);
  for (const auto& layer : j.at("layers")) {
    LayerSpec ls;
    ls.type = layer_type_from_name(layer.at("type").get<std::string>());
    ls.kernel = layer.value("kernel", std::size_t{0});
    ls.maps = layer.value("maps", std::size_t{0});
    ls.stride = layer.value("stride", std::size_t{1});
    ls.width = layer.value("width", std::size_t{0});
    ls.weights_ref = layer.value("weights", std::string{});
    spec.layers.push_back(std::move(ls));
  }
  return spec;
}

nlohmann::json NetworkSpec::to_json() const {
  nlohmann::json j;
  j["stream_length"] = stream_length;
  j["sng_bits"] = sng_bits;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : layers) {
    nlohmann::json layer;
    layer["type"] = layer_type_name(l.type);
    if (l.kernel != 0) layer["kernel"] = l.kernel;
    if (l.maps != 0) layer["maps"] = l.maps;
    layer["stride"] = l.stride;
    if (l.width != 0) layer["width"] = l.width;
    if (!l.weights_ref.empty()) layer["weights"] = l.weights_ref;
    j["layers"].push_back(std::move(layer));
  }
  return j;
}

const WeightLayer& WeightFile::find(const std::string& name) const {
  for (const auto& l : layers) {
    if (l.name == name) return l;
  }
  throw std::invalid_argument("WeightFile: no layer named '" + name + "'");
}

void WeightFile::validate() const {
  for (const auto& l : layers) {
    std::size_t count = 1;
    for (std::size_t d : l.shape) count *= d;
    if (l.shape.empty() || count != l.values.size()) {
      throw std::invalid_argument("WeightFile: value count does not match shape in '" + l.name + "'");
    }
    for (double v : l.values) {
      if (!(v >= -1.0 && v <= 1.0)) {
        throw std::domain_error("WeightFile: weight outside [-1, 1] in '" + l.name + "'");
      }
    }
    for (double v : l.bias) {
      if (!(v >= -1.0 && v <= 1.0)) {
        throw std::domain_error("WeightFile: bias outside [-1, 1] in '" + l.name + "'");
      }
    }
  }
}

WeightFile WeightFile::from_json(const nlohmann::json& j) {
  WeightFile wf;
  for (const auto& layer : j.at("layers")) {
    WeightLayer wl;
    wl.name = layer.at("name").get<std::string>();
    wl.shape = layer.at("shape").get<std::vector<std::size_t>>();
    wl.values = layer.at("values").get<std::vector<double>>();
    wl.bias = layer.value("bias", std::vector<double>{});
    wf.layers.push_back(std::move(wl));
  }
  wf.validate();
  return wf;
}

nlohmann::json WeightFile::to_json() const {
  nlohmann::json j;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : layers) {
    j["layers"].push_back(nlohmann::json{
        {"name", l.name}, {"shape", l.shape}, {"values", l.values}, {"bias", l.bias}});
  }
  return j;
}

// --- float oracle -----------------------------------------------------------

namespace {

double clip_unit(double x) { return std::clamp(x, -1.0, 1.0); }

Tensor float_conv(const Tensor& in, const LayerSpec& l, const WeightLayer& w) {
  const std::size_t k = l.kernel;
  if (w.shape != std::vector<std::size_t>{k, k, in.channels, l.maps}) {
    throw std::invalid_argument("conv weights shape mismatch for '" + w.name + "'");
  }
  if (w.bias.size() != l.maps) throw std::invalid_argument("conv bias count mismatch");
  if (in.height < k || in.width < k) throw std::invalid_argument("conv input smaller than kernel");
  Tensor out;
  out.height = (in.height - k) / l.stride + 1;
  out.width = (in.width - k) / l.stride + 1;
  out.channels = l.maps;
  out.values.assign(out.height * out.width * out.channels, 0.0);
  auto weight = [&](std::size_t dy, std::size_t dx, std::size_t c, std::size_t m) {
    return w.values[((dy * k + dx) * in.channels + c) * l.maps + m];
  };
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t m = 0; m < l.maps; ++m) {
        double sum = w.bias[m];
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) {
            for (std::size_t c = 0; c < in.channels; ++c) {
              sum += weight(dy, dx, c, m) * in.at(y * l.stride + dy, x * l.stride + dx, c);
            }
          }
        }
        out.at(y, x, m) = clip_unit(sum);
      }
    }
  }
  return out;
}

Tensor float_pool(const Tensor& in, const LayerSpec& l) {
  const std::size_t k = l.kernel;
  Tensor out;
  out.height = (in.height - k) / l.stride + 1;
  out.width = (in.width - k) / l.stride + 1;
  out.channels = in.channels;
  out.values.assign(out.height * out.width * out.channels, 0.0);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t c = 0; c < in.channels; ++c) {
        double sum = 0;
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) {
            sum += in.at(y * l.stride + dy, x * l.stride + dx, c);
          }
        }
        out.at(y, x, c) = sum / static_cast<double>(k * k);
      }
    }
  }
  return out;
}

std::vector<double> float_fc(const std::vector<double>& in, const LayerSpec& l,
                             const WeightLayer& w, bool clip) {
  if (w.shape != std::vector<std::size_t>{in.size(), l.width}) {
    throw std::invalid_argument("fc weights shape mismatch for '" + w.name + "'");
  }
  if (w.bias.size() != l.width) throw std::invalid_argument("fc bias count mismatch");
  std::vector<double> out(l.width, 0.0);
  for (std::size_t o = 0; o < l.width; ++o) {
    double sum = w.bias[o];
    for (std::size_t i = 0; i < in.size(); ++i) {
      sum += in[i] * w.values[i * l.width + o];
    }
    out[o] = clip ? clip_unit(sum) : sum;
  }
  return out;
}

std::vector<double> flatten(const Tensor& t) { return t.values; }

std::size_t argmax_low_tie(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

NetworkResult float_reference_forward(const NetworkSpec& spec, const WeightFile& weights,
                                      const std::vector<Tensor>& inputs) {
  weights.validate();
  NetworkResult result;
  for (const Tensor& image : inputs) {
    Tensor t = image;
    std::vector<double> scores;
    bool have_scores = false;
    for (const auto& l : spec.layers) {
      switch (l.type) {
        case LayerSpec::Type::conv:
          t = float_conv(t, l, weights.find(l.weights_ref));
          break;
        case LayerSpec::Type::avgpool:
          t = float_pool(t, l);
          break;
        case LayerSpec::Type::fc_feature: {
          const auto out = float_fc(flatten(t), l, weights.find(l.weights_ref), true);
          t = Tensor{1, 1, out.size(), out};
          break;
        }
        case LayerSpec::Type::fc_categorize:
          scores = float_fc(flatten(t), l, weights.find(l.weights_ref), false);
          have_scores = true;
          break;
      }
    }
    if (!have_scores) throw std::invalid_argument("network has no fc_categorize layer");
    result.top1.push_back(argmax_low_tie(scores));
    result.scores.push_back(std::move(scores));
  }
  return result;
}

// --- infinite-length surrogate ------------------------------------------------

namespace {

double to_density(double value) { return (std::clamp(value, -1.0, 1.0) + 1.0) / 2.0; }

double product_density(double a_value, double b_value) {
  const double pa = to_density(a_value);
  const double pb = to_density(b_value);
  return pa * pb + (1.0 - pa) * (1.0 - pb);
}

Tensor surrogate_conv(const Tensor& in, const LayerSpec& l, const WeightLayer& w) {
  const std::size_t k = l.kernel;
  if (w.shape != std::vector<std::size_t>{k, k, in.channels, l.maps}) {
    throw std::invalid_argument("conv weights shape mismatch for '" + w.name + "'");
  }
  Tensor out;
  out.height = (in.height - k) / l.stride + 1;
  out.width = (in.width - k) / l.stride + 1;
  out.channels = l.maps;
  out.values.assign(out.height * out.width * out.channels, 0.0);
  std::vector<double> densities(k * k * in.channels + 2);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t m = 0; m < l.maps; ++m) {
        std::size_t idx = 0;
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) {
            for (std::size_t c = 0; c < in.channels; ++c) {
              const double weight = w.values[((dy * k + dx) * in.channels + c) * l.maps + m];
              densities[idx++] =
                  product_density(in.at(y * l.stride + dy, x * l.stride + dx, c), weight);
            }
          }
        }
        densities[idx++] = to_density(w.bias[m]);
        std::span<const double> rows(densities.data(), idx);
        if (idx % 2 == 0) {
          // the block pads even sizes with neutral noise; fold the pad row in
          densities[idx] = 0.5;
          rows = std::span<const double>(densities.data(), idx + 1);
        }
        out.at(y, x, m) = fe_stationary_value(rows);
      }
    }
  }
  return out;
}

std::vector<double> surrogate_fc(const std::vector<double>& in, const LayerSpec& l,
                                 const WeightLayer& w, bool categorize) {
  if (w.shape != std::vector<std::size_t>{in.size(), l.width}) {
    throw std::invalid_argument("fc weights shape mismatch for '" + w.name + "'");
  }
  std::vector<double> out(l.width, 0.0);
  std::vector<double> densities(in.size() + 2);
  for (std::size_t o = 0; o < l.width; ++o) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      densities[idx++] = product_density(in[i], w.values[i * l.width + o]);
    }
    densities[idx++] = to_density(w.bias[o]);
    if (categorize) {
      out[o] = 2.0 * chain_probability(std::span<const double>(densities.data(), idx)) - 1.0;
    } else {
      if (idx % 2 == 0) densities[idx++] = 0.5;
      out[o] = fe_stationary_value(std::span<const double>(densities.data(), idx));
    }
  }
  return out;
}

}  // namespace

NetworkResult surrogate_forward(const NetworkSpec& spec, const WeightFile& weights,
                                const std::vector<Tensor>& inputs) {
  weights.validate();
  NetworkResult result;
  for (const Tensor& image : inputs) {
    Tensor t = image;
    std::vector<double> scores;
    bool have_scores = false;
    for (const auto& l : spec.layers) {
      switch (l.type) {
        case LayerSpec::Type::conv:
          t = surrogate_conv(t, l, weights.find(l.weights_ref));
          break;
        case LayerSpec::Type::avgpool:
          t = float_pool(t, l);
          break;
        case LayerSpec::Type::fc_feature: {
          const auto out = surrogate_fc(flatten(t), l, weights.find(l.weights_ref), false);
          t = Tensor{1, 1, out.size(), out};
          break;
        }
        case LayerSpec::Type::fc_categorize:
          scores = surrogate_fc(flatten(t), l, weights.find(l.weights_ref), true);
          have_scores = true;
          break;
      }
    }
    if (!have_scores) throw std::invalid_argument("network has no fc_categorize layer");
    result.top1.push_back(argmax_low_tie(scores));
    result.scores.push_back(std::move(scores));
  }
  return result;
}

// --- stochastic forward pass ------------------------------------------------

namespace {

struct StreamTensor {
  std::size_t height{0};
  std::size_t width{0};
  std::size_t channels{0};
  std::vector<BitStream> streams;

  const BitStream& at(std::size_t y, std::size_t x, std::size_t c) const {
    return streams[(y * width + x) * channels + c];
  }
};

/// Streams for every weight and bias of one layer, drawn from one shared RNG
/// matrix: stream j compares its binary code against word j of the matrix.
/// The matrix is sized so each stream has its own word line, holds at least
/// sng_bits cells per line, and is odd for the 1-cell overlap guarantee.
struct WeightStreams {
  std::vector<BitStream> value_streams;
  std::vector<BitStream> bias_streams;
};

WeightStreams encode_weights(const WeightLayer& w, std::size_t length, unsigned n_bits,
                             uint64_t seed) {
  const std::size_t count = w.values.size() + w.bias.size();
  std::size_t matrix_n = std::max<std::size_t>(n_bits, (count + 3) / 4);
  if (matrix_n % 2 == 0) ++matrix_n;
  RngMatrix matrix(matrix_n, seed);

  std::vector<BinaryCode> codes;
  codes.reserve(count);
  for (double v : w.values) codes.push_back(encode_bipolar(v, n_bits));
  for (double v : w.bias) codes.push_back(encode_bipolar(v, n_bits));

  std::vector<BitStream> streams(count, BitStream(length));
  for (std::size_t t = 0; t < length; ++t) {
    matrix.step();
    for (std::size_t j = 0; j < count; ++j) {
      if (sng_compare(codes[j], static_cast<uint32_t>(matrix.word(j, n_bits)))) {
        streams[j].set_bit(t, true);
      }
    }
  }
  WeightStreams out;
  out.value_streams.assign(streams.begin(), streams.begin() + static_cast<std::ptrdiff_t>(w.values.size()));
  out.bias_streams.assign(streams.begin() + static_cast<std::ptrdiff_t>(w.values.size()), streams.end());
  return out;
}

StreamTensor encode_image(const Tensor& image, std::size_t length, unsigned n_bits, uint64_t seed) {
  StreamTensor st;
  st.height = image.height;
  st.width = image.width;
  st.channels = image.channels;
  st.streams.reserve(image.values.size());
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    const double v = image.values[i];
    if (!(v >= -1.0 && v <= 1.0)) throw std::domain_error("run_network: input outside [-1, 1]");
    RandomWordSource source(derive_seed(seed, i), n_bits);
    st.streams.push_back(generate_stream(encode_bipolar(v, n_bits), source, length));
  }
  return st;
}

StreamTensor sc_conv(const StreamTensor& in, const LayerSpec& l, const WeightLayer& w,
                     const WeightStreams& ws) {
  const std::size_t k = l.kernel;
  if (w.shape != std::vector<std::size_t>{k, k, in.channels, l.maps}) {
    throw std::invalid_argument("conv weights shape mismatch for '" + w.name + "'");
  }
  StreamTensor out;
  out.height = (in.height - k) / l.stride + 1;
  out.width = (in.width - k) / l.stride + 1;
  out.channels = l.maps;
  out.streams.resize(out.height * out.width * out.channels);
  auto weight_stream = [&](std::size_t dy, std::size_t dx, std::size_t c, std::size_t m) {
    return ws.value_streams[((dy * k + dx) * in.channels + c) * l.maps + m];
  };
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t m = 0; m < l.maps; ++m) {
        ProductMatrix pm;
        pm.rows.reserve(k * k * in.channels + 1);
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) {
            for (std::size_t c = 0; c < in.channels; ++c) {
              pm.rows.push_back(xnor_multiply(in.at(y * l.stride + dy, x * l.stride + dx, c),
                                              weight_stream(dy, dx, c, m)));
            }
          }
        }
        pm.rows.push_back(ws.bias_streams[m]);
        out.streams[(y * out.width + x) * out.channels + m] = fe_run(pm);
      }
    }
  }
  return out;
}

StreamTensor sc_pool(const StreamTensor& in, const LayerSpec& l) {
  const std::size_t k = l.kernel;
  StreamTensor out;
  out.height = (in.height - k) / l.stride + 1;
  out.width = (in.width - k) / l.stride + 1;
  out.channels = in.channels;
  out.streams.resize(out.height * out.width * out.channels);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      for (std::size_t c = 0; c < out.channels; ++c) {
        ProductMatrix pm;
        pm.rows.reserve(k * k);
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) {
            pm.rows.push_back(in.at(y * l.stride + dy, x * l.stride + dx, c));
          }
        }
        out.streams[(y * out.width + x) * out.channels + c] = pool_run(pm);
      }
    }
  }
  return out;
}

std::vector<BitStream> sc_fc(const std::vector<BitStream>& in, const LayerSpec& l,
                             const WeightLayer& w, const WeightStreams& ws, bool categorize) {
  if (w.shape != std::vector<std::size_t>{in.size(), l.width}) {
    throw std::invalid_argument("fc weights shape mismatch for '" + w.name + "'");
  }
  std::vector<BitStream> out(l.width);
  for (std::size_t o = 0; o < l.width; ++o) {
    ProductMatrix pm;
    pm.rows.reserve(in.size() + 1);
    for (std::size_t i = 0; i < in.size(); ++i) {
      pm.rows.push_back(xnor_multiply(in[i], ws.value_streams[i * l.width + o]));
    }
    pm.rows.push_back(ws.bias_streams[o]);
    out[o] = categorize ? majority_chain(pm.rows) : fe_run(pm);
  }
  return out;
}

}  // namespace

NetworkResult run_network(const NetworkSpec& spec, const WeightFile& weights,
                          const std::vector<Tensor>& inputs, uint64_t seed) {
  weights.validate();
  if (spec.layers.empty() || spec.layers.back().type != LayerSpec::Type::fc_categorize) {
    throw std::invalid_argument("run_network: last layer must be fc_categorize");
  }
  const std::size_t length = spec.stream_length;

  // Weights are hardwired on chip: their streams are generated once per layer
  // and shared across images; only the image encodings get fresh randomness.
  std::vector<WeightStreams> layer_streams(spec.layers.size());
  for (std::size_t li = 0; li < spec.layers.size(); ++li) {
    const auto& l = spec.layers[li];
    if (l.type == LayerSpec::Type::avgpool) continue;
    layer_streams[li] =
        encode_weights(weights.find(l.weights_ref), length, spec.sng_bits, derive_seed(seed, 0x77, li));
  }

  NetworkResult result;
  result.scores.resize(inputs.size());
  result.top1.resize(inputs.size());

  parallel_for(inputs.size(), [&](std::size_t img) {
    StreamTensor t = encode_image(inputs[img], length, spec.sng_bits, derive_seed(seed, 0x78, img));
    std::vector<double> scores;
    bool have_scores = false;
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
      const auto& l = spec.layers[li];
      switch (l.type) {
        case LayerSpec::Type::conv:
          t = sc_conv(t, l, weights.find(l.weights_ref), layer_streams[li]);
          break;
        case LayerSpec::Type::avgpool:
          t = sc_pool(t, l);
          break;
        case LayerSpec::Type::fc_feature: {
          auto out = sc_fc(t.streams, l, weights.find(l.weights_ref), layer_streams[li], false);
          t = StreamTensor{1, 1, out.size(), std::move(out)};
          break;
        }
        case LayerSpec::Type::fc_categorize: {
          const auto out = sc_fc(t.streams, l, weights.find(l.weights_ref), layer_streams[li], true);
          scores.resize(out.size());
          for (std::size_t o = 0; o < out.size(); ++o) {
            scores[o] = decode_stream(out[o], Encoding::bipolar);
          }
          have_scores = true;
          break;
        }
      }
    }
    if (!have_scores) throw std::invalid_argument("network has no fc_categorize layer");
    result.top1[img] = argmax_low_tie(scores);
    result.scores[img] = std::move(scores);
  });
  return result;
}

WeightFile make_synthetic_weights(const NetworkSpec& spec, std::size_t in_height,
                                  std::size_t in_width, std::size_t in_channels, uint64_t seed,
                                  double scale) {
  WeightFile wf;
  SplitMix64 gen(derive_seed(seed, 0x57));
  std::size_t h = in_height, w = in_width, c = in_channels;
  for (const auto& l : spec.layers) {
    switch (l.type) {
      case LayerSpec::Type::conv: {
        WeightLayer wl;
        wl.name = l.weights_ref;
        wl.shape = {l.kernel, l.kernel, c, l.maps};
        wl.values.resize(l.kernel * l.kernel * c * l.maps);
        for (auto& v : wl.values) v = gen.next_signed_unit() * scale;
        wl.bias.resize(l.maps);
        for (auto& v : wl.bias) v = gen.next_signed_unit() * scale;
        wf.layers.push_back(std::move(wl));
        h = (h - l.kernel) / l.stride + 1;
        w = (w - l.kernel) / l.stride + 1;
        c = l.maps;
        break;
      }
      case LayerSpec::Type::avgpool:
        h = (h - l.kernel) / l.stride + 1;
        w = (w - l.kernel) / l.stride + 1;
        break;
      case LayerSpec::Type::fc_feature:
      case LayerSpec::Type::fc_categorize: {
        WeightLayer wl;
        wl.name = l.weights_ref;
        wl.shape = {h * w * c, l.width};
        wl.values.resize(h * w * c * l.width);
        for (auto& v : wl.values) v = gen.next_signed_unit() * scale;
        wl.bias.resize(l.width);
        for (auto& v : wl.bias) v = gen.next_signed_unit() * scale;
        wf.layers.push_back(std::move(wl));
        h = 1;
        w = 1;
        c = l.width;
        break;
      }
    }
  }
  return wf;
}

std::vector<Tensor> make_synthetic_inputs(std::size_t count, std::size_t height, std::size_t width,
                                          std::size_t channels, uint64_t seed) {
  std::vector<Tensor> tensors(count);
  SplitMix64 gen(derive_seed(seed, 0x49));
  for (auto& t : tensors) {
    t.height = height;
    t.width = width;
    t.channels = channels;
    t.values.resize(height * width * channels);
    for (auto& v : t.values) v = gen.next_signed_unit();
  }
  return tensors;
}

}  // namespace scaqfp
