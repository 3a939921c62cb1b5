#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "scaqfp/bitstream.hpp"
#include "scaqfp/netlist.hpp"

namespace scaqfp {

enum class BlockKind { feature_extraction, avg_pool, categorization };

std::string_view block_kind_name(BlockKind kind);
BlockKind block_kind_from_name(std::string_view name);

/// All input-weight product streams of one block, one row per product
/// (a bias stream is just one more row). Rows share a common length.
struct ProductMatrix {
  std::vector<BitStream> rows;

  std::size_t input_size() const { return rows.size(); }

  /// Common row length; throws on ragged or empty matrices.
  std::size_t stream_length() const;
};

/// Sorted-descending M-bit carry kept between stream bits. Sortedness makes
/// the leading-ones count a complete representation; carry_bits() gives the
/// materialized vector when the bit view is wanted.
class FeedbackState {
public:
  explicit FeedbackState(std::size_t input_size) : m_(input_size) {}

  std::size_t input_size() const { return m_; }
  std::size_t ones() const { return ones_; }
  std::vector<bool> carry_bits() const;

  void set_ones(std::size_t ones);

private:
  std::size_t m_;
  std::size_t ones_{0};
};

/// Count-level kernel of one feature-extraction step over the sorted
/// (column ++ carry) vector of 2M bits holding `total` ones: output is bit
/// (M-1)/2 and the next carry is the M-bit slice right after it, so the top
/// (M-1)/2 ones are consumed every cycle and sub-threshold leftovers drop.
/// Requires odd m. Returns {output bit, next carry ones}.
constexpr std::pair<bool, std::size_t> fe_step_counts(std::size_t m, std::size_t carry_ones,
                                                      std::size_t column_ones) {
  const std::size_t total = carry_ones + column_ones;
  const std::size_t threshold = (m + 1) / 2;  // ones needed for the output bit
  const bool out = total >= threshold;
  const std::size_t surplus = out ? total - threshold : 0;
  return {out, surplus < m ? surplus : m};
}

/// Count-level kernel of one average-pooling step: output = bit M-1 of the
/// sorted 2M-bit vector; on output 1 the top M ones are consumed, otherwise
/// the top M bits are retained. Returns {output bit, next carry ones}.
constexpr std::pair<bool, std::size_t> pool_step_counts(std::size_t m, std::size_t carry_ones,
                                                        std::size_t column_ones) {
  const std::size_t total = carry_ones + column_ones;
  const bool out = total >= m;
  return {out, out ? total - m : total};
}

/// One feature-extraction step on an explicit M-bit column. Requires odd M
/// (even matrices must be padded by the caller, as fe_run does).
std::pair<bool, FeedbackState> fe_step(const FeedbackState& state, const std::vector<bool>& column);

/// One average-pooling step on an explicit M-bit column.
std::pair<bool, FeedbackState> pool_step(const FeedbackState& state, const std::vector<bool>& column);

/// Runs the sorter-based feature-extraction block over the whole matrix.
/// An even input size is padded with one neutral-noise row first.
BitStream fe_run(const ProductMatrix& products);

/// Floating-point oracle of the feature-extraction block: clip(sum, -1, 1).
double fe_reference(std::span<const double> values);

/// Runs the sorter-based average-pooling block over the whole matrix.
BitStream pool_run(const ProductMatrix& products);

/// Floating-point oracle of the pooling block: the mean of its inputs.
double pool_reference(std::span<const double> values);

/// Chain of 3-input majority gates, (M-1)/2 of them, associated left to
/// right in input order. Even stream counts are padded with neutral noise;
/// a single stream is returned unchanged. Not a true wide majority - the
/// chain is the documented low-cost approximation.
BitStream majority_chain(const std::vector<BitStream>& streams);

/// Class indices ordered by decoded bipolar value, descending; ties keep the
/// lower index first.
std::vector<std::size_t> categorize_rank(const std::vector<BitStream>& outputs);

/// Gate-level netlist of a block. Feature extraction and categorization pad
/// even input sizes with one extra primary input that the caller must feed
/// neutral noise (run_block_netlist does so automatically); the padded input
/// is the last one. Feature extraction and pooling carry M REG nodes on the
/// feedback path; the pooling feedback select exploits the sortedness of the
/// merged vector to fit in one MAJ3 per carry bit.
GateNetlist build_block_netlist(BlockKind kind, std::size_t input_size);

/// Cycle-accurate run of a block netlist over a product matrix; reproduces
/// the behavioral run bit for bit.
BitStream run_block_netlist(const GateNetlist& net, const ProductMatrix& products);

/// Encodes each value into a stream via its own seeded SNG word source.
ProductMatrix make_product_matrix(std::span<const double> values, std::size_t length,
                                  uint64_t seed, unsigned n_bits = 10);

/// Ones per clock cycle across all rows; the column popcount sequence.
std::vector<uint32_t> column_ones(const ProductMatrix& products);

/// Exact stationary output density of the feature-extraction carry chain for
/// independent input streams with the given one-densities: Poisson-binomial
/// column distribution, power iteration over the carry states. A pure
/// probability-calculus oracle, independent of any bit-level simulation;
/// returns the bipolar value the stream average converges to. Input size
/// must be odd (the block's padded operating form).
double fe_stationary_value(std::span<const double> one_densities);

/// Exact output one-density of the majority chain for independent input
/// streams; the probability-calculus twin of majority_chain. Pads an even
/// count with the neutral-noise density 1/2.
double chain_probability(std::span<const double> one_densities);

}  // namespace scaqfp
