#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scaqfp/blocks.hpp"

namespace scaqfp {

/// Monte Carlo protocol for one accuracy table: product values are drawn
/// i.i.d. uniform on [-1,1]; trial (M, N, t) gets its own sub-seed so cells
/// are reproducible and order-independent.
struct ExperimentConfig {
  BlockKind kind{BlockKind::feature_extraction};
  std::vector<std::size_t> input_sizes;
  std::vector<std::size_t> stream_lengths{128, 256, 512, 1024, 2048};
  std::size_t trials{1000};
  uint64_t seed{1};
  unsigned sng_bits{10};
  /// Output count of categorization instances (class scores per trial).
  std::size_t categorize_outputs{10};
  /// Lower bound of the winning class's product values in categorization
  /// instances (decisive-winner model: saturated activations times aligned
  /// weights); the other classes draw uniform [-1,1].
  double winner_low{0.9};

  void validate() const;
};

struct AccuracyTable {
  std::vector<std::size_t> input_sizes;
  std::vector<std::size_t> stream_lengths;
  /// cells[i][j] = mean absolute inaccuracy (feature extraction, pooling) or
  /// the worst disagreeing ranking margin in percent (categorization) for
  /// input_sizes[i] x stream_lengths[j].
  std::vector<std::vector<double>> cells;

  std::string to_csv() const;
};

AccuracyTable run_accuracy_table(const ExperimentConfig& cfg);

/// Mean stochastic inaccuracy of one feature-extraction or pooling cell.
/// Feature extraction runs the full system protocol (inputs and weights
/// uniform [-1,1], streams from a shared RNG cluster, XNOR products) against
/// the exact stationary value of the carry chain; pooling encodes uniform
/// values directly and measures against the arithmetic mean.
double block_cell_inaccuracy(BlockKind kind, std::size_t input_size, std::size_t stream_length,
                             std::size_t trials, uint64_t seed, unsigned sng_bits);

struct CategorizeCellStats {
  /// Mean relative difference, in percent, between the exact chain value of
  /// the top output and its stream estimate (the table-mirrored metric).
  double top_value_diff_pct{0};
  /// Largest float-domain relative margin (top1-top2)/|top1|, in percent,
  /// among trials where some class strictly beat the float winner's count.
  double max_disagree_margin_pct{0};
  /// Fraction of trials whose stream ranking kept the float winner on top.
  double agreement_rate{1.0};
};

/// Categorization cell over decisive-winner instances; see ExperimentConfig.
CategorizeCellStats categorize_cell(std::size_t outputs, std::size_t input_size,
                                    std::size_t stream_length, std::size_t trials, uint64_t seed,
                                    unsigned sng_bits, double winner_low = 0.9);

/// RNG matrix health: per-word bit bias, worst index-aligned pairwise word
/// correlation, and the structural line-overlap maximum.
struct RngDiagnostics {
  std::size_t matrix_size{0};
  std::size_t cycles{0};
  std::vector<double> word_bias;
  double max_abs_correlation{0};
  std::size_t max_line_overlap{0};
  bool degenerate{false};  // size 1: all four lines identical

  std::string to_csv() const;
};

RngDiagnostics rng_diagnostics(std::size_t matrix_size, std::size_t cycles, uint64_t seed);

/// Fixed-format float for byte-identical CSV output across runs.
std::string format_csv_value(double v);

}  // namespace scaqfp
