#include "scaqfp/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "scaqfp/parallel.hpp"
#include "scaqfp/prng.hpp"
#include "scaqfp/rng_matrix.hpp"
#include "scaqfp/sng.hpp"

namespace scaqfp {

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  if (input_sizes.empty()) throw std::invalid_argument("ExperimentConfig: no input sizes");
  if (stream_lengths.empty()) throw std::invalid_argument("ExperimentConfig: no stream lengths");
  if (kind == BlockKind::categorization && categorize_outputs < 2) {
    throw std::invalid_argument("ExperimentConfig: categorization needs >= 2 outputs");
  }
}

std::string format_csv_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string AccuracyTable::to_csv() const {
  std::string out = "input_size";
  for (std::size_t n : stream_lengths) out += "," + std::to_string(n);
  out += "\n";
  for (std::size_t i = 0; i < input_sizes.size(); ++i) {
    out += std::to_string(input_sizes[i]);
    for (std::size_t j = 0; j < stream_lengths.size(); ++j) {
      out += "," + format_csv_value(cells[i][j]);
    }
    out += "\n";
  }
  return out;
}

namespace {

/// Cluster sized so every stream gets its own word line with at least
/// `n_bits` cells, odd for the 1-cell pairwise overlap guarantee.
std::size_t cluster_size(std::size_t stream_count, unsigned n_bits) {
  std::size_t n = std::max<std::size_t>(n_bits, (stream_count + 3) / 4);
  if (n % 2 == 0) ++n;
  return n;
}

/// One feature-extraction trial: x and w values uniform on [-1,1], both
/// stream sets drawn from one shared RNG cluster, products formed by XNOR.
/// Error is measured against the exact stationary value for the quantized
/// product densities (stochastic inaccuracy; the deterministic activation
/// shape is transfer behavior, not error).
double run_fe_trial(std::size_t m, std::size_t n, unsigned n_bits, uint64_t trial_seed) {
  SplitMix64 value_gen(derive_seed(trial_seed, 0x76));
  std::vector<BinaryCode> x_codes(m), w_codes(m);
  std::vector<double> product_density(m);
  const double scale = static_cast<double>(uint32_t{1} << n_bits);
  for (std::size_t j = 0; j < m; ++j) {
    x_codes[j] = encode_bipolar(value_gen.next_signed_unit(), n_bits);
    w_codes[j] = encode_bipolar(value_gen.next_signed_unit(), n_bits);
    const double px = x_codes[j].code / scale;
    const double pw = w_codes[j].code / scale;
    product_density[j] = px * pw + (1.0 - px) * (1.0 - pw);
  }

  RngMatrix cluster(cluster_size(2 * m, n_bits), derive_seed(trial_seed, 0x6d));
  std::size_t carry = 0;
  std::size_t ones = 0;
  for (std::size_t t = 0; t < n; ++t) {
    cluster.step();
    std::size_t col = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const bool xb = static_cast<uint32_t>(cluster.word(2 * j, n_bits)) < x_codes[j].code;
      const bool wb = static_cast<uint32_t>(cluster.word(2 * j + 1, n_bits)) < w_codes[j].code;
      col += xb == wb ? 1 : 0;
    }
    const auto [bit, next] = fe_step_counts(m, carry, col);
    ones += bit ? 1 : 0;
    carry = next;
  }
  const double decoded = 2.0 * static_cast<double>(ones) / static_cast<double>(n) - 1.0;
  return std::abs(decoded - fe_stationary_value(product_density));
}

/// Standard normal via Box-Muller on the seeded generator.
double next_gaussian(SplitMix64& gen) {
  const double u1 = std::max(gen.next_double(), 1e-12);
  const double u2 = gen.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

/// One pooling trial. Pool inputs are upstream activations, i.e. clipped
/// sums of many products, so values are drawn as clip(N(0,1), -1, 1); one
/// seeded SNG per row; error against the arithmetic-mean reference.
double run_pool_trial(std::size_t m, std::size_t n, unsigned n_bits, uint64_t trial_seed) {
  SplitMix64 value_gen(derive_seed(trial_seed, 0x76));
  std::vector<double> values(m);
  for (auto& v : values) v = std::clamp(next_gaussian(value_gen), -1.0, 1.0);

  std::vector<uint16_t> counts(n, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const BinaryCode code = encode_bipolar(values[j], n_bits);
    RandomWordSource source(derive_seed(trial_seed, 0x73, j), n_bits);
    for (std::size_t t = 0; t < n; ++t) {
      counts[t] = static_cast<uint16_t>(counts[t] + (source() < code.code ? 1 : 0));
    }
  }
  std::size_t carry = 0;
  std::size_t ones = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto [bit, next] = pool_step_counts(m, carry, counts[t]);
    ones += bit ? 1 : 0;
    carry = next;
  }
  const double decoded = 2.0 * static_cast<double>(ones) / static_cast<double>(n) - 1.0;
  return std::abs(decoded - pool_reference(values));
}

}  // namespace

double block_cell_inaccuracy(BlockKind kind, std::size_t input_size, std::size_t stream_length,
                             std::size_t trials, uint64_t seed, unsigned sng_bits) {
  if (kind == BlockKind::categorization) {
    throw std::invalid_argument("block_cell_inaccuracy: use categorize_cell");
  }
  const bool fe = kind == BlockKind::feature_extraction;
  const std::size_t m_eff = fe && input_size % 2 == 0 ? input_size + 1 : input_size;
  std::vector<double> errors(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    const uint64_t trial_seed = derive_seed(seed, input_size, stream_length, t);
    errors[t] = fe ? run_fe_trial(m_eff, stream_length, sng_bits, trial_seed)
                   : run_pool_trial(input_size, stream_length, sng_bits, trial_seed);
  });
  return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(trials);
}

namespace {

struct CategorizeTrialResult {
  bool disagreed{false};
  double float_margin_pct{0};
  double top_value_diff_pct{0};
};

/// One categorization trial: a decisive-winner classification instance.
/// The winner's product values sit in [winner_low, 1] (saturated activations
/// times aligned weights); the other outputs draw uniform [-1,1]. The SC side
/// runs every output's majority chain; a disagreement is a class strictly
/// beating the float winner's stream count (count ties are representational).
CategorizeTrialResult run_categorize_trial(std::size_t outputs, std::size_t m, std::size_t n,
                                           unsigned n_bits, double winner_low,
                                           uint64_t trial_seed) {
  const std::size_t blocks = (n + 63) / 64;
  const bool pad = m % 2 == 0;
  const std::size_t m_eff = m + (pad ? 1 : 0);
  const double scale = static_cast<double>(uint32_t{1} << n_bits);

  SplitMix64 value_gen(derive_seed(trial_seed, 0x76));
  const std::size_t winner = static_cast<std::size_t>(value_gen.next() % outputs);

  std::vector<double> float_scores(outputs, 0.0);
  std::vector<double> exact_values(outputs, 0.0);
  std::vector<double> estimates(outputs, 0.0);

  std::vector<BinaryCode> codes(m);
  std::vector<double> densities(m_eff, 0.5);
  std::vector<uint64_t> words(m_eff);
  auto maj = [](uint64_t a, uint64_t b, uint64_t c) { return (a & b) | (a & c) | (b & c); };

  for (std::size_t o = 0; o < outputs; ++o) {
    double fsum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = o == winner ? winner_low + (1.0 - winner_low) * value_gen.next_double()
                                   : value_gen.next_signed_unit();
      fsum += v;
      codes[j] = encode_bipolar(v, n_bits);
      densities[j] = codes[j].code / scale;
    }
    float_scores[o] = fsum;
    exact_values[o] = 2.0 * chain_probability(std::span(densities).first(m)) - 1.0;

    std::vector<RandomWordSource> sources;
    sources.reserve(m);
    for (std::size_t j = 0; j < m; ++j) sources.emplace_back(derive_seed(trial_seed, o, j), n_bits);
    std::size_t ones = 0;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      // the pad row leads the chain, matching majority_chain
      std::size_t idx = 0;
      if (pad) words[idx++] = 0x5555555555555555ULL;
      for (std::size_t j = 0; j < m; ++j) {
        uint64_t w = 0;
        for (unsigned bit = 0; bit < 64; ++bit) {
          w |= static_cast<uint64_t>(sources[j]() < codes[j].code ? 1 : 0) << bit;
        }
        words[idx++] = w;
      }
      uint64_t acc = words[0];
      if (m_eff >= 3) {
        acc = maj(words[0], words[1], words[2]);
        for (std::size_t k = 3; k + 1 < m_eff; k += 2) acc = maj(acc, words[k], words[k + 1]);
      }
      if (blk + 1 == blocks && n % 64 != 0) acc &= (uint64_t{1} << (n % 64)) - 1;
      ones += static_cast<std::size_t>(std::popcount(acc));
    }
    estimates[o] = 2.0 * static_cast<double>(ones) / static_cast<double>(n) - 1.0;
  }

  CategorizeTrialResult result;
  const auto float_top = static_cast<std::size_t>(
      std::max_element(float_scores.begin(), float_scores.end()) - float_scores.begin());
  for (std::size_t o = 0; o < outputs; ++o) {
    if (estimates[o] > estimates[float_top]) result.disagreed = true;
  }
  if (result.disagreed) {
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < outputs; ++o) {
      if (o != float_top) second = std::max(second, float_scores[o]);
    }
    result.float_margin_pct =
        100.0 * (float_scores[float_top] - second) / std::abs(float_scores[float_top]);
  }
  const auto exact_top = static_cast<std::size_t>(
      std::max_element(exact_values.begin(), exact_values.end()) - exact_values.begin());
  result.top_value_diff_pct =
      100.0 * std::abs(estimates[exact_top] - exact_values[exact_top]) / std::abs(exact_values[exact_top]);
  return result;
}

}  // namespace

CategorizeCellStats categorize_cell(std::size_t outputs, std::size_t input_size,
                                    std::size_t stream_length, std::size_t trials, uint64_t seed,
                                    unsigned sng_bits, double winner_low) {
  std::vector<CategorizeTrialResult> results(trials);
  parallel_for(trials, [&](std::size_t t) {
    const uint64_t trial_seed = derive_seed(seed, input_size, stream_length, t);
    results[t] = run_categorize_trial(outputs, input_size, stream_length, sng_bits, winner_low,
                                      trial_seed);
  });
  CategorizeCellStats stats;
  double diff_sum = 0.0;
  std::size_t agreements = 0;
  for (const auto& r : results) {
    if (!r.disagreed) ++agreements;
    stats.max_disagree_margin_pct = std::max(stats.max_disagree_margin_pct, r.float_margin_pct);
    diff_sum += r.top_value_diff_pct;
  }
  stats.top_value_diff_pct = diff_sum / static_cast<double>(trials);
  stats.agreement_rate = static_cast<double>(agreements) / static_cast<double>(trials);
  return stats;
}

AccuracyTable run_accuracy_table(const ExperimentConfig& cfg) {
  cfg.validate();
  AccuracyTable table;
  table.input_sizes = cfg.input_sizes;
  table.stream_lengths = cfg.stream_lengths;
  table.cells.assign(cfg.input_sizes.size(),
                     std::vector<double>(cfg.stream_lengths.size(), 0.0));
  for (std::size_t i = 0; i < cfg.input_sizes.size(); ++i) {
    for (std::size_t j = 0; j < cfg.stream_lengths.size(); ++j) {
      if (cfg.kind == BlockKind::categorization) {
        table.cells[i][j] = categorize_cell(cfg.categorize_outputs, cfg.input_sizes[i],
                                            cfg.stream_lengths[j], cfg.trials, cfg.seed,
                                            cfg.sng_bits, cfg.winner_low)
                                .top_value_diff_pct;
      } else {
        table.cells[i][j] = block_cell_inaccuracy(cfg.kind, cfg.input_sizes[i],
                                                  cfg.stream_lengths[j], cfg.trials, cfg.seed,
                                                  cfg.sng_bits);
      }
    }
  }
  return table;
}

RngDiagnostics rng_diagnostics(std::size_t matrix_size, std::size_t cycles, uint64_t seed) {
  if (matrix_size > 64) throw std::domain_error("rng_diagnostics: matrix size > 64 unsupported");
  if (cycles < 1) throw std::invalid_argument("rng_diagnostics: cycles must be >= 1");

  RngDiagnostics diag;
  diag.matrix_size = matrix_size;
  diag.cycles = cycles;
  diag.degenerate = matrix_size == 1;

  RngMatrix matrix(matrix_size, seed);
  const std::size_t words = matrix.word_count();
  const auto width = static_cast<unsigned>(matrix_size);

  std::vector<std::size_t> ones(words, 0);
  std::vector<std::size_t> pair_and(words * words, 0);
  std::vector<uint64_t> snapshot(words);
  for (std::size_t t = 0; t < cycles; ++t) {
    matrix.step();
    for (std::size_t k = 0; k < words; ++k) {
      snapshot[k] = matrix.word(k, width);
      ones[k] += static_cast<std::size_t>(std::popcount(snapshot[k]));
    }
    for (std::size_t i = 0; i < words; ++i) {
      for (std::size_t j = i + 1; j < words; ++j) {
        pair_and[i * words + j] +=
            static_cast<std::size_t>(std::popcount(snapshot[i] & snapshot[j]));
      }
    }
  }

  const double samples = static_cast<double>(cycles) * static_cast<double>(matrix_size);
  diag.word_bias.resize(words);
  for (std::size_t k = 0; k < words; ++k) {
    diag.word_bias[k] = static_cast<double>(ones[k]) / samples;
  }

  // Pearson correlation over index-aligned bit samples; only a cell shared at
  // the same line position contributes, so the structural ceiling is 1/N.
  for (std::size_t i = 0; i < words; ++i) {
    for (std::size_t j = i + 1; j < words; ++j) {
      const double pi = diag.word_bias[i];
      const double pj = diag.word_bias[j];
      const double denom = std::sqrt(pi * (1 - pi) * pj * (1 - pj));
      if (denom <= 0) continue;
      const double joint = static_cast<double>(pair_and[i * words + j]) / samples;
      diag.max_abs_correlation =
          std::max(diag.max_abs_correlation, std::abs((joint - pi * pj) / denom));
    }
  }

  for (std::size_t i = 0; i < words; ++i) {
    for (std::size_t j = i + 1; j < words; ++j) {
      diag.max_line_overlap = std::max(diag.max_line_overlap, matrix.line_overlap(i, j));
    }
  }
  return diag;
}

std::string RngDiagnostics::to_csv() const {
  std::string out = "metric,index,value\n";
  for (std::size_t k = 0; k < word_bias.size(); ++k) {
    out += "word_bias," + std::to_string(k) + "," + format_csv_value(word_bias[k]) + "\n";
  }
  out += "max_abs_correlation,," + format_csv_value(max_abs_correlation) + "\n";
  out += "max_line_overlap,," + std::to_string(max_line_overlap) + "\n";
  out += "degenerate,," + std::string(degenerate ? "1" : "0") + "\n";
  return out;
}

}  // namespace scaqfp
