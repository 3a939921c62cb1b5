#include <cmath>

#include "doctest.h"
#include "scaqfp/experiments.hpp"

using namespace scaqfp;

TEST_CASE("feature extraction cells sit in the reference regime") {
  // reduced-trial spot checks; the acceptance suite runs the full protocol
  const double cell_1024 = block_cell_inaccuracy(BlockKind::feature_extraction, 9, 1024, 150, 1, 10);
  CHECK(cell_1024 >= 0.0573 / 2.5);
  CHECK(cell_1024 <= 0.0573 * 2.5);
  const double cell_128 = block_cell_inaccuracy(BlockKind::feature_extraction, 9, 128, 150, 1, 10);
  CHECK(cell_128 > cell_1024);  // more stream bits, less inaccuracy
}

TEST_CASE("pooling cells sit in the reference regime") {
  const double cell = block_cell_inaccuracy(BlockKind::avg_pool, 4, 1024, 200, 1, 10);
  CHECK(cell >= 0.0085 / 2.5);
  CHECK(cell <= 0.0085 * 2.5);
  const double small = block_cell_inaccuracy(BlockKind::avg_pool, 4, 128, 200, 1, 10);
  CHECK(small <= 0.025 * 1.5);
}

TEST_CASE("categorization cell statistics") {
  const CategorizeCellStats stats = categorize_cell(10, 100, 512, 100, 1, 10);
  CHECK(stats.agreement_rate >= 0.98);
  CHECK(stats.top_value_diff_pct > 0.0);
  CHECK(stats.top_value_diff_pct < 5.0);
}

TEST_CASE("accuracy tables are reproducible byte for byte") {
  ExperimentConfig cfg;
  cfg.kind = BlockKind::avg_pool;
  cfg.input_sizes = {4, 9};
  cfg.stream_lengths = {128, 256};
  cfg.trials = 50;
  cfg.seed = 99;
  const std::string a = run_accuracy_table(cfg).to_csv();
  const std::string b = run_accuracy_table(cfg).to_csv();
  CHECK(a == b);
  CHECK(a.substr(0, 19) == "input_size,128,256\n");
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.input_sizes = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.input_sizes = {4};
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("rng diagnostics") {
  SUBCASE("odd matrix over many cycles") {
    const RngDiagnostics diag = rng_diagnostics(5, 100000, 11);
    REQUIRE(diag.word_bias.size() == 20);
    for (double bias : diag.word_bias) {
      CHECK(bias >= 0.495);
      CHECK(bias <= 0.505);
    }
    CHECK(diag.max_line_overlap == 1);
    CHECK(diag.max_abs_correlation <= 1.0 / 5.0 + 0.02);
    CHECK_FALSE(diag.degenerate);
  }
  SUBCASE("degenerate single-cell matrix is flagged") {
    const RngDiagnostics diag = rng_diagnostics(1, 100, 3);
    CHECK(diag.degenerate);
    CHECK(diag.to_csv().find("degenerate,,1") != std::string::npos);
  }
}
