#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "scaqfp/prng.hpp"

namespace scaqfp {

/// One true-RNG unit: emits an unbiased random bit per clock step.
/// Thermal noise is stood in for by a seeded deterministic generator so that
/// every experiment is reproducible from its seed.
struct UnitRng {
  SplitMix64 gen;

  explicit UnitRng(uint64_t seed = 0) : gen(seed) {}

  bool step() { return (gen.next() >> 63) != 0; }
};

/// N x N grid of unit RNGs whose cells are shared across 4N output words:
/// N rows, N columns, N wrapped diagonals and N wrapped anti-diagonals.
/// Every cell lies on exactly one line of each family, so every unit serves
/// exactly four words; for odd N any two distinct lines meet in at most one
/// cell, which bounds the correlation between output words.
///
/// Stepping mutates all cell states at once; a matrix instance is
/// single-writer. Layout queries are const and safe to share.
class RngMatrix {
public:
  /// Builds the matrix and its line layout. Throws for size == 0.
  /// size == 1 is the allowed degenerate case (4 identical single-cell lines);
  /// even sizes relax the pairwise overlap bound from 1 to 2.
  explicit RngMatrix(std::size_t size, uint64_t seed = 0);

  std::size_t size() const { return size_; }
  std::size_t word_count() const { return 4 * size_; }

  /// Cells of line k in layout order; first cell = most significant word bit.
  const std::vector<std::pair<std::size_t, std::size_t>>& line(std::size_t k) const;

  /// Number of cells two lines have in common.
  std::size_t line_overlap(std::size_t i, std::size_t j) const;

  /// Advances every cell exactly once and captures the new bit grid.
  void step();

  /// Test hook: overwrites the captured grid with a constant.
  void force_grid(bool value);

  /// Bit of the current grid at (row, col).
  bool grid_bit(std::size_t row, std::size_t col) const;

  /// Word k assembled from the current grid, truncated to `width` leading
  /// cells (width <= min(size, 64)); first cell in line order is the MSB.
  uint64_t word(std::size_t k, unsigned width) const;

  /// All 4N words at native width; requires size <= 64.
  std::vector<uint64_t> step_words();

  /// Two Josephson junctions per unit cell, independent of consumers.
  uint64_t jj_cost() const { return 2ull * size_ * size_; }

private:
  std::size_t size_;
  std::vector<UnitRng> cells_;
  std::vector<uint8_t> grid_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> lines_;
};

}  // namespace scaqfp
