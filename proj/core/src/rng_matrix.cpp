#include "scaqfp/rng_matrix.hpp"

#include <stdexcept>

namespace scaqfp {

RngMatrix::RngMatrix(std::size_t size, uint64_t seed) : size_(size) {
  if (size < 1) throw std::domain_error("RngMatrix: size must be >= 1");

  cells_.reserve(size * size);
  SplitMix64 seeder(derive_seed(seed, 0x52'4e'47ULL));
  for (std::size_t i = 0; i < size * size; ++i) {
    cells_.emplace_back(seeder.next());
  }
  grid_.assign(size * size, 0);

  const auto n = size;
  lines_.resize(4 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) lines_[r].emplace_back(r, i);
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) lines_[n + c].emplace_back(i, c);
  }
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = 0; i < n; ++i) lines_[2 * n + d].emplace_back(i, (d + i) % n);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < n; ++i) lines_[3 * n + a].emplace_back(i, (a + n - i) % n);
  }
}

const std::vector<std::pair<std::size_t, std::size_t>>& RngMatrix::line(std::size_t k) const {
  if (k >= lines_.size()) throw std::out_of_range("RngMatrix::line: index out of range");
  return lines_[k];
}

std::size_t RngMatrix::line_overlap(std::size_t i, std::size_t j) const {
  if (i >= lines_.size() || j >= lines_.size()) {
    throw std::out_of_range("RngMatrix::line_overlap: index out of range");
  }
  std::size_t shared = 0;
  for (const auto& a : lines_[i]) {
    for (const auto& b : lines_[j]) {
      if (a == b) ++shared;
    }
  }
  return shared;
}

void RngMatrix::step() {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    grid_[i] = cells_[i].step() ? 1 : 0;
  }
}

void RngMatrix::force_grid(bool value) {
  for (auto& g : grid_) g = value ? 1 : 0;
}

bool RngMatrix::grid_bit(std::size_t row, std::size_t col) const {
  return grid_[row * size_ + col] != 0;
}

uint64_t RngMatrix::word(std::size_t k, unsigned width) const {
  const auto& cells = line(k);
  if (width > cells.size() || width > 64) {
    throw std::domain_error("RngMatrix::word: width exceeds line length or 64");
  }
  uint64_t w = 0;
  for (unsigned i = 0; i < width; ++i) {
    w = (w << 1) | (grid_[cells[i].first * size_ + cells[i].second] & 1u);
  }
  return w;
}

std::vector<uint64_t> RngMatrix::step_words() {
  if (size_ > 64) throw std::domain_error("RngMatrix::step_words: size > 64, use word()");
  step();
  std::vector<uint64_t> words(word_count());
  for (std::size_t k = 0; k < words.size(); ++k) {
    words[k] = word(k, static_cast<unsigned>(size_));
  }
  return words;
}

}  // namespace scaqfp
