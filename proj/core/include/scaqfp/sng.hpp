#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>

#include "scaqfp/bitstream.hpp"

namespace scaqfp {

/// Resolution of the random words fed to every SNG comparator unless a caller
/// overrides it; 10 bits matches the 1024-bit-stream benchmark configuration.
inline constexpr unsigned kDefaultSngBits = 10;

/// Weight/input value held on chip in binary form, to be compared against
/// per-cycle random words. code ranges over [0, 2^n_bits]; the saturated
/// value 2^n_bits makes 1.0 exactly representable.
struct BinaryCode {
  uint32_t code{0};
  unsigned n_bits{kDefaultSngBits};

  uint32_t max_code() const { return uint32_t{1} << n_bits; }

  /// The bipolar value this code converges to: 2*code/2^n - 1.
  double value() const {
    return 2.0 * static_cast<double>(code) / static_cast<double>(max_code()) - 1.0;
  }
};

/// Quantizes x in [-1,1] onto the n-bit comparator grid:
/// code = round((x+1) * 2^(n-1)), rounding half away from zero.
BinaryCode encode_bipolar(double x, unsigned n_bits = kDefaultSngBits);

/// One comparator decision: 1 iff rand_word < code, so P(1) = code/2^n for
/// uniform words. rand_word must be an n-bit value.
bool sng_compare(BinaryCode code, uint32_t rand_word);

/// Streams `length` comparator decisions from a span of pre-drawn words.
/// Throws if the span cannot supply one word per cycle.
BitStream generate_stream(BinaryCode code, std::span<const uint32_t> words, std::size_t length);

/// Streams `length` comparator decisions from a per-cycle word supplier.
template <typename WordFn>
BitStream generate_stream(BinaryCode code, WordFn&& next_word, std::size_t length) {
  BitStream out(length);
  for (std::size_t t = 0; t < length; ++t) {
    if (sng_compare(code, std::forward<WordFn>(next_word)())) out.set_bit(t, true);
  }
  return out;
}

}  // namespace scaqfp
