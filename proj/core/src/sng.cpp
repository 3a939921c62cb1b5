#include "scaqfp/sng.hpp"

#include <cmath>

namespace scaqfp {

BinaryCode encode_bipolar(double x, unsigned n_bits) {
  if (!(x >= -1.0 && x <= 1.0)) throw std::domain_error("encode_bipolar: x outside [-1, 1]");
  if (n_bits < 1 || n_bits > 31) throw std::domain_error("encode_bipolar: n_bits outside [1, 31]");
  const double scaled = (x + 1.0) * static_cast<double>(uint32_t{1} << (n_bits - 1));
  // the argument is non-negative, so llround's half-away-from-zero is half-up here
  const auto code = static_cast<uint32_t>(std::llround(scaled));
  return BinaryCode{code, n_bits};
}

bool sng_compare(BinaryCode code, uint32_t rand_word) {
  if (rand_word >= code.max_code()) {
    throw std::domain_error("sng_compare: rand_word has more than n_bits bits");
  }
  return rand_word < code.code;
}

BitStream generate_stream(BinaryCode code, std::span<const uint32_t> words, std::size_t length) {
  if (words.size() < length) throw std::runtime_error("generate_stream: random word supply exhausted");
  BitStream out(length);
  for (std::size_t t = 0; t < length; ++t) {
    if (sng_compare(code, words[t])) out.set_bit(t, true);
  }
  return out;
}

}  // namespace scaqfp
