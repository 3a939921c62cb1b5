#include "scaqfp/bitstream.hpp"

#include <bit>
#include <stdexcept>

namespace scaqfp {

namespace {
constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }
}  // namespace

BitStream::BitStream(std::size_t length, bool fill)
    : words_(word_count(length), fill ? ~uint64_t{0} : uint64_t{0}), size_(length) {
  mask_tail();
}

BitStream BitStream::from_string(const std::string& bits) {
  BitStream s(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      s.set_bit(i, true);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("BitStream::from_string: expected only '0'/'1'");
    }
  }
  return s;
}

bool BitStream::bit(std::size_t t) const {
  if (t >= size_) throw std::out_of_range("BitStream::bit: index out of range");
  return (words_[t / kWordBits] >> (t % kWordBits)) & 1u;
}

void BitStream::set_bit(std::size_t t, bool value) {
  if (t >= size_) throw std::out_of_range("BitStream::set_bit: index out of range");
  const uint64_t mask = uint64_t{1} << (t % kWordBits);
  if (value) {
    words_[t / kWordBits] |= mask;
  } else {
    words_[t / kWordBits] &= ~mask;
  }
}

void BitStream::push_back(bool value) {
  if (size_ % kWordBits == 0) words_.push_back(0);
  ++size_;
  if (value) set_bit(size_ - 1, true);
}

std::size_t BitStream::popcount() const {
  std::size_t ones = 0;
  for (uint64_t w : words_) ones += static_cast<std::size_t>(std::popcount(w));
  return ones;
}

std::string BitStream::to_string() const {
  std::string out(size_, '0');
  for (std::size_t t = 0; t < size_; ++t) {
    if (bit(t)) out[t] = '1';
  }
  return out;
}

void BitStream::mask_tail() {
  const std::size_t rem = size_ % kWordBits;
  if (rem != 0 && !words_.empty()) {
    words_.back() &= (uint64_t{1} << rem) - 1;
  }
}

double decode_stream(const BitStream& s, Encoding e) {
  if (s.empty()) throw std::domain_error("decode_stream: empty stream");
  const double density = static_cast<double>(s.popcount()) / static_cast<double>(s.size());
  return e == Encoding::unipolar ? density : 2.0 * density - 1.0;
}

BitStream xnor_multiply(const BitStream& a, const BitStream& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xnor_multiply: length mismatch");
  BitStream out(a.size());
  auto& w = out.mutable_words();
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = ~(a.words()[i] ^ b.words()[i]);
  }
  out.mask_tail();  // ~ sets bits beyond the logical length
  return out;
}

BitStream mux_add(const BitStream& a, const BitStream& b, const BitStream& select) {
  if (a.size() != b.size() || a.size() != select.size()) {
    throw std::invalid_argument("mux_add: length mismatch");
  }
  BitStream out(a.size());
  auto& w = out.mutable_words();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const uint64_t s = select.words()[i];
    w[i] = (a.words()[i] & s) | (b.words()[i] & ~s);
  }
  return out;
}

BitStream neutral_noise(std::size_t length) {
  if (length == 0) throw std::domain_error("neutral_noise: length must be >= 1");
  BitStream out(length);
  auto& w = out.mutable_words();
  // 1 at t=0, then alternating
  for (auto& word : w) word = 0x5555555555555555ULL;
  out.mask_tail();
  return out;
}

}  // namespace scaqfp
