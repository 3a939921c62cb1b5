#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace scaqfp {

enum class Encoding { unipolar, bipolar };

/// Fixed-length packed bit sequence: the stochastic-number value carrier.
/// Bit t of a stream is the sample emitted at clock cycle t.
class BitStream {
public:
  BitStream() = default;
  explicit BitStream(std::size_t length, bool fill = false);

  /// Parses "0100110100" (index 0 first).
  static BitStream from_string(const std::string& bits);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool bit(std::size_t t) const;
  void set_bit(std::size_t t, bool value);
  void push_back(bool value);

  std::size_t popcount() const;

  const std::vector<uint64_t>& words() const { return words_; }
  std::vector<uint64_t>& mutable_words() { return words_; }

  std::string to_string() const;

  bool operator==(const BitStream& other) const = default;

  /// Clears bits beyond the logical length; word-level writers must call this.
  void mask_tail();

private:
  std::vector<uint64_t> words_;
  std::size_t size_{0};
};

/// Unipolar: popcount/N in [0,1]; bipolar: 2*popcount/N - 1 in [-1,1].
double decode_stream(const BitStream& s, Encoding e);

/// Bit-wise XNOR; bipolar multiplication for independent streams.
BitStream xnor_multiply(const BitStream& a, const BitStream& b);

/// Per-cycle 2:1 select: out_t = select_t ? a_t : b_t.
/// With a fair select (bipolar value 0) this realizes scaled addition.
BitStream mux_add(const BitStream& a, const BitStream& b, const BitStream& select);

/// Deterministic 1,0,1,0,... stream; bipolar value 0 for even lengths.
BitStream neutral_noise(std::size_t length);

}  // namespace scaqfp
