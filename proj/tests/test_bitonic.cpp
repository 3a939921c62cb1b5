#include <vector>

#include "doctest.h"
#include "scaqfp/bitonic.hpp"
#include "scaqfp/prng.hpp"

using namespace scaqfp;

namespace {

/// Sort-by-counting oracle: descending output has popcount leading ones.
std::vector<uint8_t> popcount_sorted(const std::vector<uint8_t>& in, SortDirection dir) {
  std::size_t ones = 0;
  for (uint8_t b : in) ones += b;
  std::vector<uint8_t> out(in.size(), 0);
  if (dir == SortDirection::descending) {
    for (std::size_t i = 0; i < ones; ++i) out[i] = 1;
  } else {
    for (std::size_t i = in.size() - ones; i < in.size(); ++i) out[i] = 1;
  }
  return out;
}

std::vector<uint8_t> pattern_bits(uint64_t bits, std::size_t n) {
  std::vector<uint8_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<uint8_t>((bits >> i) & 1u);
  return v;
}

}  // namespace

TEST_CASE("comparator truth table") {
  const GateNetlist desc = build_comparator(SortDirection::descending);
  CHECK(eval_combinational(desc, {0, 0}) == std::vector<uint8_t>{0, 0});
  CHECK(eval_combinational(desc, {1, 1}) == std::vector<uint8_t>{1, 1});
  CHECK(eval_combinational(desc, {0, 1}) == std::vector<uint8_t>{1, 0});
  CHECK(eval_combinational(desc, {1, 0}) == std::vector<uint8_t>{1, 0});

  const GateNetlist asc = build_comparator(SortDirection::ascending);
  CHECK(eval_combinational(asc, {1, 0}) == std::vector<uint8_t>{0, 1});
}

TEST_CASE("three sorter sorts every pattern") {
  const GateNetlist net = build_three_sorter();
  CHECK(eval_combinational(net, {1, 0, 0}) == std::vector<uint8_t>{1, 0, 0});
  CHECK(eval_combinational(net, {1, 1, 0}) == std::vector<uint8_t>{1, 1, 0});
  for (uint64_t bits = 0; bits < 8; ++bits) {
    const auto in = pattern_bits(bits, 3);
    CHECK(eval_combinational(net, in) == popcount_sorted(in, SortDirection::descending));
  }
}

TEST_CASE("sorter matches the popcount oracle exhaustively up to width 12") {
  for (std::size_t n = 1; n <= 12; ++n) {
    for (SortDirection dir : {SortDirection::descending, SortDirection::ascending}) {
      const GateNetlist net = build_bitonic_sorter(n, dir);
      for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
        const auto in = pattern_bits(bits, n);
        REQUIRE(eval_combinational(net, in) == popcount_sorted(in, dir));
      }
    }
  }
}

TEST_CASE("sorter handles the odd conv-kernel width") {
  const GateNetlist net = build_bitonic_sorter(9);
  for (uint64_t bits = 0; bits < 512; ++bits) {
    const auto in = pattern_bits(bits, 9);
    REQUIRE(eval_combinational(net, in) == popcount_sorted(in, SortDirection::descending));
  }
}

TEST_CASE("popcount is conserved through sorting") {
  SplitMix64 gen(13);
  const GateNetlist net = build_bitonic_sorter(31);
  for (int i = 0; i < 200; ++i) {
    std::vector<uint8_t> in(31);
    std::size_t ones = 0;
    for (auto& b : in) {
      b = static_cast<uint8_t>(gen.next() & 1);
      ones += b;
    }
    const auto out = eval_combinational(net, in);
    std::size_t out_ones = 0;
    for (uint8_t b : out) out_ones += b;
    CHECK(out_ones == ones);
  }
}

TEST_CASE("merger sorts every two-run concatenation up to width 12") {
  // descending merger contract: descending run followed by an ascending run,
  // any split; ascending merger takes the same shapes and reverses the order
  for (std::size_t n = 1; n <= 12; ++n) {
    const GateNetlist desc = build_bitonic_merger(n, SortDirection::descending);
    const GateNetlist asc = build_bitonic_merger(n, SortDirection::ascending);
    for (std::size_t a = 0; a <= n; ++a) {
      for (std::size_t b = 0; a + b <= n; ++b) {
        std::vector<uint8_t> valley(n);
        for (std::size_t i = 0; i < n; ++i) valley[i] = (i < a || i >= a + b) ? 1 : 0;
        REQUIRE(eval_combinational(desc, valley) ==
                popcount_sorted(valley, SortDirection::descending));
        REQUIRE(eval_combinational(asc, valley) ==
                popcount_sorted(valley, SortDirection::ascending));
      }
    }
  }
}

TEST_CASE("merger of all-ones is the identity") {
  const GateNetlist net = build_bitonic_merger(8);
  const std::vector<uint8_t> ones(8, 1);
  CHECK(eval_combinational(net, ones) == ones);
}

TEST_CASE("wide sorters on random patterns") {
  SplitMix64 gen(29);
  for (std::size_t n : {25ul, 49ul}) {
    const GateNetlist net = build_bitonic_sorter(n);
    for (int i = 0; i < 500; ++i) {
      std::vector<uint8_t> in(n);
      for (auto& b : in) b = static_cast<uint8_t>(gen.next() & 1);
      REQUIRE(eval_combinational(net, in) == popcount_sorted(in, SortDirection::descending));
    }
  }
}
