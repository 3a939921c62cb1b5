#include <cmath>

#include "doctest.h"
#include "scaqfp/prng.hpp"
#include "scaqfp/sng.hpp"

using namespace scaqfp;

TEST_CASE("encode_bipolar endpoints and rounding") {
  CHECK(encode_bipolar(-1.0, 10).code == 0);
  CHECK(encode_bipolar(1.0, 10).code == 1024);
  // round(0.7 * 1024) = round(716.8)
  CHECK(encode_bipolar(0.4, 10).code == 717);
  CHECK(encode_bipolar(0.4, 10).value() == doctest::Approx(2.0 * 717 / 1024 - 1));
  CHECK_THROWS_AS(encode_bipolar(1.5, 10), std::domain_error);
  CHECK_THROWS_AS(encode_bipolar(-1.0001, 10), std::domain_error);
  CHECK_THROWS_AS(encode_bipolar(0.0, 0), std::domain_error);
}

TEST_CASE("sng_compare truth table") {
  const BinaryCode mid{512, 10};
  CHECK(sng_compare(mid, 511));
  CHECK_FALSE(sng_compare(mid, 512));
  const BinaryCode zero{0, 10};
  const BinaryCode full{1024, 10};
  for (uint32_t r : {0u, 1u, 511u, 1023u}) {
    CHECK_FALSE(sng_compare(zero, r));
    CHECK(sng_compare(full, r));
  }
  CHECK_THROWS_AS(sng_compare(mid, 1024), std::domain_error);
}

TEST_CASE("generate_stream saturation and supply errors") {
  RandomWordSource source(1, 10);
  CHECK(generate_stream(BinaryCode{0, 10}, source, 64).popcount() == 0);
  CHECK(generate_stream(BinaryCode{1024, 10}, source, 64).popcount() == 64);

  const std::vector<uint32_t> words(10, 5);
  CHECK_THROWS_AS(generate_stream(BinaryCode{512, 10}, std::span<const uint32_t>(words), 11),
                  std::runtime_error);
}

TEST_CASE("generated streams converge to the encoded value") {
  const std::size_t n = 4096;
  RandomWordSource source(derive_seed(21, 3), 10);
  const BitStream s = generate_stream(encode_bipolar(0.4), source, n);
  // binomial 3 sigma at p = 0.7, doubled by the bipolar decode
  const double bound = 3.0 * 2.0 * std::sqrt(0.7 * 0.3 / static_cast<double>(n));
  CHECK(std::abs(decode_stream(s, Encoding::bipolar) - 0.4) <= bound);
}

TEST_CASE("round trip over the representable grid") {
  const std::size_t n = 4096;
  const double tolerance = 4.0 / std::sqrt(static_cast<double>(n));
  SplitMix64 gen(17);
  int failures = 0;
  const int trials = 500;
  for (int i = 0; i < trials; ++i) {
    const auto k = static_cast<uint32_t>(gen.next() % 1025);
    const double x = static_cast<double>(k) / 512.0 - 1.0;  // k / 2^(n-1) - 1
    RandomWordSource source(derive_seed(23, i), 10);
    const BitStream s = generate_stream(encode_bipolar(x), source, n);
    if (std::abs(decode_stream(s, Encoding::bipolar) - x) > tolerance) ++failures;
  }
  CHECK(failures <= trials / 100);  // within tolerance in >= 99% of trials
}
