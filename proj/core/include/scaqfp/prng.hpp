#pragma once

#include <cstdint>

namespace scaqfp {

/// splitmix64: cheap, seedable, statistically solid enough for Monte Carlo work.
/// Every random decision in the library flows through explicitly passed instances,
/// so identical seeds give identical results on any platform.
struct SplitMix64 {
  uint64_t state{0};

  constexpr explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

  constexpr uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-1, 1].
  double next_signed_unit() { return next_double() * 2.0 - 1.0; }
};

/// Derives an independent sub-seed from a master seed and up to three indices.
/// Used to split one experiment seed into per-(M, N, trial) stream seeds.
constexpr uint64_t derive_seed(uint64_t master, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0) {
  SplitMix64 g(master);
  g.state ^= 0x632be59bd9b4e019ULL * (a + 1);
  g.next();
  g.state ^= 0x9e6c63d0a161fe58ULL * (b + 1);
  g.next();
  g.state ^= 0xc2b2ae3d27d4eb4fULL * (c + 1);
  return g.next();
}

/// Supplies one n-bit random word per call; the software stand-in for an
/// n-bit true RNG feeding an SNG comparator.
struct RandomWordSource {
  SplitMix64 gen;
  unsigned n_bits;

  RandomWordSource(uint64_t seed, unsigned bits) : gen(seed), n_bits(bits) {}

  uint32_t operator()() { return static_cast<uint32_t>(gen.next() >> (64u - n_bits)); }
};

}  // namespace scaqfp
