#include <benchmark/benchmark.h>

#include "scaqfp/aqfp.hpp"
#include "scaqfp/bitonic.hpp"
#include "scaqfp/blocks.hpp"
#include "scaqfp/prng.hpp"
#include "scaqfp/rng_matrix.hpp"
#include "scaqfp/sng.hpp"

using namespace scaqfp;

static void BM_XnorMultiply(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  RandomWordSource sa(1, 10), sb(2, 10);
  const BitStream a = generate_stream(encode_bipolar(0.3), sa, n);
  const BitStream b = generate_stream(encode_bipolar(-0.7), sb, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(xnor_multiply(a, b));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(n));
}
BENCHMARK(BM_XnorMultiply)->Arg(1024)->Arg(8192);

static void BM_GenerateStream(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const BinaryCode code = encode_bipolar(0.37);
  uint64_t seed = 0;
  for (auto _ : state) {
    RandomWordSource source(++seed, 10);
    benchmark::DoNotOptimize(generate_stream(code, source, n));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(n));
}
BENCHMARK(BM_GenerateStream)->Arg(1024);

static void BM_SorterEval(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const GateNetlist net = build_bitonic_sorter(n);
  SplitMix64 gen(5);
  std::vector<uint8_t> in(n);
  for (auto& b : in) b = static_cast<uint8_t>(gen.next() & 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_combinational(net, in));
  }
}
BENCHMARK(BM_SorterEval)->Arg(9)->Arg(25)->Arg(121);

static void BM_FeRun(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  SplitMix64 vg(9);
  std::vector<double> values(m);
  for (auto& v : values) v = vg.next_signed_unit();
  const ProductMatrix pm = make_product_matrix(values, 1024, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fe_run(pm));
  }
}
BENCHMARK(BM_FeRun)->Arg(9)->Arg(121);

static void BM_GateLevelBlock(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const GateNetlist net = build_block_netlist(BlockKind::feature_extraction, m);
  SplitMix64 vg(13);
  std::vector<double> values(m);
  for (auto& v : values) v = vg.next_signed_unit();
  const ProductMatrix pm = make_product_matrix(values, 256, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_block_netlist(net, pm));
  }
}
BENCHMARK(BM_GateLevelBlock)->Arg(9)->Arg(25);

static void BM_RngMatrixStep(benchmark::State& state) {
  RngMatrix matrix(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    matrix.step();
    benchmark::DoNotOptimize(matrix.word(0, 10));
  }
}
BENCHMARK(BM_RngMatrixStep)->Arg(11)->Arg(61);

static void BM_Elaborate(benchmark::State& state) {
  const CellLibrary lib;
  const GateNetlist net = build_block_netlist(BlockKind::feature_extraction, 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(elaborate(net, lib));
  }
}
BENCHMARK(BM_Elaborate);

static void BM_MajorityRewrite(benchmark::State& state) {
  const GateNetlist net = build_bitonic_sorter(25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(majority_rewrite(net));
  }
}
BENCHMARK(BM_MajorityRewrite);

BENCHMARK_MAIN();
