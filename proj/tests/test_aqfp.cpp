#include <cmath>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "scaqfp/aqfp.hpp"
#include "scaqfp/bitonic.hpp"
#include "scaqfp/blocks.hpp"
#include "scaqfp/prng.hpp"
#include "scaqfp/sng.hpp"

using namespace scaqfp;

namespace {

std::size_t count_kind(const GateNetlist& net, NodeKind kind) {
  std::size_t n = 0;
  for (const Node& node : net.nodes()) {
    if (node.kind == kind) ++n;
  }
  return n;
}

/// One driver fanning out to `sinks` buffers.
GateNetlist fanout_net(std::size_t sinks) {
  GateNetlist net;
  const NodeId a = net.add_input();
  const NodeId b = net.add_input();
  const NodeId g = net.add_gate(NodeKind::and2, {a, b});
  for (std::size_t i = 0; i < sinks; ++i) {
    net.add_output(net.add_gate(NodeKind::buf, {g}));
  }
  return net;
}

}  // namespace

TEST_CASE("splitter insertion") {
  const CellLibrary lib;
  SUBCASE("fan-out 1 nets are unchanged") {
    const GateNetlist net = build_comparator();
    // comparator inputs drive two gates each: inputs are exempt, gates are not
    const GateNetlist out = insert_splitters(net, lib);
    CHECK(count_kind(out, NodeKind::split) == 0);
  }
  SUBCASE("five sinks with branching 3 need two splitters at depth 2") {
    const GateNetlist out = insert_splitters(fanout_net(5), lib);
    CHECK(count_kind(out, NodeKind::split) == 2);
    const PhasedNetlist phased = balance_phases(out);
    // AND at 1, splitters at 2 and 3, buffers pad the shallow sinks
    CHECK(phased.depth == 4);
  }
  SUBCASE("functional equivalence is preserved") {
    for (std::size_t n : {5ul, 9ul}) {
      const GateNetlist net = build_bitonic_sorter(n);
      const GateNetlist out = insert_splitters(net, lib);
      CHECK(equivalence_check(net, out).equivalent);
    }
  }
  SUBCASE("constants are replicated, not split") {
    GateNetlist net;
    const NodeId a = net.add_input();
    const NodeId c = net.add_const(true);
    net.add_output(net.add_gate(NodeKind::and2, {a, c}));
    net.add_output(net.add_gate(NodeKind::or2, {a, c}));
    const GateNetlist out = insert_splitters(net, lib);
    CHECK(count_kind(out, NodeKind::const1) == 2);
    CHECK(count_kind(out, NodeKind::split) == 0);  // primary input fan-out is exempt
  }
}

TEST_CASE("phase balancing") {
  SUBCASE("a lone gate needs no buffers") {
    const PhasedNetlist p = balance_phases(build_comparator());
    CHECK(count_kind(p.net, NodeKind::buf) == 0);
    CHECK(p.depth == 1);
  }
  SUBCASE("uneven arrival is padded on the shallow path") {
    // chain of 3 buffers on one input, direct wire on the other
    GateNetlist net;
    const NodeId a = net.add_input();
    const NodeId b = net.add_input();
    NodeId chain = a;
    for (int i = 0; i < 3; ++i) chain = net.add_gate(NodeKind::buf, {chain});
    net.add_output(net.add_gate(NodeKind::and2, {chain, b}));
    const PhasedNetlist p = balance_phases(net);
    CHECK(count_kind(p.net, NodeKind::buf) == 6);  // 3 original + 3 inserted
    CHECK(p.depth == 4);
    CHECK_NOTHROW(validate_elaborated(p, CellLibrary{}));
  }
  SUBCASE("sorter outputs all arrive together at the stage count") {
    const PhasedNetlist p = balance_phases(build_bitonic_sorter(8));
    CHECK(p.depth == 6);
    for (NodeId out : p.net.outputs()) CHECK(p.phase[out] == 6);
  }
}

TEST_CASE("elaboration validates block netlists") {
  const CellLibrary lib;
  for (BlockKind kind :
       {BlockKind::feature_extraction, BlockKind::avg_pool, BlockKind::categorization}) {
    for (std::size_t m : {3ul, 4ul, 9ul}) {
      const PhasedNetlist p = elaborate(build_block_netlist(kind, m), lib);
      CHECK_NOTHROW(validate_elaborated(p, lib));
      CHECK(p.depth > 0);
    }
  }
}

TEST_CASE("validator catches broken invariants") {
  const CellLibrary lib;
  SUBCASE("fan-out above 1 on a logic cell") {
    PhasedNetlist p = balance_phases(fanout_net(3));
    CHECK_THROWS_AS(validate_elaborated(p, lib), ValidationError);
  }
  SUBCASE("tampered phase annotation") {
    PhasedNetlist p = elaborate(build_bitonic_sorter(4), lib);
    p.phase[p.net.outputs()[0]] += 1;
    CHECK_THROWS_AS(validate_elaborated(p, lib), ValidationError);
  }
}

TEST_CASE("majority rewrite rules") {
  SUBCASE("and gate normalizes to a constant-fed majority and maps back") {
    GateNetlist net;
    const NodeId a = net.add_input();
    const NodeId b = net.add_input();
    net.add_output(net.add_gate(NodeKind::and2, {a, b}));
    const GateNetlist out = majority_rewrite(net);
    CHECK(equivalence_check(net, out).equivalent);
    CHECK(count_kind(out, NodeKind::and2) == 1);  // denormalized back, no extra constant cell
    CHECK(count_kind(out, NodeKind::const0) == 0);
  }
  SUBCASE("duplicate majority input collapses") {
    GateNetlist net;
    const NodeId a = net.add_input();
    const NodeId b = net.add_input();
    net.add_output(net.add_gate(NodeKind::maj3, {a, a, b}));
    const GateNetlist out = majority_rewrite(net);
    CHECK(count_kind(out, NodeKind::maj3) == 0);
    CHECK(equivalence_check(net, out).equivalent);
  }
  SUBCASE("opposing constants select the free input") {
    GateNetlist net;
    const NodeId a = net.add_input();
    const NodeId c0 = net.add_const(false);
    const NodeId c1 = net.add_const(true);
    net.add_output(net.add_gate(NodeKind::maj3, {c0, a, c1}));
    const GateNetlist out = majority_rewrite(net);
    CHECK(count_kind(out, NodeKind::maj3) == 0);
    CHECK(equivalence_check(net, out).equivalent);
  }
  SUBCASE("double negation disappears") {
    GateNetlist net;
    const NodeId a = net.add_input();
    net.add_output(net.add_gate(NodeKind::inv, {net.add_gate(NodeKind::inv, {a})}));
    const GateNetlist out = majority_rewrite(net);
    CHECK(count_kind(out, NodeKind::inv) == 0);
  }
  SUBCASE("inverter pushes through a fully complemented majority") {
    GateNetlist net;
    const NodeId a = net.add_input();
    const NodeId b = net.add_input();
    const NodeId c = net.add_input();
    const NodeId na = net.add_gate(NodeKind::inv, {a});
    const NodeId nb = net.add_gate(NodeKind::inv, {b});
    const NodeId nc = net.add_gate(NodeKind::inv, {c});
    const NodeId m = net.add_gate(NodeKind::maj3, {na, nb, nc});
    net.add_output(net.add_gate(NodeKind::inv, {m}));
    const GateNetlist out = majority_rewrite(net);
    CHECK(equivalence_check(net, out).equivalent);
    CHECK(count_kind(out, NodeKind::inv) == 0);  // all four inverters cancel
  }
  SUBCASE("sorter rewrite preserves function exhaustively") {
    const GateNetlist net = build_bitonic_sorter(9);
    const GateNetlist out = majority_rewrite(net);
    CHECK(equivalence_check(net, out).equivalent);
  }
  SUBCASE("rewrite never raises the junction count on block netlists") {
    const CellLibrary lib;
    for (BlockKind kind :
         {BlockKind::feature_extraction, BlockKind::avg_pool, BlockKind::categorization}) {
      const GateNetlist net = build_block_netlist(kind, 9);
      const GateNetlist out = majority_rewrite(net);
      CHECK(lib.jj_total(out) <= lib.jj_total(net));
      CHECK(equivalence_check(net, out).equivalent);
    }
  }
}

TEST_CASE("equivalence check") {
  const GateNetlist a = build_comparator();
  SUBCASE("a net equals itself") { CHECK(equivalence_check(a, a).equivalent); }
  SUBCASE("and vs or has the (1,0) counterexample") {
    GateNetlist and_net, or_net;
    for (auto* net : {&and_net, &or_net}) {
      const NodeId x = net->add_input();
      const NodeId y = net->add_input();
      net->add_output(
          net->add_gate(net == &and_net ? NodeKind::and2 : NodeKind::or2, {x, y}));
    }
    const EquivalenceResult r = equivalence_check(and_net, or_net);
    CHECK_FALSE(r.equivalent);
    REQUIRE(r.counterexample.size() == 2);
    CHECK(r.counterexample[0] != r.counterexample[1]);
  }
  SUBCASE("interface mismatch is an error") {
    CHECK_THROWS_AS(equivalence_check(a, build_three_sorter()), std::invalid_argument);
  }
  SUBCASE("sequential nets are co-simulated") {
    const GateNetlist fe = build_block_netlist(BlockKind::feature_extraction, 3);
    CHECK(equivalence_check(fe, fe).equivalent);
    GateNetlist broken = fe;
    // reseat one register input to the wrong merger output
    for (NodeId id = 0; id < broken.node_count(); ++id) {
      if (broken.node(id).kind == NodeKind::reg) {
        broken.connect_reg(id, broken.inputs()[0]);
        break;
      }
    }
    CHECK_FALSE(equivalence_check(fe, broken).equivalent);
  }
}

TEST_CASE("sng comparator computes rand < code") {
  const unsigned n_bits = 4;
  const GateNetlist net = build_sng_comparator(n_bits);
  REQUIRE(net.num_inputs() == 2 * n_bits);
  for (uint32_t code = 0; code < 16; ++code) {
    for (uint32_t rand = 0; rand < 16; ++rand) {
      std::vector<uint8_t> in(8);
      for (unsigned k = 0; k < 4; ++k) {
        in[k] = static_cast<uint8_t>((code >> (3 - k)) & 1u);      // code, MSB first
        in[4 + k] = static_cast<uint8_t>((rand >> (3 - k)) & 1u);  // rand, MSB first
      }
      CHECK(eval_combinational(net, in)[0] == (rand < code ? 1 : 0));
    }
  }
}

TEST_CASE("energy reports") {
  const CellLibrary lib;
  SUBCASE("empty net reports zeros") {
    GateNetlist net;
    net.add_output(net.add_input());
    const EnergyReport r = report(balance_phases(net), lib, 1024);
    CHECK(r.jj_total == 0);
    CHECK(r.phase_depth == 0);
    CHECK(r.energy_total == 0);
  }
  SUBCASE("sng bank energy is linear in the output count") {
    std::vector<double> energy;
    for (std::size_t outputs : {100ul, 500ul, 800ul}) {
      const PhasedNetlist p = elaborate(build_sng_bank(10, outputs), lib);
      energy.push_back(report(p, lib, 1024).energy_total);
    }
    CHECK(energy[1] / energy[0] == doctest::Approx(5.0).epsilon(0.01));
    CHECK(energy[2] / energy[0] == doctest::Approx(8.0).epsilon(0.01));
  }
  SUBCASE("categorization depth doubles with the input count") {
    const PhasedNetlist p100 = elaborate(build_block_netlist(BlockKind::categorization, 100), lib);
    const PhasedNetlist p200 = elaborate(build_block_netlist(BlockKind::categorization, 200), lib);
    CHECK(std::abs(static_cast<int>(p200.depth) - 2 * static_cast<int>(p100.depth)) <= 1);
  }
  SUBCASE("latency follows depth over four phases per cycle") {
    const PhasedNetlist p = elaborate(build_bitonic_sorter(8), CellLibrary{});
    const EnergyReport r = report(p, lib, 1024);
    CHECK(r.latency_s == doctest::Approx(p.depth / (4.0 * lib.f_hz)));
    CHECK(r.throughput_hz == doctest::Approx(lib.f_hz));
  }
}

TEST_CASE("cell library json round trip and calibration") {
  CellLibrary lib;
  lib.splitter_branching = 4;
  lib.f_hz = 1e9;
  const CellLibrary back = CellLibrary::from_json(lib.to_json());
  CHECK(back.splitter_branching == 4);
  CHECK(back.f_hz == doctest::Approx(1e9));
  CHECK(back.jj_maj3 == lib.jj_maj3);

  // calibrated e_jj reproduces the target energy for the 100-output bank
  const double e = fit_e_jj(lib);
  CellLibrary calibrated = lib;
  calibrated.e_jj = e;
  const PhasedNetlist bank = elaborate(build_sng_bank(10, 100), calibrated);
  CHECK(report(bank, calibrated, 1024).energy_total == doctest::Approx(9.7e-5));
}
