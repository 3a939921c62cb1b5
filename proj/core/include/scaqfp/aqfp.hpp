#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nlohmann/json_fwd.hpp"
#include "scaqfp/netlist.hpp"

namespace scaqfp {

/// Thrown when a netlist violates the post-elaboration structural invariants.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Technology parameters. The JJ counts are calibration parameters of the
/// cell library file, not physical constants: buffers, inverters, constants
/// and registers are buffer-grade cells; AND/OR/MAJ are three-branch cells;
/// a splitter costs jj_split_per_branch per driven branch.
struct CellLibrary {
  unsigned jj_buf{2};
  unsigned jj_not{2};
  unsigned jj_const{2};
  unsigned jj_reg{2};
  unsigned jj_and2{6};
  unsigned jj_or2{6};
  unsigned jj_maj3{6};
  unsigned jj_split_per_branch{2};
  unsigned splitter_branching{3};
  double f_hz{5e9};
  double e_jj{1.0};  // energy units per JJ per clock cycle

  static CellLibrary from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// JJ count of one node; splitters are costed by their actual branch count.
  uint64_t jj_of(NodeKind kind, std::size_t fanout_count) const;
  uint64_t jj_total(const GateNetlist& net) const;
};

/// Gate netlist with per-node clock phases after elaboration. Primary inputs
/// sit at phase 0 and every cell is one phase after its (equal-phase)
/// predecessors. Register outputs restart at phase 0 for their consumers;
/// the physical loop length is reported, not enforced. Constants are
/// self-timed and exempt from the equal-phase rule.
struct PhasedNetlist {
  GateNetlist net;
  std::vector<uint32_t> phase;
  uint32_t depth{0};
  uint32_t max_loop_phases{0};
};

/// Routes every multi-sink signal through a minimal b-ary splitter tree
/// (shallowest points expanded first, so the tree is both depth- and
/// count-minimal). Constants are replicated per sink instead of split.
/// Primary inputs are assumed to be driven by external fabric and keep their
/// fan-out.
GateNetlist insert_splitters(const GateNetlist& net, const CellLibrary& lib);

/// Pads shorter fan-in paths with BUF chains so that every gate's inputs
/// arrive at one phase, and aligns all primary outputs to a common phase.
/// Works on raw or splitter-inserted netlists.
PhasedNetlist balance_phases(const GateNetlist& net);

/// Checks the post-elaboration invariants: arity, fan-out <= 1 for logic
/// cells, splitter branching <= b, equal predecessor phases everywhere
/// (register loop edges exempt), all outputs aligned. Throws ValidationError.
void validate_elaborated(const PhasedNetlist& p, const CellLibrary& lib);

/// insert_splitters + balance_phases + validate_elaborated.
PhasedNetlist elaborate(const GateNetlist& net, const CellLibrary& lib);

/// Majority-logic synthesis pass. Normalizes AND2/OR2 into constant-fed
/// MAJ3, simplifies to fixpoint (duplicate-input absorption, constant
/// propagation, double-negation elimination, inverter push through MAJ3 by
/// self-duality when it removes inverters), then maps constant-fed MAJ3 back
/// to AND2/OR2. Output function is unchanged and the JJ count never grows.
GateNetlist majority_rewrite(const GateNetlist& net);

struct EquivalenceResult {
  bool equivalent{false};
  /// For combinational mismatches: the failing input pattern.
  std::vector<uint8_t> counterexample;
};

/// Compares two netlists with matching interfaces: exhaustively up to
/// `exhaustive_limit` inputs, by random vectors beyond that, and by T-cycle
/// co-simulation when either side has registers.
EquivalenceResult equivalence_check(const GateNetlist& a, const GateNetlist& b,
                                    unsigned exhaustive_limit = 12, uint64_t seed = 1,
                                    std::size_t random_vectors = 10000,
                                    std::size_t cosim_cycles = 512);

struct EnergyReport {
  uint64_t jj_total{0};
  uint32_t phase_depth{0};
  double latency_s{0};
  double throughput_hz{0};
  double energy_total{0};
  uint64_t cycles{0};

  nlohmann::json to_json() const;
};

/// Cost report for a balanced netlist run for `cycles` stream bits.
/// latency = depth quarter-periods; throughput = one result per cycle once
/// the pipeline is full; energy = cycles * jj_total * e_jj.
EnergyReport report(const PhasedNetlist& p, const CellLibrary& lib, uint64_t cycles);

/// n-bit SNG comparator (rand < code) over explicit code and rand inputs
/// (each most-significant-first): one AND2 plus a MAJ3 per remaining bit.
GateNetlist build_sng_comparator(unsigned n_bits);

/// `outputs` independent SNG comparators in one netlist; the hardware block
/// behind the per-output-count utilization rows. RNG matrix junctions are
/// accounted separately via RngMatrix::jj_cost.
GateNetlist build_sng_bank(unsigned n_bits, std::size_t outputs);

/// Fits e_jj so that a 100-output, 10-bit SNG bank over a 1024-bit stream
/// costs `target_energy` (defaults to the reference 9.7e-5 pJ figure).
double fit_e_jj(const CellLibrary& lib, double target_energy = 9.7e-5, uint64_t cycles = 1024,
                std::size_t outputs = 100, unsigned n_bits = 10);

}  // namespace scaqfp
