#include "scaqfp/aqfp.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "nlohmann/json.hpp"
#include "scaqfp/prng.hpp"

namespace scaqfp {

CellLibrary CellLibrary::from_json(const nlohmann::json& j) {
  CellLibrary lib;
  if (j.contains("cells")) {
    const auto& cells = j.at("cells");
    auto get = [&](const char* name, unsigned fallback) -> unsigned {
      if (!cells.contains(name)) return fallback;
      return cells.at(name).at("jj").get<unsigned>();
    };
    lib.jj_buf = get("BUF", lib.jj_buf);
    lib.jj_not = get("NOT", lib.jj_not);
    lib.jj_const = get("CONST", lib.jj_const);
    lib.jj_reg = get("REG", lib.jj_reg);
    lib.jj_and2 = get("AND2", lib.jj_and2);
    lib.jj_or2 = get("OR2", lib.jj_or2);
    lib.jj_maj3 = get("MAJ3", lib.jj_maj3);
    if (cells.contains("SPLIT")) {
      lib.jj_split_per_branch = cells.at("SPLIT").at("jj_per_branch").get<unsigned>();
    }
  }
  lib.splitter_branching = j.value("branching", lib.splitter_branching);
  lib.f_hz = j.value("f_hz", lib.f_hz);
  lib.e_jj = j.value("e_jj", lib.e_jj);
  if (lib.splitter_branching < 2) throw std::invalid_argument("CellLibrary: branching must be >= 2");
  if (lib.f_hz <= 0) throw std::invalid_argument("CellLibrary: f_hz must be positive");
  return lib;
}

nlohmann::json CellLibrary::to_json() const {
  nlohmann::json cells;
  cells["BUF"] = {{"jj", jj_buf}};
  cells["NOT"] = {{"jj", jj_not}};
  cells["CONST"] = {{"jj", jj_const}};
  cells["REG"] = {{"jj", jj_reg}};
  cells["AND2"] = {{"jj", jj_and2}};
  cells["OR2"] = {{"jj", jj_or2}};
  cells["MAJ3"] = {{"jj", jj_maj3}};
  cells["SPLIT"] = {{"jj_per_branch", jj_split_per_branch}};
  return nlohmann::json{
      {"cells", cells}, {"branching", splitter_branching}, {"f_hz", f_hz}, {"e_jj", e_jj}};
}

uint64_t CellLibrary::jj_of(NodeKind kind, std::size_t fanout_count) const {
  switch (kind) {
    case NodeKind::input:
    case NodeKind::output:
      return 0;
    case NodeKind::buf:
      return jj_buf;
    case NodeKind::inv:
      return jj_not;
    case NodeKind::const0:
    case NodeKind::const1:
      return jj_const;
    case NodeKind::reg:
      return jj_reg;
    case NodeKind::and2:
      return jj_and2;
    case NodeKind::or2:
      return jj_or2;
    case NodeKind::maj3:
      return jj_maj3;
    case NodeKind::split:
      return static_cast<uint64_t>(jj_split_per_branch) * std::max<std::size_t>(fanout_count, 1);
  }
  throw std::invalid_argument("jj_of: unknown kind");
}

uint64_t CellLibrary::jj_total(const GateNetlist& net) const {
  const auto fo = net.fanouts();
  uint64_t total = 0;
  for (NodeId id = 0; id < net.node_count(); ++id) {
    total += jj_of(net.node(id).kind, fo[id].size());
  }
  return total;
}

GateNetlist insert_splitters(const GateNetlist& net, const CellLibrary& lib) {
  const unsigned b = lib.splitter_branching;
  GateNetlist out = net;

  // Edges per driver: (sink, fan-in position), one entry per occurrence.
  const std::size_t original_count = net.node_count();
  std::vector<std::vector<std::pair<NodeId, unsigned>>> edges(original_count);
  for (NodeId sink = 0; sink < original_count; ++sink) {
    const auto& fanins = net.node(sink).fanins;
    for (unsigned pos = 0; pos < fanins.size(); ++pos) {
      edges[fanins[pos]].emplace_back(sink, pos);
    }
  }

  for (NodeId driver = 0; driver < original_count; ++driver) {
    const auto& sinks = edges[driver];
    const NodeKind kind = net.node(driver).kind;
    if (sinks.size() <= 1 || kind == NodeKind::input) continue;

    if (kind == NodeKind::const0 || kind == NodeKind::const1) {
      // Constants are hardwired cells; replicate instead of splitting.
      for (std::size_t i = 1; i < sinks.size(); ++i) {
        const NodeId replica = out.add_const(kind == NodeKind::const1);
        out.set_fanin(sinks[i].first, sinks[i].second, replica);
      }
      continue;
    }

    // Grow connection slots breadth-first: expanding the shallowest slot
    // keeps the tree depth at ceil(log_b k) with ceil((k-1)/(b-1)) splitters.
    std::deque<NodeId> slots{driver};
    std::size_t ready = 1;
    while (ready < sinks.size()) {
      const NodeId point = slots.front();
      slots.pop_front();
      const NodeId split = out.add_gate(NodeKind::split, {point});
      for (unsigned i = 0; i < b; ++i) slots.push_back(split);
      ready += b - 1;
    }
    for (const auto& [sink, pos] : sinks) {
      out.set_fanin(sink, pos, slots.front());
      slots.pop_front();
    }
  }
  out.check();
  return out;
}

namespace {

bool phase_exempt_source(NodeKind kind) {
  return kind == NodeKind::const0 || kind == NodeKind::const1;
}

/// Phase a predecessor presents to its consumers; register outputs restart
/// the pipeline at phase 0.
uint32_t presented_phase(const GateNetlist& net, const std::vector<uint32_t>& phase, NodeId pred) {
  return net.node(pred).kind == NodeKind::reg ? 0u : phase[pred];
}

}  // namespace

PhasedNetlist balance_phases(const GateNetlist& in) {
  PhasedNetlist result;
  result.net = in;
  GateNetlist& net = result.net;
  auto& phase = result.phase;
  phase.assign(net.node_count(), 0);

  auto pad_edge = [&](NodeId sink, unsigned pos, uint32_t from, uint32_t to) {
    NodeId wire = net.node(sink).fanins[pos];
    for (uint32_t p = from; p < to; ++p) {
      wire = net.add_gate(NodeKind::buf, {wire});
      phase.push_back(p + 1);
    }
    net.set_fanin(sink, pos, wire);
  };

  const auto order = in.topological_order();
  for (NodeId id : order) {
    // take copies: pad_edge appends nodes and may reallocate the node array
    const NodeKind kind = net.node(id).kind;
    const std::vector<NodeId> fanins = net.node(id).fanins;
    switch (kind) {
      case NodeKind::input:
      case NodeKind::const0:
      case NodeKind::const1:
        phase[id] = 0;
        break;
      case NodeKind::reg:
        break;  // assigned after its fan-in settles
      case NodeKind::output:
        break;  // aligned below
      default: {
        uint32_t target = 0;
        for (NodeId f : fanins) {
          if (phase_exempt_source(net.node(f).kind)) continue;
          target = std::max(target, presented_phase(net, phase, f));
        }
        for (unsigned pos = 0; pos < fanins.size(); ++pos) {
          const NodeId f = fanins[pos];
          if (phase_exempt_source(net.node(f).kind)) continue;
          const uint32_t pp = presented_phase(net, phase, f);
          if (pp < target) pad_edge(id, pos, pp, target);
        }
        phase[id] = target + 1;
        break;
      }
    }
  }

  // Registers occupy the phase after their driver; the loop back to phase 0
  // is reported, not padded.
  for (NodeId id : order) {
    if (net.node(id).kind != NodeKind::reg) continue;
    const NodeId f = net.node(id).fanins[0];
    phase[id] = presented_phase(net, phase, f) + 1;
    result.max_loop_phases = std::max(result.max_loop_phases, phase[id]);
  }

  // Align all primary outputs to one phase.
  uint32_t out_phase = 0;
  for (NodeId id : net.outputs()) {
    out_phase = std::max(out_phase, presented_phase(net, phase, net.node(id).fanins[0]));
  }
  for (NodeId id : net.outputs()) {
    const NodeId f = net.node(id).fanins[0];
    const uint32_t pp = presented_phase(net, phase, f);
    if (pp < out_phase) pad_edge(id, 0, pp, out_phase);
    phase[id] = out_phase;
  }

  for (NodeId id = 0; id < net.node_count(); ++id) {
    if (occupies_phase(net.node(id).kind)) result.depth = std::max(result.depth, phase[id]);
  }
  return result;
}

void validate_elaborated(const PhasedNetlist& p, const CellLibrary& lib) {
  const GateNetlist& net = p.net;
  try {
    net.check();
  } catch (const std::exception& e) {
    throw ValidationError(std::string("structure: ") + e.what());
  }
  if (p.phase.size() != net.node_count()) throw ValidationError("phase annotation size mismatch");

  const auto fo = net.fanouts();
  for (NodeId id = 0; id < net.node_count(); ++id) {
    const Node& n = net.node(id);
    const std::size_t k = fo[id].size();
    if (n.kind == NodeKind::split) {
      if (k > lib.splitter_branching) {
        throw ValidationError("splitter " + std::to_string(id) + " exceeds branching");
      }
    } else if (n.kind != NodeKind::input && n.kind != NodeKind::output && k > 1) {
      throw ValidationError("cell " + std::to_string(id) + " has fan-out " + std::to_string(k));
    }
  }

  for (NodeId id = 0; id < net.node_count(); ++id) {
    const Node& n = net.node(id);
    if (n.kind == NodeKind::input && p.phase[id] != 0) {
      throw ValidationError("primary input not at phase 0");
    }
    if (!occupies_phase(n.kind) && n.kind != NodeKind::output) continue;

    bool have_pred = false;
    uint32_t pred_phase = 0;
    for (NodeId f : n.fanins) {
      if (phase_exempt_source(net.node(f).kind)) continue;
      const uint32_t pp = presented_phase(net, p.phase, f);
      if (have_pred && pp != pred_phase) {
        throw ValidationError("unequal input phases at node " + std::to_string(id));
      }
      pred_phase = pp;
      have_pred = true;
    }
    if (n.kind == NodeKind::output) {
      if (have_pred && p.phase[id] != pred_phase) {
        throw ValidationError("output phase annotation mismatch");
      }
      continue;
    }
    if (have_pred && p.phase[id] != pred_phase + 1) {
      throw ValidationError("phase of node " + std::to_string(id) + " is not predecessor + 1");
    }
  }

  uint32_t out_phase = 0;
  bool first = true;
  for (NodeId id : net.outputs()) {
    if (first) {
      out_phase = p.phase[id];
      first = false;
    } else if (p.phase[id] != out_phase) {
      throw ValidationError("primary outputs are not phase-aligned");
    }
  }
}

PhasedNetlist elaborate(const GateNetlist& net, const CellLibrary& lib) {
  PhasedNetlist p = balance_phases(insert_splitters(net, lib));
  validate_elaborated(p, lib);
  return p;
}

EnergyReport report(const PhasedNetlist& p, const CellLibrary& lib, uint64_t cycles) {
  EnergyReport r;
  r.jj_total = lib.jj_total(p.net);
  r.phase_depth = p.depth;
  r.latency_s = static_cast<double>(p.depth) / (4.0 * lib.f_hz);
  r.throughput_hz = lib.f_hz;
  r.cycles = cycles;
  r.energy_total = static_cast<double>(cycles) * static_cast<double>(r.jj_total) * lib.e_jj;
  return r;
}

nlohmann::json EnergyReport::to_json() const {
  return nlohmann::json{{"jj_total", jj_total},        {"phase_depth", phase_depth},
                        {"latency_s", latency_s},      {"throughput_hz", throughput_hz},
                        {"energy_total", energy_total}, {"cycles", cycles}};
}

GateNetlist build_sng_comparator(unsigned n_bits) {
  if (n_bits < 1) throw std::domain_error("build_sng_comparator: n_bits must be >= 1");
  GateNetlist net;
  std::vector<NodeId> code(n_bits), rand(n_bits);
  for (auto& id : code) id = net.add_input();
  for (auto& id : rand) id = net.add_input();
  // Fold from the least significant bit up; the most significant comparison
  // dominates: res_k = MAJ3(code_k, !rand_k, res_{k-1}).
  NodeId res = net.add_gate(NodeKind::and2,
                            {code[n_bits - 1], net.add_gate(NodeKind::inv, {rand[n_bits - 1]})});
  for (int k = static_cast<int>(n_bits) - 2; k >= 0; --k) {
    const NodeId not_r = net.add_gate(NodeKind::inv, {rand[static_cast<std::size_t>(k)]});
    res = net.add_gate(NodeKind::maj3, {code[static_cast<std::size_t>(k)], not_r, res});
  }
  net.add_output(res);
  return net;
}

GateNetlist build_sng_bank(unsigned n_bits, std::size_t outputs) {
  GateNetlist net;
  for (std::size_t i = 0; i < outputs; ++i) {
    const GateNetlist one = build_sng_comparator(n_bits);
    // Stitch a fresh comparator into the bank netlist.
    std::vector<NodeId> remap(one.node_count());
    for (NodeId id = 0; id < one.node_count(); ++id) {
      const Node& n = one.node(id);
      switch (n.kind) {
        case NodeKind::input:
          remap[id] = net.add_input();
          break;
        case NodeKind::output:
          remap[id] = net.add_output(remap[n.fanins[0]]);
          break;
        default: {
          std::vector<NodeId> fanins;
          for (NodeId f : n.fanins) fanins.push_back(remap[f]);
          remap[id] = net.add_gate(n.kind, std::move(fanins));
          break;
        }
      }
    }
  }
  return net;
}

double fit_e_jj(const CellLibrary& lib, double target_energy, uint64_t cycles,
                std::size_t outputs, unsigned n_bits) {
  const PhasedNetlist p = elaborate(build_sng_bank(n_bits, outputs), lib);
  const uint64_t jj = lib.jj_total(p.net);
  return target_energy / (static_cast<double>(cycles) * static_cast<double>(jj));
}

// --- majority rewrite -------------------------------------------------------

namespace {

struct RewriteWork {
  std::vector<NodeKind> kind;
  std::vector<std::vector<NodeId>> fanins;
  std::vector<NodeId> resolved;  // union-find style replacement pointers
  NodeId const0 = static_cast<NodeId>(-1);
  NodeId const1 = static_cast<NodeId>(-1);

  NodeId find(NodeId id) {
    while (resolved[id] != id) {
      resolved[id] = resolved[resolved[id]];
      id = resolved[id];
    }
    return id;
  }

  void replace(NodeId id, NodeId with) { resolved[find(id)] = find(with); }

  NodeId fresh(NodeKind k, std::vector<NodeId> f) {
    kind.push_back(k);
    fanins.push_back(std::move(f));
    resolved.push_back(static_cast<NodeId>(kind.size() - 1));
    return static_cast<NodeId>(kind.size() - 1);
  }

  NodeId get_const(bool value) {
    NodeId& slot = value ? const1 : const0;
    if (slot == static_cast<NodeId>(-1)) {
      slot = fresh(value ? NodeKind::const1 : NodeKind::const0, {});
    }
    return slot;
  }

  bool is_const(NodeId id, bool value) {
    return kind[find(id)] == (value ? NodeKind::const1 : NodeKind::const0);
  }

  /// Complement of a signal when it is free (const or inverter); -1 otherwise.
  NodeId free_complement(NodeId id) {
    id = find(id);
    if (kind[id] == NodeKind::const0) return get_const(true);
    if (kind[id] == NodeKind::const1) return get_const(false);
    if (kind[id] == NodeKind::inv) return find(fanins[id][0]);
    return static_cast<NodeId>(-1);
  }
};

}  // namespace

GateNetlist majority_rewrite(const GateNetlist& net) {
  RewriteWork w;
  w.kind.reserve(net.node_count());
  for (NodeId id = 0; id < net.node_count(); ++id) {
    w.kind.push_back(net.node(id).kind);
    w.fanins.push_back(net.node(id).fanins);
    w.resolved.push_back(id);
  }

  // Normalize: every AND/OR becomes a constant-fed majority. The constant is
  // fetched before touching fanins: get_const can reallocate the vectors.
  for (NodeId id = 0; id < net.node_count(); ++id) {
    if (w.kind[id] == NodeKind::and2) {
      const NodeId c0 = w.get_const(false);
      w.kind[id] = NodeKind::maj3;
      w.fanins[id].push_back(c0);
    } else if (w.kind[id] == NodeKind::or2) {
      const NodeId c1 = w.get_const(true);
      w.kind[id] = NodeKind::maj3;
      w.fanins[id].push_back(c1);
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;

    // Fan-out over resolved ids, for the inverter-push profitability check.
    std::vector<uint32_t> uses(w.kind.size(), 0);
    for (NodeId id = 0; id < w.kind.size(); ++id) {
      if (w.find(id) != id) continue;
      for (NodeId f : w.fanins[id]) ++uses[w.find(f)];
    }

    for (NodeId id = 0; id < w.kind.size(); ++id) {
      if (w.find(id) != id) continue;

      if (w.kind[id] == NodeKind::buf) {
        w.replace(id, w.fanins[id][0]);
        changed = true;
        continue;
      }

      if (w.kind[id] == NodeKind::inv) {
        const NodeId u = w.find(w.fanins[id][0]);
        if (w.kind[u] == NodeKind::inv) {  // double negation
          w.replace(id, w.fanins[u][0]);
          changed = true;
          continue;
        }
        if (w.kind[u] == NodeKind::const0 || w.kind[u] == NodeKind::const1) {
          w.replace(id, w.get_const(w.kind[u] == NodeKind::const0));
          changed = true;
          continue;
        }
        // Self-duality: !MAJ(a,b,c) = MAJ(!a,!b,!c). Worth it only when every
        // complement is free and this inverter is the majority's only user.
        if (w.kind[u] == NodeKind::maj3 && u < uses.size() && uses[u] == 1) {
          NodeId ca = w.free_complement(w.fanins[u][0]);
          NodeId cb = w.free_complement(w.fanins[u][1]);
          NodeId cc = w.free_complement(w.fanins[u][2]);
          if (ca != static_cast<NodeId>(-1) && cb != static_cast<NodeId>(-1) &&
              cc != static_cast<NodeId>(-1)) {
            w.kind[id] = NodeKind::maj3;
            w.fanins[id] = {ca, cb, cc};
            changed = true;
            continue;
          }
        }
        continue;
      }

      if (w.kind[id] != NodeKind::maj3) continue;
      const NodeId a = w.find(w.fanins[id][0]);
      const NodeId b = w.find(w.fanins[id][1]);
      const NodeId c = w.find(w.fanins[id][2]);

      // Duplicate-input absorption: MAJ(x,x,y) = x.
      if (a == b || a == c) {
        w.replace(id, a);
        changed = true;
        continue;
      }
      if (b == c) {
        w.replace(id, b);
        changed = true;
        continue;
      }

      // Constant propagation.
      const auto const_of = [&](NodeId x) -> int {
        if (w.kind[x] == NodeKind::const0) return 0;
        if (w.kind[x] == NodeKind::const1) return 1;
        return -1;
      };
      const int ka = const_of(a), kb = const_of(b), kc = const_of(c);
      const int num_c0 = (ka == 0) + (kb == 0) + (kc == 0);
      const int num_c1 = (ka == 1) + (kb == 1) + (kc == 1);
      if (num_c0 >= 2) {
        w.replace(id, w.get_const(false));
        changed = true;
      } else if (num_c1 >= 2) {
        w.replace(id, w.get_const(true));
        changed = true;
      } else if (num_c0 == 1 && num_c1 == 1) {
        const NodeId other = ka == -1 ? a : (kb == -1 ? b : c);
        w.replace(id, other);
        changed = true;
      }
    }
  }

  // Rebuild reachable cone with dense ids, denormalizing constant-fed
  // majorities back to their AND/OR cells.
  GateNetlist out;
  std::vector<NodeId> remap(w.kind.size(), static_cast<NodeId>(-1));

  for (NodeId id = 0; id < net.node_count(); ++id) {
    if (net.node(id).kind == NodeKind::input) remap[id] = out.add_input();
  }

  std::vector<std::pair<NodeId, NodeId>> reg_patch;  // (new reg, old driver)

  auto build = [&](auto&& self, NodeId raw) -> NodeId {
    const NodeId id = w.find(raw);
    if (remap[id] != static_cast<NodeId>(-1)) return remap[id];
    const NodeKind k = w.kind[id];
    switch (k) {
      case NodeKind::const0:
      case NodeKind::const1:
        return remap[id] = out.add_const(k == NodeKind::const1);
      case NodeKind::reg: {
        const NodeId reg = out.add_reg();
        remap[id] = reg;  // break the loop before recursing into the driver
        reg_patch.emplace_back(reg, w.fanins[id][0]);
        return reg;
      }
      case NodeKind::maj3: {
        const NodeId a = w.find(w.fanins[id][0]);
        const NodeId b = w.find(w.fanins[id][1]);
        const NodeId c = w.find(w.fanins[id][2]);
        // Constant-fed majority is an AND/OR cell.
        for (int i = 0; i < 3; ++i) {
          const NodeId x = i == 0 ? a : (i == 1 ? b : c);
          const NodeId y = i == 0 ? b : a;
          const NodeId z = i == 2 ? b : c;
          if (w.kind[x] == NodeKind::const0) {
            return remap[id] = out.add_gate(NodeKind::and2, {self(self, y), self(self, z)});
          }
          if (w.kind[x] == NodeKind::const1) {
            return remap[id] = out.add_gate(NodeKind::or2, {self(self, y), self(self, z)});
          }
        }
        return remap[id] =
                   out.add_gate(NodeKind::maj3, {self(self, a), self(self, b), self(self, c)});
      }
      case NodeKind::input:
        return remap[id];  // filled above
      default: {
        std::vector<NodeId> fanins;
        for (NodeId f : w.fanins[id]) fanins.push_back(self(self, f));
        return remap[id] = out.add_gate(k, std::move(fanins));
      }
    }
  };

  for (NodeId id = 0; id < net.node_count(); ++id) {
    if (net.node(id).kind == NodeKind::output) {
      out.add_output(build(build, net.node(id).fanins[0]));
    }
  }
  // reg_patch can grow while loops behind registers are being rebuilt
  for (std::size_t i = 0; i < reg_patch.size(); ++i) {
    out.connect_reg(reg_patch[i].first, build(build, reg_patch[i].second));
  }
  out.check();
  return out;
}

// --- equivalence ------------------------------------------------------------

namespace {

std::vector<uint8_t> random_pattern(SplitMix64& g, std::size_t n) {
  std::vector<uint8_t> v(n);
  for (auto& x : v) x = static_cast<uint8_t>(g.next() & 1u);
  return v;
}

}  // namespace

EquivalenceResult equivalence_check(const GateNetlist& a, const GateNetlist& b,
                                    unsigned exhaustive_limit, uint64_t seed,
                                    std::size_t random_vectors, std::size_t cosim_cycles) {
  if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs()) {
    throw std::invalid_argument("equivalence_check: interface arity mismatch");
  }
  const std::size_t n = a.num_inputs();

  if (a.has_regs() || b.has_regs()) {
    CycleSimulator sa(a), sb(b);
    SplitMix64 g(derive_seed(seed, 0xc0'51'4dULL));
    const std::size_t restarts = 8;
    for (std::size_t r = 0; r < restarts; ++r) {
      sa.reset();
      sb.reset();
      for (std::size_t t = 0; t < cosim_cycles; ++t) {
        const auto pattern = random_pattern(g, n);
        if (sa.step(pattern) != sb.step(pattern)) {
          return {false, pattern};
        }
      }
    }
    return {true, {}};
  }

  if (n <= exhaustive_limit) {
    std::vector<uint8_t> pattern(n);
    for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
      for (std::size_t i = 0; i < n; ++i) pattern[i] = static_cast<uint8_t>((bits >> i) & 1u);
      if (eval_combinational(a, pattern) != eval_combinational(b, pattern)) {
        return {false, pattern};
      }
    }
    return {true, {}};
  }

  SplitMix64 g(derive_seed(seed, 0x65'71'63ULL));
  for (std::size_t v = 0; v < random_vectors; ++v) {
    const auto pattern = random_pattern(g, n);
    if (eval_combinational(a, pattern) != eval_combinational(b, pattern)) {
      return {false, pattern};
    }
  }
  return {true, {}};
}

}  // namespace scaqfp
