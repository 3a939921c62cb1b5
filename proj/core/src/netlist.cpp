#include "scaqfp/netlist.hpp"

#include <algorithm>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace scaqfp {

namespace {

constexpr NodeId kUnconnected = static_cast<NodeId>(-1);

struct KindInfo {
  NodeKind kind;
  std::string_view name;
  unsigned arity;
};

constexpr KindInfo kKinds[] = {
    {NodeKind::input, "INPUT", 0},  {NodeKind::output, "OUTPUT", 1}, {NodeKind::and2, "AND2", 2},
    {NodeKind::or2, "OR2", 2},      {NodeKind::maj3, "MAJ3", 3},     {NodeKind::inv, "NOT", 1},
    {NodeKind::buf, "BUF", 1},      {NodeKind::const0, "CONST0", 0}, {NodeKind::const1, "CONST1", 0},
    {NodeKind::split, "SPLIT", 1},  {NodeKind::reg, "REG", 1},
};

}  // namespace

std::string_view node_kind_name(NodeKind kind) {
  for (const auto& info : kKinds) {
    if (info.kind == kind) return info.name;
  }
  throw std::invalid_argument("node_kind_name: unknown kind");
}

NodeKind node_kind_from_name(std::string_view name) {
  for (const auto& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  throw std::invalid_argument("node_kind_from_name: unknown kind '" + std::string(name) + "'");
}

unsigned node_arity(NodeKind kind) {
  for (const auto& info : kKinds) {
    if (info.kind == kind) return info.arity;
  }
  throw std::invalid_argument("node_arity: unknown kind");
}

bool occupies_phase(NodeKind kind) {
  switch (kind) {
    case NodeKind::input:
    case NodeKind::output:
    case NodeKind::const0:
    case NodeKind::const1:
      return false;
    default:
      return true;
  }
}

NodeId GateNetlist::add_node(NodeKind kind, std::vector<NodeId> fanins) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{kind, std::move(fanins)});
  return id;
}

NodeId GateNetlist::add_input() {
  const NodeId id = add_node(NodeKind::input, {});
  inputs_.push_back(id);
  return id;
}

NodeId GateNetlist::add_const(bool value) {
  return add_node(value ? NodeKind::const1 : NodeKind::const0, {});
}

NodeId GateNetlist::add_gate(NodeKind kind, std::vector<NodeId> fanins) {
  if (kind == NodeKind::input || kind == NodeKind::output || kind == NodeKind::reg) {
    throw std::invalid_argument("add_gate: use the dedicated add_* method");
  }
  if (fanins.size() != node_arity(kind)) {
    throw std::invalid_argument("add_gate: arity mismatch for " + std::string(node_kind_name(kind)));
  }
  for (NodeId f : fanins) {
    if (f >= nodes_.size()) throw std::invalid_argument("add_gate: dangling fan-in id");
  }
  return add_node(kind, std::move(fanins));
}

NodeId GateNetlist::add_output(NodeId driver) {
  if (driver >= nodes_.size()) throw std::invalid_argument("add_output: dangling driver id");
  const NodeId id = add_node(NodeKind::output, {driver});
  outputs_.push_back(id);
  return id;
}

NodeId GateNetlist::add_reg() { return add_node(NodeKind::reg, {kUnconnected}); }

void GateNetlist::connect_reg(NodeId reg, NodeId driver) {
  if (reg >= nodes_.size() || nodes_[reg].kind != NodeKind::reg) {
    throw std::invalid_argument("connect_reg: not a REG node");
  }
  if (driver >= nodes_.size()) throw std::invalid_argument("connect_reg: dangling driver id");
  nodes_[reg].fanins[0] = driver;
}

void GateNetlist::set_fanin(NodeId node, unsigned pos, NodeId driver) {
  if (node >= nodes_.size() || pos >= nodes_[node].fanins.size() || driver >= nodes_.size()) {
    throw std::invalid_argument("set_fanin: out of range");
  }
  nodes_[node].fanins[pos] = driver;
}

GateNetlist GateNetlist::from_parts(std::vector<Node> nodes, std::vector<NodeId> inputs,
                                    std::vector<NodeId> outputs) {
  GateNetlist net;
  net.nodes_ = std::move(nodes);
  net.inputs_ = std::move(inputs);
  net.outputs_ = std::move(outputs);
  for (NodeId id : net.inputs_) {
    if (id >= net.nodes_.size() || net.nodes_[id].kind != NodeKind::input) {
      throw std::invalid_argument("from_parts: inputs list does not match INPUT nodes");
    }
  }
  for (NodeId id : net.outputs_) {
    if (id >= net.nodes_.size() || net.nodes_[id].kind != NodeKind::output) {
      throw std::invalid_argument("from_parts: outputs list does not match OUTPUT nodes");
    }
  }
  std::size_t input_count = 0, output_count = 0;
  for (const Node& n : net.nodes_) {
    input_count += n.kind == NodeKind::input ? 1 : 0;
    output_count += n.kind == NodeKind::output ? 1 : 0;
  }
  if (input_count != net.inputs_.size() || output_count != net.outputs_.size()) {
    throw std::invalid_argument("from_parts: interface lists are incomplete");
  }
  net.check();
  return net;
}

bool GateNetlist::has_regs() const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.kind == NodeKind::reg; });
}

std::vector<std::vector<NodeId>> GateNetlist::fanouts() const {
  std::vector<std::vector<NodeId>> result(nodes_.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    for (NodeId f : nodes_[id].fanins) {
      if (f != kUnconnected) result[f].push_back(id);
    }
  }
  return result;
}

std::vector<NodeId> GateNetlist::topological_order() const {
  // Kahn's algorithm over combinational edges; REG fan-ins do not count as
  // dependencies (the register supplies last cycle's value).
  std::vector<uint32_t> pending(nodes_.size(), 0);
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].kind == NodeKind::reg) continue;
    for (NodeId f : nodes_[id].fanins) {
      if (f == kUnconnected) throw std::runtime_error("topological_order: unconnected fan-in");
      ++pending[id];
    }
  }
  std::vector<NodeId> ready;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (pending[id] == 0) ready.push_back(id);
  }
  const auto fo = fanouts();
  std::vector<NodeId> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    const NodeId id = ready.back();
    ready.pop_back();
    order.push_back(id);
    for (NodeId sink : fo[id]) {
      if (nodes_[sink].kind == NodeKind::reg) continue;
      if (--pending[sink] == 0) ready.push_back(sink);
    }
  }
  if (order.size() != nodes_.size()) {
    throw std::runtime_error("topological_order: combinational cycle through a non-REG node");
  }
  return order;
}

void GateNetlist::check() const {
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.fanins.size() != node_arity(n.kind)) {
      throw std::runtime_error("check: arity violation at node " + std::to_string(id));
    }
    for (NodeId f : n.fanins) {
      if (f == kUnconnected) {
        throw std::runtime_error("check: unconnected fan-in at node " + std::to_string(id));
      }
      if (f >= nodes_.size()) {
        throw std::runtime_error("check: dangling fan-in at node " + std::to_string(id));
      }
    }
  }
  (void)topological_order();
}

NetStats net_stats(const GateNetlist& net) {
  NetStats stats;
  for (const Node& n : net.nodes()) {
    if (n.kind == NodeKind::input || n.kind == NodeKind::output) continue;
    ++stats.gate_count[n.kind];
  }
  // Longest path over combinational edges, counting phase-occupying cells;
  // REG breaks the path (it belongs to the next pipeline iteration).
  std::vector<std::size_t> level(net.node_count(), 0);
  for (NodeId id : net.topological_order()) {
    const Node& n = net.node(id);
    if (n.kind == NodeKind::reg) {
      level[id] = 0;
      continue;
    }
    std::size_t deepest = 0;
    for (NodeId f : n.fanins) deepest = std::max(deepest, level[f]);
    const bool counts = occupies_phase(n.kind) && n.kind != NodeKind::reg;
    level[id] = deepest + (counts ? 1 : 0);
    stats.levels = std::max(stats.levels, level[id]);
  }
  return stats;
}

namespace {

uint8_t eval_node(const Node& n, const std::vector<uint8_t>& v) {
  const auto& f = n.fanins;
  switch (n.kind) {
    case NodeKind::and2:
      return v[f[0]] & v[f[1]];
    case NodeKind::or2:
      return v[f[0]] | v[f[1]];
    case NodeKind::maj3:
      return static_cast<uint8_t>((v[f[0]] + v[f[1]] + v[f[2]]) >= 2);
    case NodeKind::inv:
      return v[f[0]] ^ 1u;
    case NodeKind::buf:
    case NodeKind::split:
    case NodeKind::output:
      return v[f[0]];
    case NodeKind::const0:
      return 0;
    case NodeKind::const1:
      return 1;
    default:
      throw std::logic_error("eval_node: unexpected kind");
  }
}

}  // namespace

std::vector<uint8_t> eval_combinational(const GateNetlist& net, const std::vector<uint8_t>& inputs) {
  if (net.has_regs()) {
    throw std::runtime_error("eval_combinational: netlist has REG nodes, use CycleSimulator");
  }
  if (inputs.size() != net.num_inputs()) {
    throw std::invalid_argument("eval_combinational: input count mismatch");
  }
  std::vector<uint8_t> values(net.node_count(), 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) values[net.inputs()[i]] = inputs[i] ? 1 : 0;
  for (NodeId id : net.topological_order()) {
    const Node& n = net.node(id);
    if (n.kind == NodeKind::input) continue;
    values[id] = eval_node(n, values);
  }
  std::vector<uint8_t> out(net.num_outputs());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values[net.outputs()[i]];
  return out;
}

CycleSimulator::CycleSimulator(const GateNetlist& net) : net_(net) {
  net.check();
  order_ = net.topological_order();
  for (NodeId id = 0; id < net.node_count(); ++id) {
    if (net.node(id).kind == NodeKind::reg) regs_.push_back(id);
  }
  values_.assign(net.node_count(), 0);
  state_.assign(regs_.size(), 0);
}

void CycleSimulator::reset() {
  std::fill(values_.begin(), values_.end(), 0);
  std::fill(state_.begin(), state_.end(), 0);
}

std::vector<uint8_t> CycleSimulator::step(const std::vector<uint8_t>& inputs) {
  if (inputs.size() != net_.num_inputs()) {
    throw std::invalid_argument("CycleSimulator::step: input count mismatch");
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) values_[net_.inputs()[i]] = inputs[i] ? 1 : 0;
  for (std::size_t i = 0; i < regs_.size(); ++i) values_[regs_[i]] = state_[i];
  for (NodeId id : order_) {
    const Node& n = net_.node(id);
    if (n.kind == NodeKind::input || n.kind == NodeKind::reg) continue;
    values_[id] = eval_node(n, values_);
  }
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    state_[i] = values_[net_.node(regs_[i]).fanins[0]];
  }
  std::vector<uint8_t> out(net_.num_outputs());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[net_.outputs()[i]];
  return out;
}

std::vector<uint8_t> CycleSimulator::reg_state() const { return state_; }

nlohmann::json netlist_to_json(const GateNetlist& net, const std::vector<uint32_t>* phases) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const Node& n : net.nodes()) {
    nlohmann::json node;
    node["kind"] = std::string(node_kind_name(n.kind));
    node["fanins"] = n.fanins;
    j["nodes"].push_back(std::move(node));
  }
  j["inputs"] = net.inputs();
  j["outputs"] = net.outputs();
  if (phases != nullptr) j["phases"] = *phases;
  return j;
}

GateNetlist netlist_from_json(const nlohmann::json& j, std::vector<uint32_t>* phases) {
  std::vector<Node> nodes;
  for (const auto& node : j.at("nodes")) {
    nodes.push_back(Node{node_kind_from_name(node.at("kind").get<std::string>()),
                         node.at("fanins").get<std::vector<NodeId>>()});
  }
  GateNetlist net = GateNetlist::from_parts(std::move(nodes),
                                            j.at("inputs").get<std::vector<NodeId>>(),
                                            j.at("outputs").get<std::vector<NodeId>>());
  if (phases != nullptr && j.contains("phases")) {
    *phases = j.at("phases").get<std::vector<uint32_t>>();
  }
  return net;
}

}  // namespace scaqfp
