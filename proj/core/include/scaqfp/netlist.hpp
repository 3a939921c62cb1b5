#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlohmann/json_fwd.hpp"

namespace scaqfp {

using NodeId = uint32_t;

enum class NodeKind : uint8_t {
  input,
  output,
  and2,
  or2,
  maj3,
  inv,  // NOT
  buf,
  const0,
  const1,
  split,
  reg,
};

std::string_view node_kind_name(NodeKind kind);
NodeKind node_kind_from_name(std::string_view name);

/// Fan-in count a node of this kind must have.
unsigned node_arity(NodeKind kind);

/// True for cells that occupy a clock phase (everything except the
/// input/output attachment points and the self-timed constants).
bool occupies_phase(NodeKind kind);

struct Node {
  NodeKind kind;
  std::vector<NodeId> fanins;
};

/// Directed gate graph over AND2/OR2/MAJ3/NOT/BUF/CONST/SPLIT plus REG
/// feedback registers. Ids are dense; the combinational core must be acyclic
/// (cycles may pass only through REG nodes). Netlists are built once and then
/// treated as immutable values; evaluation is pure.
class GateNetlist {
public:
  NodeId add_input();
  NodeId add_const(bool value);
  NodeId add_gate(NodeKind kind, std::vector<NodeId> fanins);
  NodeId add_output(NodeId driver);

  /// Adds a feedback register whose fan-in is patched later with connect_reg
  /// (the register input usually does not exist yet while building a loop).
  NodeId add_reg();
  void connect_reg(NodeId reg, NodeId driver);

  /// Rewires one fan-in edge; for elaboration passes. check() afterwards.
  void set_fanin(NodeId node, unsigned pos, NodeId driver);

  /// Builds a netlist from complete node data (fan-ins may point forward, as
  /// they do after elaboration passes). Validates arities and structure.
  static GateNetlist from_parts(std::vector<Node> nodes, std::vector<NodeId> inputs,
                                std::vector<NodeId> outputs);

  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  const std::vector<NodeId>& inputs() const { return inputs_; }
  const std::vector<NodeId>& outputs() const { return outputs_; }
  std::size_t num_inputs() const { return inputs_.size(); }
  std::size_t num_outputs() const { return outputs_.size(); }

  bool has_regs() const;

  /// Sinks per node (OUTPUT nodes included as sinks).
  std::vector<std::vector<NodeId>> fanouts() const;

  /// Topological order of the combinational core; REG nodes act as sources
  /// for their consumers. Throws std::runtime_error on a combinational cycle.
  std::vector<NodeId> topological_order() const;

  /// Structural sanity: arities, dangling ids, connected REGs, acyclic core.
  void check() const;

private:
  NodeId add_node(NodeKind kind, std::vector<NodeId> fanins);

  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
  std::vector<NodeId> outputs_;
};

struct NetStats {
  std::map<NodeKind, std::size_t> gate_count;
  /// Longest input-to-output path counted in phase-occupying cells.
  std::size_t levels{0};

  std::size_t count(NodeKind kind) const {
    auto it = gate_count.find(kind);
    return it == gate_count.end() ? 0 : it->second;
  }
};

NetStats net_stats(const GateNetlist& net);

/// Evaluates an acyclic, REG-free netlist on one input vector.
std::vector<uint8_t> eval_combinational(const GateNetlist& net, const std::vector<uint8_t>& inputs);

/// Cycle-synchronous simulator for netlists with feedback registers.
/// Registers power up at 0; step() consumes one input column and produces
/// one output column, then latches the register fan-ins.
class CycleSimulator {
public:
  explicit CycleSimulator(const GateNetlist& net);

  void reset();
  std::vector<uint8_t> step(const std::vector<uint8_t>& inputs);

  /// Current register contents in creation order.
  std::vector<uint8_t> reg_state() const;

private:
  const GateNetlist& net_;
  std::vector<NodeId> order_;
  std::vector<NodeId> regs_;
  std::vector<uint8_t> values_;
  std::vector<uint8_t> state_;
};

nlohmann::json netlist_to_json(const GateNetlist& net,
                               const std::vector<uint32_t>* phases = nullptr);
GateNetlist netlist_from_json(const nlohmann::json& j,
                              std::vector<uint32_t>* phases = nullptr);

}  // namespace scaqfp
