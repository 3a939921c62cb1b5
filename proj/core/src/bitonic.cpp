#include "scaqfp/bitonic.hpp"

#include <bit>
#include <stdexcept>

namespace scaqfp {

void emit_compare_exchange(GateNetlist& net, NodeId& first, NodeId& second, SortDirection dir) {
  const NodeId mx = net.add_gate(NodeKind::or2, {first, second});
  const NodeId mn = net.add_gate(NodeKind::and2, {first, second});
  if (dir == SortDirection::descending) {
    first = mx;
    second = mn;
  } else {
    first = mn;
    second = mx;
  }
}

void emit_three_sorter(GateNetlist& net, NodeId& a, NodeId& b, NodeId& c, SortDirection dir) {
  const NodeId mx = net.add_gate(NodeKind::or2, {net.add_gate(NodeKind::or2, {a, b}), c});
  const NodeId md = net.add_gate(NodeKind::maj3, {a, b, c});
  const NodeId mn = net.add_gate(NodeKind::and2, {net.add_gate(NodeKind::and2, {a, b}), c});
  if (dir == SortDirection::descending) {
    a = mx;
    b = md;
    c = mn;
  } else {
    a = mn;
    b = md;
    c = mx;
  }
}

void emit_bitonic_merger(GateNetlist& net, std::span<NodeId> wires, SortDirection dir) {
  const std::size_t n = wires.size();
  if (n < 2) return;
  if (n == 2) {
    emit_compare_exchange(net, wires[0], wires[1], dir);
    return;
  }
  if (n == 3) {
    emit_three_sorter(net, wires[0], wires[1], wires[2], dir);
    return;
  }
  const std::size_t m = std::bit_floor(n - 1);  // n/2 for powers of two
  for (std::size_t i = 0; i < n - m; ++i) {
    emit_compare_exchange(net, wires[i], wires[i + m], dir);
  }
  // The power-of-two part lands on the min side of the cross stage and can be
  // any bitonic shape; the short part keeps the input's orientation.
  if (dir == SortDirection::descending) {
    emit_bitonic_merger(net, wires.first(n - m), dir);
    emit_bitonic_merger(net, wires.subspan(n - m), dir);
  } else {
    emit_bitonic_merger(net, wires.first(m), dir);
    emit_bitonic_merger(net, wires.subspan(m), dir);
  }
}

void emit_bitonic_sorter(GateNetlist& net, std::span<NodeId> wires, SortDirection dir) {
  const std::size_t n = wires.size();
  if (n < 2) return;
  if (n == 2) {
    emit_compare_exchange(net, wires[0], wires[1], dir);
    return;
  }
  if (n == 3) {
    emit_three_sorter(net, wires[0], wires[1], wires[2], dir);
    return;
  }
  const std::size_t top = (n + 1) / 2;
  emit_bitonic_sorter(net, wires.first(top), SortDirection::descending);
  emit_bitonic_sorter(net, wires.subspan(top), SortDirection::ascending);
  emit_bitonic_merger(net, wires, dir);
}

namespace {

GateNetlist build_with(std::size_t n, SortDirection dir,
                       void (*emit)(GateNetlist&, std::span<NodeId>, SortDirection)) {
  if (n < 1) throw std::domain_error("bitonic: width must be >= 1");
  GateNetlist net;
  std::vector<NodeId> wires(n);
  for (auto& w : wires) w = net.add_input();
  emit(net, wires, dir);
  for (NodeId w : wires) net.add_output(w);
  return net;
}

}  // namespace

GateNetlist build_comparator(SortDirection dir) { return build_with(2, dir, emit_bitonic_sorter); }

GateNetlist build_three_sorter(SortDirection dir) {
  return build_with(3, dir, emit_bitonic_sorter);
}

GateNetlist build_bitonic_merger(std::size_t n, SortDirection dir) {
  return build_with(n, dir, emit_bitonic_merger);
}

GateNetlist build_bitonic_sorter(std::size_t n, SortDirection dir) {
  return build_with(n, dir, emit_bitonic_sorter);
}

}  // namespace scaqfp
