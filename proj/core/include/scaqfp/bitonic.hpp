#pragma once

#include <span>

#include "scaqfp/netlist.hpp"

namespace scaqfp {

enum class SortDirection { descending, ascending };

constexpr SortDirection opposite(SortDirection d) {
  return d == SortDirection::descending ? SortDirection::ascending : SortDirection::descending;
}

/// Appends one compare-exchange to `net`, rewriting the two wire ids in
/// place. Ordering convention is 1 > 0: for descending direction the first
/// wire receives OR (max) and the second AND (min).
void emit_compare_exchange(GateNetlist& net, NodeId& first, NodeId& second, SortDirection dir);

/// Appends a width-3 sorter: OR3 as a tree of OR2 for the maximum, AND3 for
/// the minimum, one MAJ3 for the median. Sorts every input pattern.
void emit_three_sorter(GateNetlist& net, NodeId& a, NodeId& b, NodeId& c, SortDirection dir);

/// Appends a bitonic merger over the wires. Input contract for either output
/// direction: a descending run followed by an ascending run, with any split
/// point (any sequence of the form 1...10...01...1); that is what the sorter
/// recursion produces.
///
/// Construction: cross compare-exchanges with stride m = the largest power of
/// two below the width, then recursion on the two parts; width-3 parts use
/// the three-input sorter, which is how odd widths get their first merging
/// stage. For powers of two this is the classic half-cleaner recursion.
void emit_bitonic_merger(GateNetlist& net, std::span<NodeId> wires, SortDirection dir);

/// Appends a bitonic sorter over the wires: top half sorted descending,
/// bottom half ascending, merged in `dir`. Width 3 is the three-input sorter.
void emit_bitonic_sorter(GateNetlist& net, std::span<NodeId> wires, SortDirection dir);

/// 2-input/2-output compare-exchange fragment as a standalone netlist.
GateNetlist build_comparator(SortDirection dir = SortDirection::descending);

/// 3-input/3-output sorter fragment as a standalone netlist.
GateNetlist build_three_sorter(SortDirection dir = SortDirection::descending);

/// n-input bitonic merger netlist (see emit_bitonic_merger for the contract).
GateNetlist build_bitonic_merger(std::size_t n, SortDirection dir = SortDirection::descending);

/// n-input binary bitonic sorter netlist; sorts every input pattern.
GateNetlist build_bitonic_sorter(std::size_t n, SortDirection dir = SortDirection::descending);

}  // namespace scaqfp
