#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ffratpg/logic.hpp"
#include "ffratpg/netlist.hpp"

namespace ffratpg {

/// Fanout-free region: a tree of single-fanout gates rooted at `head`.
struct Ffr {
  GateId head = 0;
  /// Ascending gate ids; includes the head.
  std::vector<GateId> members;
  /// Gates outside the region that drive a member, ascending gate id.
  std::vector<GateId> boundary_fanins;
  /// Longest member chain from a boundary fanin to the head, in gates.
  int depth = 0;
};

/// Unique internal path from a boundary fanin edge to the head (or to an objective member).
struct FfrPath {
  GateId fanin = 0;
  /// Members from the entry gate up to the end of the path, in signal order.
  std::vector<GateId> path_gates;
  /// Odd number of inverting gates on the path.
  bool parity = false;
};

struct FfrTarget {
  GateId fanin = 0;
  bool required_value = false;
  /// The fanin's current value is X or already equals the required value.
  bool feasible_now = false;
  /// Gate-level backtrace hops from the objective to the fanin along the chosen path.
  std::size_t gate_hops = 0;
};

/// Partition of a netlist into FFRs plus a gate -> region index.
class FfrPartition {
 public:
  FfrPartition() = default;

  std::span<const Ffr> regions() const { return regions_; }
  const Ffr& region(std::size_t index) const { return regions_[index]; }
  std::size_t region_of(GateId gate) const { return region_of_[gate]; }
  const Ffr& region_containing(GateId gate) const { return regions_[region_of_[gate]]; }
  bool is_head(GateId gate) const { return regions_[region_of_[gate]].head == gate; }

  /// Mean depth over regions that contain at least one non-INPUT gate.
  double average_depth() const;
  int max_depth() const;

 private:
  friend FfrPartition partition(const Netlist& netlist);
  std::vector<Ffr> regions_;
  std::vector<std::size_t> region_of_;
};

/// Heads are every gate with fanout count != 1, every PO and every PI.
FfrPartition partition(const Netlist& netlist);

/// Desired value on a gate's input given the desired output (PODEM backtrace mapping).
constexpr bool backtrace_input_value(GateKind kind, bool desired_output) {
  return desired_output != is_inverting(kind);
}

/// Boundary fanins of `ffr` that lie in the member subtree below `objective_gate`, ascending id,
/// each with the value required to steer the objective along its unique internal path. When a
/// fanin enters the subtree on several edges, the shortest path (then lowest entry gate id) wins.
/// Throws Error when the objective gate is not a member.
std::vector<FfrTarget> ffr_backtrace_targets(const Netlist& netlist, const FfrPartition& ffrs,
                                             GateId objective_gate, bool objective_value,
                                             std::span<const LogicValue> values);

/// Every internal path from `fanin` to `objective_gate` inside the region (one per entry edge).
std::vector<FfrPath> ffr_paths(const Netlist& netlist, const FfrPartition& ffrs, GateId fanin,
                               GateId objective_gate);

/// CSV `ffr_head,member_count,depth,fanin_count` followed by a `# average_depth=` summary line.
void write_partition_csv(const Netlist& netlist, const FfrPartition& ffrs, std::ostream& out);

}  // namespace ffratpg
