#pragma once

#include <span>
#include <vector>

#include "ffratpg/fault.hpp"
#include "ffratpg/logic.hpp"
#include "ffratpg/netlist.hpp"

namespace ffratpg {

/// One full PI assignment, indexed by position in `Netlist::primary_inputs()`.
using Pattern = std::vector<LogicValue>;

struct PiDecision {
  GateId pi;
  bool value;
  bool alternative_tried;
  friend bool operator==(const PiDecision&, const PiDecision&) = default;
};

/// PODEM search state for a single fault: five-valued values, the D-frontier, the decision stack.
/// Single owner; not shared across threads.
class CircuitState {
 public:
  CircuitState(const Netlist& netlist, FaultSite fault);

  std::span<const LogicValue> values() const { return values_; }
  LogicValue value(GateId id) const { return values_[id]; }
  /// Ascending gate ids.
  std::span<const GateId> d_frontier() const { return d_frontier_; }
  const FaultSite& fault() const { return fault_; }
  LogicValue pi_assignment(GateId pi) const { return assigned_[pi]; }

  std::vector<PiDecision>& decisions() { return decisions_; }
  const std::vector<PiDecision>& decisions() const { return decisions_; }

  /// Value seen by pin `k` of `gate`, including an injected input-pin fault.
  LogicValue pin_value(const Netlist& netlist, GateId gate, std::size_t k) const;

  /// Current PI assignment as a pattern (X where unassigned).
  Pattern pattern(const Netlist& netlist) const;

  friend bool operator==(const CircuitState&, const CircuitState&) = default;

 private:
  friend void imply(const Netlist&, CircuitState&, GateId, LogicValue);
  friend void resimulate(const Netlist&, CircuitState&);
  friend LogicValue evaluate_gate(const Netlist&, const CircuitState&, GateId);
  friend void refresh_d_frontier(const Netlist&, CircuitState&);

  FaultSite fault_;
  std::vector<LogicValue> values_;
  std::vector<LogicValue> assigned_;
  std::vector<GateId> d_frontier_;
  std::vector<PiDecision> decisions_;
  std::vector<std::vector<GateId>> buckets_;
  std::vector<std::uint8_t> queued_;
};

/// Output of `gate` from the current fanin values, with fault injection at the site.
LogicValue evaluate_gate(const Netlist& netlist, const CircuitState& state, GateId gate);

/// Assigns `value` (ZERO, ONE, or X to unassign) to a PI and propagates forward, event-driven.
void imply(const Netlist& netlist, CircuitState& state, GateId pi, LogicValue value);

/// Full topological re-sweep from the PI assignments. Agrees with the event-driven path.
void resimulate(const Netlist& netlist, CircuitState& state);

/// Recomputes the D-frontier from the current values.
void refresh_d_frontier(const Netlist& netlist, CircuitState& state);

bool fault_detected(const Netlist& netlist, const CircuitState& state);

/// Two-copy (good/faulty) Boolean simulation. True iff some PO differs.
/// Throws Error when the pattern is incomplete.
bool fault_simulate(const Netlist& netlist, const Pattern& pattern, const FaultSite& fault);

/// Good-machine Boolean simulation of every gate.
std::vector<bool> simulate_good(const Netlist& netlist, const Pattern& pattern);

}  // namespace ffratpg
