#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffratpg/circuit.hpp"
#include "ffratpg/fault.hpp"
#include "ffratpg/simulation.hpp"

namespace ffratpg {

enum class AtpgStatus { Detected, Untestable, Aborted };

std::string_view to_string(AtpgStatus status);
std::optional<AtpgStatus> status_from_string(std::string_view text);

inline constexpr std::uint64_t kUnlimitedBacktracks = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint64_t kDefaultBacktrackLimit = 100;

/// A (gate, desired value) pair traced toward the primary inputs.
struct Objective {
  GateId gate = 0;
  bool value = false;
  friend bool operator==(const Objective&, const Objective&) = default;
};

/// Outcome of one backtrace: the PI to assign and how many backtrace steps it took.
struct PiChoice {
  GateId pi = 0;
  bool value = false;
  std::uint64_t steps = 0;
};

struct AtpgResult {
  AtpgStatus status = AtpgStatus::Untestable;
  /// Full PI assignment when detected (unassigned inputs filled with 0).
  std::optional<Pattern> pattern;
  std::uint64_t backtracks = 0;
  std::uint64_t backtrace_steps = 0;
  /// Decision sequence length: one decision per backtrace hop (gate-level: per gate, FFR-level:
  /// per region), and one for an objective that already sits on a PI.
  std::uint64_t decisions = 0;
  /// PIs assigned by backtrace (flips on backtrack not included).
  std::uint64_t pi_assignments = 0;
  /// Indexed by position in `Netlist::primary_inputs()`.
  std::vector<std::uint64_t> pi_visit_counts;
  std::vector<std::uint64_t> pi_backtrack_counts;
};

/// Chooses how an objective is traced back to an unassigned PI.
class BacktracePolicy {
 public:
  virtual ~BacktracePolicy() = default;
  virtual std::string_view name() const = 0;
  /// Must return a PI whose current value is X.
  virtual PiChoice backtrace(const CircuitContext& ctx, const CircuitState& state,
                             Objective objective) = 0;
};

using PolicyFactory = std::function<std::unique_ptr<BacktracePolicy>()>;

/// Gate by gate: at each gate take the X fanin with the smallest level, ties to the lower id.
/// One step per gate hop; an objective already on a PI costs one step.
class GateLevelHeuristicPolicy final : public BacktracePolicy {
 public:
  std::string_view name() const override { return "gate"; }
  PiChoice backtrace(const CircuitContext& ctx, const CircuitState& state,
                     Objective objective) override;
};

/// Candidate fanins for an FFR-level hop: X-valued targets in the objective's subtree.
std::vector<FfrTarget> ffr_hop_candidates(const CircuitContext& ctx, const CircuitState& state,
                                          Objective objective);

/// Index of the minimum-level X-valued candidate, ties to the lower gate id.
std::size_t min_level_candidate(const Netlist& netlist, std::span<const FfrTarget> candidates);

/// FFR by FFR: each hop jumps from the objective straight to one boundary fanin of its region.
/// Subclasses only pick the fanin. One step per hop; an objective already on a PI costs one step.
class FfrBacktracePolicy : public BacktracePolicy {
 public:
  PiChoice backtrace(const CircuitContext& ctx, const CircuitState& state,
                     Objective objective) final;

 protected:
  /// Index into `candidates` (all X-valued, ascending id).
  virtual std::size_t choose(const CircuitContext& ctx, const CircuitState& state,
                             Objective objective, std::span<const FfrTarget> candidates) = 0;
};

class FfrLevelHeuristicPolicy final : public FfrBacktracePolicy {
 public:
  std::string_view name() const override { return "ffr"; }

 protected:
  std::size_t choose(const CircuitContext& ctx, const CircuitState& state, Objective objective,
                     std::span<const FfrTarget> candidates) override;
};

std::unique_ptr<BacktracePolicy> gate_level_heuristic_policy();
std::unique_ptr<BacktracePolicy> ffr_level_heuristic_policy();

/// Observes backtracks as they happen (used by the RL environment for per-PI charging).
struct SearchCounters {
  std::uint64_t backtracks = 0;
  std::uint64_t backtrace_steps = 0;
  std::uint64_t decisions = 0;
  std::uint64_t pi_assignments = 0;
  /// Indexed by gate id.
  std::vector<std::uint64_t> pi_visits;
  std::vector<std::uint64_t> pi_backtracks;
  /// PI of the most recent backtrace decision; backtracks are charged to it.
  std::optional<GateId> last_decision;
};

/// PODEM as a resumable state machine: `advance()` runs the control loop up to the next
/// backtrace (or termination), `decide()` applies the backtrace result.
class PodemSearch {
 public:
  PodemSearch(const CircuitContext& ctx, FaultSite fault,
              std::uint64_t backtrack_limit = kDefaultBacktrackLimit);

  /// Returns the terminal status, or nullopt when `objective()` awaits a backtrace.
  std::optional<AtpgStatus> advance();

  Objective objective() const { return objective_; }
  void decide(GateId pi, bool value, std::uint64_t backtrace_steps);

  const CircuitState& state() const { return state_; }
  const SearchCounters& counters() const { return counters_; }
  std::optional<AtpgStatus> status() const { return status_; }
  const CircuitContext& context() const { return *ctx_; }

  AtpgResult result() const;

 private:
  bool failed();
  Objective make_objective() const;
  bool backtrack();

  const CircuitContext* ctx_;
  CircuitState state_;
  std::uint64_t limit_;
  SearchCounters counters_;
  Objective objective_;
  std::optional<AtpgStatus> status_;
  std::vector<GateId> live_frontier_;
  std::vector<std::uint8_t> x_path_;
};

/// Runs PODEM to completion for one fault. Throws Error on an invalid fault site.
AtpgResult generate_test(const CircuitContext& ctx, const FaultSite& fault,
                         BacktracePolicy& policy,
                         std::uint64_t backtrack_limit = kDefaultBacktrackLimit);

struct FaultRecord {
  FaultSite fault;
  AtpgResult result;
};

struct RunTotals {
  std::size_t faults = 0;
  std::size_t detected = 0;
  std::size_t untestable = 0;
  std::size_t aborted = 0;
  std::uint64_t backtracks = 0;
  std::uint64_t backtrace_steps = 0;
  std::uint64_t decisions = 0;
  std::uint64_t pi_assignments = 0;

  std::size_t undetected() const { return untestable + aborted; }
  /// Undetected percentage of all faults (0 for an empty list).
  double ufp() const;
  friend bool operator==(const RunTotals&, const RunTotals&) = default;
};

struct FaultListRun {
  std::vector<FaultRecord> records;  // same order as the input fault list
  RunTotals totals;
};

/// Processes faults independently on up to `parallelism` threads; each worker owns a policy
/// from `factory`. Results are reduced in input order, so totals are deterministic.
FaultListRun run_fault_list(const CircuitContext& ctx, const std::vector<FaultSite>& faults,
                            const PolicyFactory& factory, std::uint64_t backtrack_limit,
                            unsigned parallelism = 1);

}  // namespace ffratpg
