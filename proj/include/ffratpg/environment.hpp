#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ffratpg/circuit.hpp"
#include "ffratpg/podem.hpp"

namespace ffratpg {

/// Per-node state features. `flatten()` lays them out as:
///   [0..2]  logic value one-hot {0, 1, X} (good-machine projection)
///   [3]     fault-effect bit (value is D or DBAR)
///   [4..6]  objective value one-hot {0, 1, none}
///   [7..9]  cc0, cc1, co: log(1+v) / log(1+max over the circuit)
///   [10..19] gate kind one-hot in GateKind order
///   [20]    fanout count, min-max over the circuit
///   [21]    level, min-max over the circuit
struct NodeFeatures {
  std::array<double, 3> logic_value{};
  double fault_effect = 0;
  std::array<double, 3> objective_value{};
  double cc0 = 0;
  double cc1 = 0;
  double co = 0;
  std::array<double, kGateKindCount> gate_kind{};
  double fanout = 0;
  double depth = 0;

  static constexpr std::size_t kDim = 3 + 1 + 3 + 3 + kGateKindCount + 2;
  std::array<double, kDim> flatten() const;
  static std::array<std::string_view, kDim> names();
};

/// Circuit-wide scaling constants for the normalized features.
class FeatureScaler {
 public:
  explicit FeatureScaler(const CircuitContext& ctx);
  NodeFeatures features(GateId gate, LogicValue value, std::optional<bool> objective) const;

 private:
  const CircuitContext* ctx_;
  double log_max_cc0_ = 0, log_max_cc1_ = 0, log_max_co_ = 0;
  double min_fanout_ = 0, max_fanout_ = 0;
  double max_level_ = 0;
};

struct ObservedNode {
  GateId id;
  NodeFeatures features;
};

/// What the agent sees at one FFR hop: the region of the current objective and its fanins.
struct StateObservation {
  std::vector<ObservedNode> nodes;           // members then boundary fanins, ascending id each
  std::vector<std::pair<GateId, GateId>> edges;  // (driver, consumer) in signal direction
  std::vector<bool> action_mask;             // length K
  std::vector<GateId> action_targets;        // ascending id, at most K
  std::vector<bool> action_values;           // value each target must take
  Objective objective;
  GateId region_head = 0;
  bool truncated = false;                    // the region had more than K candidate fanins
};

struct EnvConfig {
  std::size_t action_arity = 16;
  std::uint64_t backtrack_limit = kDefaultBacktrackLimit;
  double lambda1 = 7.5;
  double lambda2 = 0.07;
};

inline constexpr double kHopReward = -0.1;
inline constexpr double kTerminalSuccessReward = 100.0;
inline constexpr double kTerminalAbortReward = -100.0;

/// Reward for reaching a PI with N = backtracks charged to it + visits (including this one).
double pi_reward(std::uint64_t n, double lambda1, double lambda2);

/// Terminal reward: +100 for DETECTED or UNTESTABLE, -100 for ABORTED.
double terminal_reward(AtpgStatus status);

/// Builds the observation for one hop. Targets are the subtree fanins of the objective; when
/// there are more than K, X-valued fanins are kept first (lowest ids), then the rest.
StateObservation build_observation(const CircuitContext& ctx, const FeatureScaler& scaler,
                                   const CircuitState& state, Objective objective,
                                   std::size_t action_arity);

enum class RewardKind { Hop, ReachPi, Success, Abort };

struct StepOutcome {
  double reward = 0;
  RewardKind kind = RewardKind::Hop;
  std::optional<StateObservation> observation;  // nullopt when done
  bool done = false;
  std::optional<AtpgStatus> status;
};

struct EpisodeMetrics {
  std::uint64_t backtracks = 0;
  std::uint64_t backtrace_steps = 0;
  std::uint64_t decisions = 0;
  std::uint64_t pi_assignments = 0;
  std::uint64_t agent_steps = 0;
  std::uint64_t truncations = 0;
  double total_reward = 0;
  std::optional<AtpgStatus> status;
  /// Indexed by position in `Netlist::primary_inputs()`.
  std::vector<std::uint64_t> pi_visits;
  std::vector<std::uint64_t> pi_backtracks;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// PODEM with FFR-level backtrace as an episodic MDP. Each `step` is one FFR hop; objectives that
/// already sit on a PI are assigned without asking the agent.
class AtpgEnvironment {
 public:
  AtpgEnvironment(std::shared_ptr<const CircuitContext> ctx, EnvConfig config = {});

  /// Starts a fresh episode. The returned outcome is `done` when no decision was ever needed.
  StepOutcome reset(const FaultSite& fault, std::uint64_t seed = 0);

  /// Throws ProtocolError (episode unchanged) for no active episode or a masked action.
  StepOutcome step(std::size_t action);

  bool active() const { return search_ && !search_->status(); }
  const StateObservation& observation() const { return observation_; }
  EpisodeMetrics metrics() const;
  AtpgResult result() const;
  const EnvConfig& config() const { return config_; }
  const CircuitContext& context() const { return *ctx_; }
  std::uint64_t seed() const { return seed_; }

 private:
  /// Runs PODEM forward to the next agent decision or to termination.
  std::optional<AtpgStatus> settle();
  StepOutcome finish(AtpgStatus status);

  std::shared_ptr<const CircuitContext> ctx_;
  EnvConfig config_;
  FeatureScaler scaler_;
  std::unique_ptr<PodemSearch> search_;
  Objective hop_objective_;
  std::uint64_t hop_steps_ = 0;
  StateObservation observation_;
  std::uint64_t agent_steps_ = 0;
  std::uint64_t truncations_ = 0;
  double total_reward_ = 0;
  std::uint64_t seed_ = 0;
};

}  // namespace ffratpg
