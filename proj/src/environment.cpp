#include "ffratpg/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ffratpg {

std::array<double, NodeFeatures::kDim> NodeFeatures::flatten() const {
  std::array<double, kDim> out{};
  std::size_t i = 0;
  for (double v : logic_value) out[i++] = v;
  out[i++] = fault_effect;
  for (double v : objective_value) out[i++] = v;
  out[i++] = cc0;
  out[i++] = cc1;
  out[i++] = co;
  for (double v : gate_kind) out[i++] = v;
  out[i++] = fanout;
  out[i++] = depth;
  return out;
}

std::array<std::string_view, NodeFeatures::kDim> NodeFeatures::names() {
  return {"val0",     "val1",      "valx",     "fault",    "obj0",     "obj1",
          "objnone",  "cc0",       "cc1",      "co",       "kind_and", "kind_nand",
          "kind_or",  "kind_nor",  "kind_not", "kind_buf", "kind_xor", "kind_xnor",
          "kind_input", "kind_dff", "fanout",  "depth"};
}

namespace {

double log_scale(std::int64_t v, double log_max) {
  if (log_max <= 0) return 0.0;
  return std::clamp(std::log1p(static_cast<double>(v)) / log_max, 0.0, 1.0);
}

}  // namespace

FeatureScaler::FeatureScaler(const CircuitContext& ctx) : ctx_(&ctx) {
  std::int64_t m0 = 0, m1 = 0, mo = 0;
  for (const ScoapValues& s : ctx.scoap) {
    // Saturated entries (unreachable values, dead logic) would flatten everything else.
    if (s.cc0 < kScoapSaturation) m0 = std::max(m0, s.cc0);
    if (s.cc1 < kScoapSaturation) m1 = std::max(m1, s.cc1);
    if (s.co < kScoapSaturation) mo = std::max(mo, s.co);
  }
  log_max_cc0_ = std::log1p(static_cast<double>(m0));
  log_max_cc1_ = std::log1p(static_cast<double>(m1));
  log_max_co_ = std::log1p(static_cast<double>(mo));
  if (ctx.netlist.size() > 0) {
    min_fanout_ = max_fanout_ = static_cast<double>(ctx.netlist.gate(0).fanouts.size());
  }
  for (const Gate& g : ctx.netlist.gates()) {
    min_fanout_ = std::min(min_fanout_, static_cast<double>(g.fanouts.size()));
    max_fanout_ = std::max(max_fanout_, static_cast<double>(g.fanouts.size()));
  }
  max_level_ = ctx.netlist.max_level();
}

NodeFeatures FeatureScaler::features(GateId gate, LogicValue value,
                                     std::optional<bool> objective) const {
  const Gate& g = ctx_->netlist.gate(gate);
  const ScoapValues& s = ctx_->scoap[gate];
  NodeFeatures f;
  switch (good_value(value)) {
    case Ternary::Zero: f.logic_value[0] = 1; break;
    case Ternary::One: f.logic_value[1] = 1; break;
    case Ternary::X: f.logic_value[2] = 1; break;
  }
  f.fault_effect = is_fault_effect(value) ? 1.0 : 0.0;
  f.objective_value[objective ? (*objective ? 1 : 0) : 2] = 1;
  f.cc0 = log_scale(s.cc0, log_max_cc0_);
  f.cc1 = log_scale(s.cc1, log_max_cc1_);
  f.co = log_scale(s.co, log_max_co_);
  f.gate_kind[static_cast<std::size_t>(g.kind)] = 1;
  const double span = max_fanout_ - min_fanout_;
  f.fanout = span > 0 ? (static_cast<double>(g.fanouts.size()) - min_fanout_) / span : 0.0;
  f.depth = max_level_ > 0 ? g.level / max_level_ : 0.0;
  return f;
}

double pi_reward(std::uint64_t n, double lambda1, double lambda2) {
  return 10.0 - lambda1 * std::exp(lambda2 * static_cast<double>(n));
}

double terminal_reward(AtpgStatus status) {
  return status == AtpgStatus::Aborted ? kTerminalAbortReward : kTerminalSuccessReward;
}

StateObservation build_observation(const CircuitContext& ctx, const FeatureScaler& scaler,
                                   const CircuitState& state, Objective objective,
                                   std::size_t action_arity) {
  const Netlist& n = ctx.netlist;
  const Ffr& region = ctx.ffrs.region(ctx.ffrs.region_of(objective.gate));
  StateObservation obs;
  obs.objective = objective;
  obs.region_head = region.head;

  auto add_node = [&](GateId id) {
    std::optional<bool> obj;
    if (id == objective.gate) obj = objective.value;
    obs.nodes.push_back({id, scaler.features(id, state.value(id), obj)});
  };
  for (GateId m : region.members) add_node(m);
  for (GateId f : region.boundary_fanins) add_node(f);
  for (GateId m : region.members) {
    for (GateId f : n.gate(m).fanins) obs.edges.emplace_back(f, m);
  }
  std::sort(obs.edges.begin(), obs.edges.end());
  obs.edges.erase(std::unique(obs.edges.begin(), obs.edges.end()), obs.edges.end());

  auto targets = ffr_backtrace_targets(n, ctx.ffrs, objective.gate, objective.value,
                                       state.values());
  if (targets.size() > action_arity) {
    obs.truncated = true;
    std::stable_partition(targets.begin(), targets.end(), [&](const FfrTarget& t) {
      return state.value(t.fanin) == LogicValue::X;
    });
    targets.resize(action_arity);
    std::sort(targets.begin(), targets.end(),
              [](const FfrTarget& a, const FfrTarget& b) { return a.fanin < b.fanin; });
  }
  obs.action_mask.assign(action_arity, false);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    obs.action_targets.push_back(targets[i].fanin);
    obs.action_values.push_back(targets[i].required_value);
    obs.action_mask[i] = state.value(targets[i].fanin) == LogicValue::X;
  }
  return obs;
}

// ---------------------------------------------------------------------------

AtpgEnvironment::AtpgEnvironment(std::shared_ptr<const CircuitContext> ctx, EnvConfig config)
    : ctx_(std::move(ctx)), config_(config), scaler_(*ctx_) {
  if (config_.action_arity == 0) throw Error("action arity must be at least 1");
}

std::optional<AtpgStatus> AtpgEnvironment::settle() {
  for (;;) {
    if (auto status = search_->advance()) return status;
    const Objective obj = search_->objective();
    if (ctx_->netlist.is_input(obj.gate)) {
      search_->decide(obj.gate, obj.value, 1);
      continue;
    }
    hop_objective_ = obj;
    hop_steps_ = 0;
    observation_ = build_observation(*ctx_, scaler_, search_->state(), obj, config_.action_arity);
    if (observation_.truncated) ++truncations_;
    return std::nullopt;
  }
}

StepOutcome AtpgEnvironment::finish(AtpgStatus status) {
  StepOutcome out;
  out.done = true;
  out.status = status;
  out.reward = terminal_reward(status);
  out.kind = status == AtpgStatus::Aborted ? RewardKind::Abort : RewardKind::Success;
  observation_ = {};
  return out;
}

StepOutcome AtpgEnvironment::reset(const FaultSite& fault, std::uint64_t seed) {
  validate_fault(ctx_->netlist, fault);
  search_ = std::make_unique<PodemSearch>(*ctx_, fault, config_.backtrack_limit);
  seed_ = seed;
  agent_steps_ = 0;
  truncations_ = 0;
  total_reward_ = 0;
  if (auto status = settle()) {
    StepOutcome out = finish(*status);
    // No action was taken, so nothing is credited to the episode.
    out.reward = 0;
    return out;
  }
  StepOutcome out;
  out.observation = observation_;
  return out;
}

StepOutcome AtpgEnvironment::step(std::size_t action) {
  if (!active()) throw ProtocolError("no active episode");
  if (action >= observation_.action_mask.size() || !observation_.action_mask[action]) {
    throw ProtocolError("action " + std::to_string(action) + " is masked");
  }
  const GateId target = observation_.action_targets[action];
  const bool value = observation_.action_values[action];
  ++agent_steps_;
  ++hop_steps_;

  StepOutcome out;
  if (!ctx_->netlist.is_input(target)) {
    hop_objective_ = {target, value};
    observation_ = build_observation(*ctx_, scaler_, search_->state(), hop_objective_,
                                     config_.action_arity);
    if (observation_.truncated) ++truncations_;
    out.reward = kHopReward;
    out.kind = RewardKind::Hop;
    out.observation = observation_;
    total_reward_ += out.reward;
    return out;
  }

  search_->decide(target, value, hop_steps_);
  const SearchCounters& c = search_->counters();
  const double reached = pi_reward(c.pi_visits[target] + c.pi_backtracks[target], config_.lambda1,
                                   config_.lambda2);
  if (auto status = settle()) {
    // The terminal reward replaces the PI reward on the final assignment.
    out = finish(*status);
  } else {
    out.reward = reached;
    out.kind = RewardKind::ReachPi;
    out.observation = observation_;
  }
  total_reward_ += out.reward;
  return out;
}

EpisodeMetrics AtpgEnvironment::metrics() const {
  EpisodeMetrics m;
  m.agent_steps = agent_steps_;
  m.truncations = truncations_;
  m.total_reward = total_reward_;
  if (!search_) return m;
  const AtpgResult r = search_->result();
  m.backtracks = r.backtracks;
  m.backtrace_steps = r.backtrace_steps;
  m.decisions = r.decisions;
  m.pi_assignments = r.pi_assignments;
  m.status = search_->status();
  m.pi_visits = r.pi_visit_counts;
  m.pi_backtracks = r.pi_backtrack_counts;
  return m;
}

AtpgResult AtpgEnvironment::result() const {
  if (!search_) throw ProtocolError("no active episode");
  return search_->result();
}

}  // namespace ffratpg
