#include "ffratpg/podem.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace ffratpg {

std::string_view to_string(AtpgStatus status) {
  switch (status) {
    case AtpgStatus::Detected: return "DETECTED";
    case AtpgStatus::Untestable: return "UNTESTABLE";
    case AtpgStatus::Aborted: return "ABORTED";
  }
  return "?";
}

std::optional<AtpgStatus> status_from_string(std::string_view text) {
  if (text == "DETECTED") return AtpgStatus::Detected;
  if (text == "UNTESTABLE") return AtpgStatus::Untestable;
  if (text == "ABORTED") return AtpgStatus::Aborted;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Backtrace policies

PiChoice GateLevelHeuristicPolicy::backtrace(const CircuitContext& ctx, const CircuitState& state,
                                             Objective objective) {
  const Netlist& n = ctx.netlist;
  GateId gate = objective.gate;
  bool value = objective.value;
  std::uint64_t steps = 0;
  while (!n.is_input(gate)) {
    const Gate& g = n.gate(gate);
    std::optional<GateId> best;
    for (GateId f : g.fanins) {
      if (state.value(f) != LogicValue::X) continue;
      if (!best || n.gate(f).level < n.gate(*best).level ||
          (n.gate(f).level == n.gate(*best).level && f < *best)) {
        best = f;
      }
    }
    if (!best) throw Error("backtrace reached gate '" + n.gate_name(gate) + "' with no X fanin");
    value = backtrace_input_value(g.kind, value);
    gate = *best;
    ++steps;
  }
  return {gate, value, std::max<std::uint64_t>(steps, 1)};
}

std::vector<FfrTarget> ffr_hop_candidates(const CircuitContext& ctx, const CircuitState& state,
                                          Objective objective) {
  auto targets = ffr_backtrace_targets(ctx.netlist, ctx.ffrs, objective.gate, objective.value,
                                       state.values());
  std::erase_if(targets, [&](const FfrTarget& t) { return state.value(t.fanin) != LogicValue::X; });
  return targets;
}

std::size_t min_level_candidate(const Netlist& netlist, std::span<const FfrTarget> candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const int li = netlist.gate(candidates[i].fanin).level;
    const int lb = netlist.gate(candidates[best].fanin).level;
    if (li < lb || (li == lb && candidates[i].fanin < candidates[best].fanin)) best = i;
  }
  return best;
}

PiChoice FfrBacktracePolicy::backtrace(const CircuitContext& ctx, const CircuitState& state,
                                       Objective objective) {
  std::uint64_t steps = 0;
  while (!ctx.netlist.is_input(objective.gate)) {
    const auto candidates = ffr_hop_candidates(ctx, state, objective);
    if (candidates.empty()) {
      throw Error("no X-valued fanin below objective '" + ctx.netlist.gate_name(objective.gate) +
                  "'");
    }
    const std::size_t pick = choose(ctx, state, objective, candidates);
    if (pick >= candidates.size()) throw Error("backtrace policy chose an invalid fanin");
    objective = {candidates[pick].fanin, candidates[pick].required_value};
    ++steps;
  }
  return {objective.gate, objective.value, std::max<std::uint64_t>(steps, 1)};
}

std::size_t FfrLevelHeuristicPolicy::choose(const CircuitContext& ctx, const CircuitState&,
                                            Objective, std::span<const FfrTarget> candidates) {
  return min_level_candidate(ctx.netlist, candidates);
}

std::unique_ptr<BacktracePolicy> gate_level_heuristic_policy() {
  return std::make_unique<GateLevelHeuristicPolicy>();
}

std::unique_ptr<BacktracePolicy> ffr_level_heuristic_policy() {
  return std::make_unique<FfrLevelHeuristicPolicy>();
}

// ---------------------------------------------------------------------------
// Search

PodemSearch::PodemSearch(const CircuitContext& ctx, FaultSite fault, std::uint64_t backtrack_limit)
    : ctx_(&ctx),
      state_(ctx.netlist, fault),
      limit_(backtrack_limit),
      x_path_(ctx.netlist.size(), 0) {
  if (backtrack_limit == 0) throw Error("backtrack limit must be at least 1");
  counters_.pi_visits.assign(ctx.netlist.size(), 0);
  counters_.pi_backtracks.assign(ctx.netlist.size(), 0);
  // Nothing downstream of a dead gate is observable.
  if (ctx.netlist.is_dead(fault.gate)) status_ = AtpgStatus::Untestable;
}

bool PodemSearch::failed() {
  const Netlist& n = ctx_->netlist;
  const FaultSite& fault = state_.fault();
  const Ternary site = good_value(state_.value(fault_net(n, fault)));
  live_frontier_.clear();
  if (site == Ternary::X) return false;
  if (site == ternary_from_bool(fault.stuck_at)) return true;

  // X-path: an X gate that is a PO or feeds an X gate with an X-path.
  const auto order = n.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Gate& g = n.gate(*it);
    std::uint8_t ok = 0;
    if (state_.value(g.id) == LogicValue::X) {
      ok = g.is_po;
      for (GateId out : g.fanouts) {
        if (ok) break;
        ok = x_path_[out];
      }
    }
    x_path_[g.id] = ok;
  }
  for (GateId g : state_.d_frontier()) {
    if (x_path_[g]) live_frontier_.push_back(g);
  }
  return live_frontier_.empty();
}

Objective PodemSearch::make_objective() const {
  const Netlist& n = ctx_->netlist;
  const FaultSite& fault = state_.fault();
  const GateId site = fault_net(n, fault);
  if (state_.value(site) == LogicValue::X) return {site, !fault.stuck_at};

  // Propagate through the most observable D-frontier gate.
  GateId best = live_frontier_.front();
  for (GateId g : live_frontier_) {
    if (ctx_->scoap[g].co < ctx_->scoap[best].co) best = g;
  }
  const Gate& g = n.gate(best);
  for (std::size_t k = 0; k < g.fanins.size(); ++k) {
    if (state_.pin_value(n, best, k) == LogicValue::X) {
      return {g.fanins[k], non_controlling_value(g.kind)};
    }
  }
  throw Error("D-frontier gate '" + n.gate_name(best) + "' has no X input");
}

bool PodemSearch::backtrack() {
  auto& stack = state_.decisions();
  while (!stack.empty()) {
    PiDecision& top = stack.back();
    if (!top.alternative_tried) {
      if (counters_.backtracks >= limit_) {
        status_ = AtpgStatus::Aborted;
        return false;
      }
      ++counters_.backtracks;
      if (counters_.last_decision) ++counters_.pi_backtracks[*counters_.last_decision];
      top.value = !top.value;
      top.alternative_tried = true;
      imply(ctx_->netlist, state_, top.pi, from_bool(top.value));
      return true;
    }
    const GateId pi = top.pi;
    stack.pop_back();
    imply(ctx_->netlist, state_, pi, LogicValue::X);
  }
  status_ = AtpgStatus::Untestable;
  return false;
}

std::optional<AtpgStatus> PodemSearch::advance() {
  while (!status_) {
    if (fault_detected(ctx_->netlist, state_)) {
      status_ = AtpgStatus::Detected;
      break;
    }
    if (!failed()) {
      objective_ = make_objective();
      return std::nullopt;
    }
    backtrack();
  }
  return status_;
}

void PodemSearch::decide(GateId pi, bool value, std::uint64_t backtrace_steps) {
  if (status_) throw Error("search already finished");
  if (!ctx_->netlist.is_input(pi) || state_.pi_assignment(pi) != LogicValue::X) {
    throw Error("backtrace must end on an unassigned primary input");
  }
  counters_.decisions += backtrace_steps;
  counters_.backtrace_steps += backtrace_steps;
  ++counters_.pi_assignments;
  ++counters_.pi_visits[pi];
  counters_.last_decision = pi;
  state_.decisions().push_back({pi, value, false});
  imply(ctx_->netlist, state_, pi, from_bool(value));
}

AtpgResult PodemSearch::result() const {
  const Netlist& n = ctx_->netlist;
  AtpgResult r;
  r.status = status_.value_or(AtpgStatus::Aborted);
  r.backtracks = counters_.backtracks;
  r.backtrace_steps = counters_.backtrace_steps;
  r.decisions = counters_.decisions;
  r.pi_assignments = counters_.pi_assignments;
  for (GateId pi : n.primary_inputs()) {
    r.pi_visit_counts.push_back(counters_.pi_visits[pi]);
    r.pi_backtrack_counts.push_back(counters_.pi_backtracks[pi]);
  }
  if (r.status == AtpgStatus::Detected) {
    Pattern p = state_.pattern(n);
    for (auto& v : p) {
      if (v == LogicValue::X) v = LogicValue::Zero;
    }
    r.pattern = std::move(p);
  }
  return r;
}

AtpgResult generate_test(const CircuitContext& ctx, const FaultSite& fault,
                         BacktracePolicy& policy, std::uint64_t backtrack_limit) {
  PodemSearch search(ctx, fault, backtrack_limit);
  while (!search.advance()) {
    const PiChoice choice = policy.backtrace(ctx, search.state(), search.objective());
    search.decide(choice.pi, choice.value, choice.steps);
  }
  return search.result();
}

// ---------------------------------------------------------------------------
// Fault lists

double RunTotals::ufp() const {
  return faults ? 100.0 * static_cast<double>(undetected()) / static_cast<double>(faults) : 0.0;
}

FaultListRun run_fault_list(const CircuitContext& ctx, const std::vector<FaultSite>& faults,
                            const PolicyFactory& factory, std::uint64_t backtrack_limit,
                            unsigned parallelism) {
  FaultListRun run;
  run.records.resize(faults.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(faults.size())));

  std::atomic<std::size_t> next{0};
  auto work = [&](BacktracePolicy& policy) {
    for (std::size_t i = next++; i < faults.size(); i = next++) {
      run.records[i] = {faults[i], generate_test(ctx, faults[i], policy, backtrack_limit)};
    }
  };
  if (workers == 1) {
    auto policy = factory();
    work(*policy);
  } else {
    std::vector<std::unique_ptr<BacktracePolicy>> policies;
    for (unsigned w = 0; w < workers; ++w) policies.push_back(factory());
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          work(*policies[w]);
        } catch (...) {
          errors[w] = std::current_exception();
          next = faults.size();
        }
      });
    }
    threads.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RunTotals& t = run.totals;
  t.faults = faults.size();
  for (const FaultRecord& rec : run.records) {
    switch (rec.result.status) {
      case AtpgStatus::Detected: ++t.detected; break;
      case AtpgStatus::Untestable: ++t.untestable; break;
      case AtpgStatus::Aborted: ++t.aborted; break;
    }
    t.backtracks += rec.result.backtracks;
    t.backtrace_steps += rec.result.backtrace_steps;
    t.decisions += rec.result.decisions;
    t.pi_assignments += rec.result.pi_assignments;
  }
  return run;
}

}  // namespace ffratpg
