#include "ffratpg/simulation.hpp"

#include <array>
#include <cassert>

namespace ffratpg {

namespace {

constexpr std::size_t kInlineFanins = 8;

LogicValue inject(LogicValue v, bool stuck_at) {
  const Ternary good = good_value(v);
  if (good == Ternary::X) return LogicValue::X;
  return combine(good, ternary_from_bool(stuck_at));
}

}  // namespace

CircuitState::CircuitState(const Netlist& netlist, FaultSite fault)
    : fault_(fault),
      values_(netlist.size(), LogicValue::X),
      assigned_(netlist.size(), LogicValue::X),
      buckets_(static_cast<std::size_t>(netlist.max_level()) + 1),
      queued_(netlist.size(), 0) {
  validate_fault(netlist, fault);
}

LogicValue CircuitState::pin_value(const Netlist& netlist, GateId gate, std::size_t k) const {
  const LogicValue v = values_[netlist.gate(gate).fanins[k]];
  if (fault_.pin && fault_.gate == gate && *fault_.pin == k) return inject(v, fault_.stuck_at);
  return v;
}

Pattern CircuitState::pattern(const Netlist& netlist) const {
  Pattern p;
  p.reserve(netlist.primary_inputs().size());
  for (GateId pi : netlist.primary_inputs()) p.push_back(assigned_[pi]);
  return p;
}

LogicValue evaluate_gate(const Netlist& netlist, const CircuitState& state, GateId id) {
  const Gate& g = netlist.gate(id);
  LogicValue out;
  if (g.kind == GateKind::Input) {
    out = state.assigned_[id];
  } else if (g.fanins.size() <= kInlineFanins) {
    std::array<Ternary, kInlineFanins> good{}, faulty{};
    for (std::size_t k = 0; k < g.fanins.size(); ++k) {
      const LogicValue v = state.pin_value(netlist, id, k);
      good[k] = good_value(v);
      faulty[k] = faulty_value(v);
    }
    out = combine(eval_ternary(g.kind, std::span(good.data(), g.fanins.size())),
                  eval_ternary(g.kind, std::span(faulty.data(), g.fanins.size())));
  } else {
    std::vector<LogicValue> in(g.fanins.size());
    for (std::size_t k = 0; k < in.size(); ++k) in[k] = state.pin_value(netlist, id, k);
    out = eval_gate(g.kind, in);
  }
  if (state.fault_.is_output() && state.fault_.gate == id) out = inject(out, state.fault_.stuck_at);
  return out;
}

void refresh_d_frontier(const Netlist& netlist, CircuitState& state) {
  state.d_frontier_.clear();
  for (const Gate& g : netlist.gates()) {
    if (state.values_[g.id] != LogicValue::X) continue;
    for (std::size_t k = 0; k < g.fanins.size(); ++k) {
      if (is_fault_effect(state.pin_value(netlist, g.id, k))) {
        state.d_frontier_.push_back(g.id);
        break;
      }
    }
  }
}

void imply(const Netlist& netlist, CircuitState& state, GateId pi, LogicValue value) {
  assert(netlist.is_input(pi));
  assert(value == LogicValue::Zero || value == LogicValue::One || value == LogicValue::X);
  state.assigned_[pi] = value;

  auto schedule = [&](GateId id) {
    if (!state.queued_[id]) {
      state.queued_[id] = 1;
      state.buckets_[static_cast<std::size_t>(netlist.gate(id).level)].push_back(id);
    }
  };
  schedule(pi);
  for (std::size_t level = static_cast<std::size_t>(netlist.gate(pi).level);
       level < state.buckets_.size(); ++level) {
    auto& bucket = state.buckets_[level];
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      const GateId id = bucket[i];
      state.queued_[id] = 0;
      const LogicValue next = evaluate_gate(netlist, state, id);
      if (next == state.values_[id]) continue;
      state.values_[id] = next;
      for (GateId out : netlist.gate(id).fanouts) schedule(out);
    }
    bucket.clear();
  }
  refresh_d_frontier(netlist, state);
}

void resimulate(const Netlist& netlist, CircuitState& state) {
  for (GateId id : netlist.topological_order()) state.values_[id] = evaluate_gate(netlist, state, id);
  refresh_d_frontier(netlist, state);
}

bool fault_detected(const Netlist& netlist, const CircuitState& state) {
  for (GateId po : netlist.primary_outputs()) {
    if (is_fault_effect(state.value(po))) return true;
  }
  return false;
}

namespace {

void check_complete(const Netlist& netlist, const Pattern& pattern) {
  if (pattern.size() != netlist.primary_inputs().size()) {
    throw Error("pattern has " + std::to_string(pattern.size()) + " values, netlist has " +
                std::to_string(netlist.primary_inputs().size()) + " primary inputs");
  }
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (!is_binary(pattern[i])) {
      throw Error("incomplete pattern: input '" + netlist.gate_name(netlist.primary_inputs()[i]) +
                  "' is not assigned 0 or 1");
    }
  }
}

bool eval_bool(GateKind kind, const std::vector<std::uint8_t>& in) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand: {
      bool r = true;
      for (auto b : in) r = r && b;
      return kind == GateKind::And ? r : !r;
    }
    case GateKind::Or:
    case GateKind::Nor: {
      bool r = false;
      for (auto b : in) r = r || b;
      return kind == GateKind::Or ? r : !r;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      bool r = false;
      for (auto b : in) r = r != static_cast<bool>(b);
      return kind == GateKind::Xor ? r : !r;
    }
    case GateKind::Not: return !in[0];
    default: return in[0];
  }
}

std::vector<std::uint8_t> simulate_machine(const Netlist& netlist, const Pattern& pattern,
                                           const FaultSite* fault) {
  std::vector<std::uint8_t> v(netlist.size(), 0);
  const auto pis = netlist.primary_inputs();
  for (std::size_t i = 0; i < pis.size(); ++i) v[pis[i]] = pattern[i] == LogicValue::One;
  std::vector<std::uint8_t> in;
  for (GateId id : netlist.topological_order()) {
    const Gate& g = netlist.gate(id);
    if (g.kind != GateKind::Input) {
      in.resize(g.fanins.size());
      for (std::size_t k = 0; k < g.fanins.size(); ++k) {
        in[k] = v[g.fanins[k]];
        if (fault && fault->pin && fault->gate == id && *fault->pin == k) in[k] = fault->stuck_at;
      }
      v[id] = eval_bool(g.kind, in);
    }
    if (fault && fault->is_output() && fault->gate == id) v[id] = fault->stuck_at;
  }
  return v;
}

}  // namespace

bool fault_simulate(const Netlist& netlist, const Pattern& pattern, const FaultSite& fault) {
  check_complete(netlist, pattern);
  validate_fault(netlist, fault);
  const auto good = simulate_machine(netlist, pattern, nullptr);
  const auto bad = simulate_machine(netlist, pattern, &fault);
  for (GateId po : netlist.primary_outputs()) {
    if (good[po] != bad[po]) return true;
  }
  return false;
}

std::vector<bool> simulate_good(const Netlist& netlist, const Pattern& pattern) {
  check_complete(netlist, pattern);
  const auto v = simulate_machine(netlist, pattern, nullptr);
  return {v.begin(), v.end()};
}

}  // namespace ffratpg
