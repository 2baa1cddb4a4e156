#pragma once

// Scripted agents that drive the environment through its public interface only.

#include <algorithm>
#include <optional>
#include <random>

#include "ffratpg/environment.hpp"

namespace clients {

/// Shallowest unmasked target, ties to the lower gate id. Mirrors the FFR heuristic.
inline std::size_t shallowest(const ffratpg::Netlist& n, const ffratpg::StateObservation& obs) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < obs.action_targets.size(); ++i) {
    if (!obs.action_mask[i]) continue;
    if (!best) {
      best = i;
      continue;
    }
    const int li = n.gate(obs.action_targets[i]).level;
    const int lb = n.gate(obs.action_targets[*best]).level;
    if (li < lb || (li == lb && obs.action_targets[i] < obs.action_targets[*best])) best = i;
  }
  return best.value_or(obs.action_mask.size());
}

/// Action arity wide enough that no region of the circuit is ever truncated.
inline std::size_t untruncated_arity(const ffratpg::CircuitContext& ctx) {
  std::size_t widest = 1;
  for (const ffratpg::Ffr& r : ctx.ffrs.regions()) widest = std::max(widest, r.boundary_fanins.size());
  return widest;
}

inline std::size_t random_valid(const ffratpg::StateObservation& obs, std::mt19937_64& rng) {
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < obs.action_mask.size(); ++i) {
    if (obs.action_mask[i]) valid.push_back(i);
  }
  if (valid.empty()) return obs.action_mask.size();
  return valid[rng() % valid.size()];
}

struct Episode {
  std::vector<ffratpg::StepOutcome> steps;  // reset outcome first
  ffratpg::EpisodeMetrics metrics;
  ffratpg::AtpgResult result;
};

/// Runs one episode to completion with `choose(obs)`.
template <typename Choose>
Episode run_episode(ffratpg::AtpgEnvironment& env, const ffratpg::FaultSite& fault,
                    std::uint64_t seed, Choose&& choose) {
  Episode e;
  e.steps.push_back(env.reset(fault, seed));
  while (!e.steps.back().done) e.steps.push_back(env.step(choose(*e.steps.back().observation)));
  e.metrics = env.metrics();
  e.result = env.result();
  return e;
}

}  // namespace clients
