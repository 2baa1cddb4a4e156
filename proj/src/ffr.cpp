#include "ffratpg/ffr.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace ffratpg {

namespace {

bool starts_region(const Gate& g) {
  return g.fanouts.size() != 1 || g.is_po || g.kind == GateKind::Input;
}

}  // namespace

FfrPartition partition(const Netlist& netlist) {
  FfrPartition p;
  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  p.region_of_.assign(netlist.size(), kUnassigned);

  const auto order = netlist.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Gate& g = netlist.gate(*it);
    if (starts_region(g)) {
      p.region_of_[g.id] = p.regions_.size();
      p.regions_.push_back(Ffr{g.id, {}, {}, 0});
    } else {
      p.region_of_[g.id] = p.region_of_[g.fanouts.front()];
    }
  }
  for (GateId id = 0; id < netlist.size(); ++id) p.regions_[p.region_of_[id]].members.push_back(id);

  std::vector<int> chain(netlist.size(), 0);
  for (GateId id : order) {
    const Gate& g = netlist.gate(id);
    if (g.kind == GateKind::Input) continue;
    int longest = 0;
    for (GateId f : g.fanins) {
      if (p.region_of_[f] == p.region_of_[id]) longest = std::max(longest, chain[f]);
    }
    chain[id] = longest + 1;
  }

  for (std::size_t r = 0; r < p.regions_.size(); ++r) {
    Ffr& ffr = p.regions_[r];
    for (GateId m : ffr.members) {
      for (GateId f : netlist.gate(m).fanins) {
        if (p.region_of_[f] != r) ffr.boundary_fanins.push_back(f);
      }
    }
    std::sort(ffr.boundary_fanins.begin(), ffr.boundary_fanins.end());
    ffr.boundary_fanins.erase(std::unique(ffr.boundary_fanins.begin(), ffr.boundary_fanins.end()),
                              ffr.boundary_fanins.end());
    ffr.depth = chain[ffr.head];
  }
  return p;
}

double FfrPartition::average_depth() const {
  double sum = 0;
  std::size_t count = 0;
  for (const Ffr& r : regions_) {
    if (r.depth == 0) continue;
    sum += r.depth;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

int FfrPartition::max_depth() const {
  int d = 0;
  for (const Ffr& r : regions_) d = std::max(d, r.depth);
  return d;
}

namespace {

struct Entry {
  GateId fanin;
  GateId entry_gate;
  std::vector<GateId> path;  // objective first, entry gate last
};

/// All (fanin, entry edge) pairs below `objective` inside its region.
std::vector<Entry> collect_entries(const Netlist& netlist, const FfrPartition& ffrs,
                                   GateId objective) {
  const std::size_t region = ffrs.region_of(objective);
  std::vector<Entry> entries;
  std::vector<GateId> path;
  auto walk = [&](auto&& self, GateId gate) -> void {
    path.push_back(gate);
    for (GateId f : netlist.gate(gate).fanins) {
      if (ffrs.region_of(f) == region) self(self, f);
      else entries.push_back({f, gate, path});
    }
    path.pop_back();
  };
  walk(walk, objective);
  return entries;
}

}  // namespace

std::vector<FfrTarget> ffr_backtrace_targets(const Netlist& netlist, const FfrPartition& ffrs,
                                             GateId objective_gate, bool objective_value,
                                             std::span<const LogicValue> values) {
  if (objective_gate >= netlist.size() || netlist.is_input(objective_gate)) {
    throw Error("objective gate is not a member of a fanout-free region with fanins");
  }
  auto entries = collect_entries(netlist, ffrs, objective_gate);
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.fanin != b.fanin) return a.fanin < b.fanin;
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    return a.entry_gate < b.entry_gate;
  });

  std::vector<FfrTarget> targets;
  for (const Entry& e : entries) {
    if (!targets.empty() && targets.back().fanin == e.fanin) continue;
    bool value = objective_value;
    for (GateId g : e.path) value = backtrace_input_value(netlist.gate(g).kind, value);
    const LogicValue current = values[e.fanin];
    const Ternary good = good_value(current);
    FfrTarget t;
    t.fanin = e.fanin;
    t.required_value = value;
    t.feasible_now = current == LogicValue::X || good == ternary_from_bool(value);
    t.gate_hops = e.path.size();
    targets.push_back(t);
  }
  return targets;
}

std::vector<FfrPath> ffr_paths(const Netlist& netlist, const FfrPartition& ffrs, GateId fanin,
                               GateId objective_gate) {
  std::vector<FfrPath> out;
  for (const Entry& e : collect_entries(netlist, ffrs, objective_gate)) {
    if (e.fanin != fanin) continue;
    FfrPath p;
    p.fanin = fanin;
    p.path_gates.assign(e.path.rbegin(), e.path.rend());
    for (GateId g : p.path_gates) p.parity ^= is_inverting(netlist.gate(g).kind);
    out.push_back(std::move(p));
  }
  return out;
}

void write_partition_csv(const Netlist& netlist, const FfrPartition& ffrs, std::ostream& out) {
  out << "ffr_head,member_count,depth,fanin_count\n";
  for (const Ffr& r : ffrs.regions()) {
    out << netlist.gate_name(r.head) << ',' << r.members.size() << ',' << r.depth << ','
        << r.boundary_fanins.size() << '\n';
  }
  out << "# average_depth=" << std::fixed << std::setprecision(4) << ffrs.average_depth() << '\n';
}

}  // namespace ffratpg
