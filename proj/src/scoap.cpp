#include "ffratpg/scoap.hpp"

#include <algorithm>
#include <ostream>

namespace ffratpg {

namespace {

using Cc = std::pair<std::int64_t, std::int64_t>;  // (cc0, cc1)

Cc xor2(const Cc& a, const Cc& b) {
  const std::int64_t cc0 = std::min(saturating_add(a.first, b.first), saturating_add(a.second, b.second));
  const std::int64_t cc1 = std::min(saturating_add(a.first, b.second), saturating_add(a.second, b.first));
  return {saturating_add(cc0, 1), saturating_add(cc1, 1)};
}

/// Controllability of the left-fold chain v1 = XOR(in0, in1), vi = XOR(v(i-1), in_i).
std::vector<Cc> xor_chain(const std::vector<Cc>& in) {
  std::vector<Cc> chain(in.size());
  chain[1] = xor2(in[0], in[1]);
  for (std::size_t i = 2; i < in.size(); ++i) chain[i] = xor2(chain[i - 1], in[i]);
  return chain;
}

std::int64_t easiest(const Cc& c) { return std::min(c.first, c.second); }

}  // namespace

std::vector<ScoapValues> compute_scoap(const Netlist& netlist) {
  std::vector<ScoapValues> s(netlist.size());
  std::vector<Cc> in;

  for (GateId id : netlist.topological_order()) {
    const Gate& g = netlist.gate(id);
    ScoapValues& out = s[id];
    if (g.kind == GateKind::Input) {
      out.cc0 = out.cc1 = 1;
      continue;
    }
    in.clear();
    for (GateId f : g.fanins) in.emplace_back(s[f].cc0, s[f].cc1);

    std::int64_t sum0 = 0, sum1 = 0;
    std::int64_t min0 = kScoapSaturation, min1 = kScoapSaturation;
    for (const auto& [c0, c1] : in) {
      sum0 = saturating_add(sum0, c0);
      sum1 = saturating_add(sum1, c1);
      min0 = std::min(min0, c0);
      min1 = std::min(min1, c1);
    }
    switch (g.kind) {
      case GateKind::And: out.cc0 = min0; out.cc1 = sum1; break;
      case GateKind::Nand: out.cc0 = sum1; out.cc1 = min0; break;
      case GateKind::Or: out.cc0 = sum0; out.cc1 = min1; break;
      case GateKind::Nor: out.cc0 = min1; out.cc1 = sum0; break;
      case GateKind::Not: out.cc0 = in[0].second; out.cc1 = in[0].first; break;
      case GateKind::Buf:
      case GateKind::Dff: out.cc0 = in[0].first; out.cc1 = in[0].second; break;
      case GateKind::Xor:
      case GateKind::Xnor: {
        const Cc last = xor_chain(in).back();
        // The chain already counted its own +1 per stage.
        out.cc0 = last.first - 1;
        out.cc1 = last.second - 1;
        if (g.kind == GateKind::Xnor) std::swap(out.cc0, out.cc1);
        break;
      }
      case GateKind::Input: break;
    }
    out.cc0 = saturating_add(out.cc0, 1);
    out.cc1 = saturating_add(out.cc1, 1);
  }

  // Observability: nets start unobservable, POs at zero, then min over consuming pins.
  for (auto& v : s) v.co = kScoapSaturation;
  const auto order = netlist.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Gate& g = netlist.gate(*it);
    if (g.is_po) s[g.id].co = 0;
    const std::int64_t co = s[g.id].co;
    if (g.kind == GateKind::Input || co >= kScoapSaturation) continue;

    const std::size_t n = g.fanins.size();
    std::vector<std::int64_t> pin_co(n, kScoapSaturation);
    switch (g.kind) {
      case GateKind::And:
      case GateKind::Nand:
      case GateKind::Or:
      case GateKind::Nor: {
        const bool and_like = g.kind == GateKind::And || g.kind == GateKind::Nand;
        for (std::size_t j = 0; j < n; ++j) {
          std::int64_t c = saturating_add(co, 1);
          for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            const ScoapValues& o = s[g.fanins[k]];
            c = saturating_add(c, and_like ? o.cc1 : o.cc0);
          }
          pin_co[j] = c;
        }
        break;
      }
      case GateKind::Not:
      case GateKind::Buf:
      case GateKind::Dff: pin_co[0] = saturating_add(co, 1); break;
      case GateKind::Xor:
      case GateKind::Xnor: {
        in.clear();
        for (GateId f : g.fanins) in.emplace_back(s[f].cc0, s[f].cc1);
        const auto chain = xor_chain(in);
        std::int64_t stage_co = co;  // observability of chain stage i
        for (std::size_t i = n - 1; i >= 2; --i) {
          pin_co[i] = saturating_add(saturating_add(stage_co, easiest(chain[i - 1])), 1);
          stage_co = saturating_add(saturating_add(stage_co, easiest(in[i])), 1);
        }
        pin_co[1] = saturating_add(saturating_add(stage_co, easiest(in[0])), 1);
        pin_co[0] = saturating_add(saturating_add(stage_co, easiest(in[1])), 1);
        break;
      }
      case GateKind::Input: break;
    }
    for (std::size_t j = 0; j < n; ++j) {
      ScoapValues& f = s[g.fanins[j]];
      f.co = std::min(f.co, pin_co[j]);
    }
  }
  return s;
}

void write_scoap_csv(const Netlist& netlist, const std::vector<ScoapValues>& scoap,
                     std::ostream& out) {
  out << "gate,cc0,cc1,co\n";
  for (const Gate& g : netlist.gates()) {
    const ScoapValues& v = scoap[g.id];
    out << netlist.gate_name(g.id) << ',' << v.cc0 << ',' << v.cc1 << ',' << v.co << '\n';
  }
}

}  // namespace ffratpg
