#pragma once

#include <memory>
#include <vector>

#include "ffratpg/ffr.hpp"
#include "ffratpg/netlist.hpp"
#include "ffratpg/scoap.hpp"

namespace ffratpg {

/// A netlist with its cached, read-only analyses. Built once, shared by every fault worker.
struct CircuitContext {
  explicit CircuitContext(Netlist n)
      : netlist(std::move(n)), scoap(compute_scoap(netlist)), ffrs(partition(netlist)) {}

  Netlist netlist;
  std::vector<ScoapValues> scoap;
  FfrPartition ffrs;
};

inline std::shared_ptr<const CircuitContext> make_context(Netlist netlist) {
  return std::make_shared<const CircuitContext>(std::move(netlist));
}

}  // namespace ffratpg
