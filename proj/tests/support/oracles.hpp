#pragma once

// Reference implementations used only by the tests. They share the netlist data structure with
// the library but none of its algorithms: no levelization order, no five-valued algebra, no
// event queue.

#include <optional>
#include <string>
#include <vector>

#include "ffratpg/fault.hpp"
#include "ffratpg/netlist.hpp"
#include "ffratpg/scoap.hpp"

namespace oracle {

using ffratpg::FaultSite;
using ffratpg::GateId;
using ffratpg::GateKind;
using ffratpg::Netlist;

bool eval(GateKind kind, const std::vector<bool>& in);

/// Boolean value of every gate by memoized recursion from the outputs. `faulty` injects `fault`.
std::vector<bool> simulate(const Netlist& n, const std::vector<bool>& pi_bits,
                           const FaultSite* fault = nullptr);

bool detects(const Netlist& n, const std::vector<bool>& pi_bits, const FaultSite& fault);

/// Tries all 2^|PI| patterns. Returns the first detecting one.
std::optional<std::vector<bool>> find_test(const Netlist& n, const FaultSite& fault);

/// SCOAP by direct recursion on the definitions.
std::vector<ffratpg::ScoapValues> scoap(const Netlist& n);

/// Longest distance from any PI by repeated relaxation.
std::vector<int> levels(const Netlist& n);

/// Region representative per gate: union of every gate with its single consumer unless the gate
/// is a PO or a PI. Returns the root (head) of each gate's group.
std::vector<GateId> region_heads(const Netlist& n);

/// Walks gate by gate from `objective` toward `fanin` along `path` (consumer-first, excluding the
/// fanin), applying the textbook PODEM mapping at each gate.
bool walk_backtrace(const Netlist& n, const std::vector<GateId>& path, bool objective_value);

/// Corpus files under the given directory, sorted by name.
std::vector<std::string> bench_files(const std::string& dir);

/// Count of non-INPUT gates.
std::size_t cell_count(const Netlist& n);

}  // namespace oracle
