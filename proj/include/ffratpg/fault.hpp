#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffratpg/netlist.hpp"

namespace ffratpg {

/// Pin-level stuck-at fault. `pin` is nullopt for the gate output, else the fanin index.
struct FaultSite {
  GateId gate = 0;
  std::optional<std::uint32_t> pin;
  bool stuck_at = false;

  bool is_output() const { return !pin.has_value(); }
  friend bool operator==(const FaultSite&, const FaultSite&) = default;
};

/// The net whose good value activates the fault: the gate itself, or the driver of the faulted pin.
GateId fault_net(const Netlist& netlist, const FaultSite& fault);

/// Throws Error for an unknown gate, a primary input, or an out-of-range pin.
void validate_fault(const Netlist& netlist, const FaultSite& fault);

/// Output and every input pin of every cell (non-INPUT gate), stuck-at-0 then stuck-at-1.
std::vector<FaultSite> enumerate_faults(const Netlist& netlist);

/// Structural equivalence collapsing. Keeps the first fault of each class in input order.
std::vector<FaultSite> collapse_faults(const Netlist& netlist, const std::vector<FaultSite>& faults);

/// `<gate-name> <OUT|IN:k> <SA0|SA1>`
std::string format_fault(const Netlist& netlist, const FaultSite& fault);
FaultSite parse_fault(const Netlist& netlist, std::string_view line);

void write_fault_list(const Netlist& netlist, const std::vector<FaultSite>& faults,
                      std::ostream& out);
/// Blank lines and '#' comments are skipped. Errors carry the 1-based line number.
std::vector<FaultSite> read_fault_list(const Netlist& netlist, std::istream& in);

}  // namespace ffratpg
