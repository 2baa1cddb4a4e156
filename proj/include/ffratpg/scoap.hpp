#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "ffratpg/netlist.hpp"

namespace ffratpg {

/// Combinational SCOAP measures of one gate output.
struct ScoapValues {
  std::int64_t cc0 = 1;
  std::int64_t cc1 = 1;
  std::int64_t co = 0;

  friend bool operator==(const ScoapValues&, const ScoapValues&) = default;
};

/// Every SCOAP sum saturates here.
inline constexpr std::int64_t kScoapSaturation = std::numeric_limits<std::int32_t>::max();

inline std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  const std::int64_t s = a + b;
  return s >= kScoapSaturation ? kScoapSaturation : s;
}

/// Goldstein combinational controllability/observability. N-ary XOR/XNOR are measured as a
/// left fold of 2-input gates. Gates that reach no PO get CO = kScoapSaturation.
std::vector<ScoapValues> compute_scoap(const Netlist& netlist);

/// CSV with header `gate,cc0,cc1,co`.
void write_scoap_csv(const Netlist& netlist, const std::vector<ScoapValues>& scoap,
                     std::ostream& out);

}  // namespace ffratpg
