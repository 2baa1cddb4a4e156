#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "ffratpg/netlist.hpp"

namespace ffratpg {

/// Roth five-valued algebra. D is good 1 / faulty 0, Dbar is good 0 / faulty 1.
enum class LogicValue : std::uint8_t { Zero, One, X, D, Dbar };

/// Three-valued projection used for the good and faulty machines.
enum class Ternary : std::uint8_t { Zero, One, X };

constexpr Ternary good_value(LogicValue v) {
  switch (v) {
    case LogicValue::Zero:
    case LogicValue::Dbar: return Ternary::Zero;
    case LogicValue::One:
    case LogicValue::D: return Ternary::One;
    default: return Ternary::X;
  }
}

constexpr Ternary faulty_value(LogicValue v) {
  switch (v) {
    case LogicValue::Zero:
    case LogicValue::D: return Ternary::Zero;
    case LogicValue::One:
    case LogicValue::Dbar: return Ternary::One;
    default: return Ternary::X;
  }
}

/// Re-encodes a (good, faulty) pair; X whenever either side is unknown.
constexpr LogicValue combine(Ternary good, Ternary faulty) {
  if (good == Ternary::X || faulty == Ternary::X) return LogicValue::X;
  if (good == faulty) return good == Ternary::One ? LogicValue::One : LogicValue::Zero;
  return good == Ternary::One ? LogicValue::D : LogicValue::Dbar;
}

constexpr bool is_fault_effect(LogicValue v) { return v == LogicValue::D || v == LogicValue::Dbar; }
constexpr bool is_binary(LogicValue v) { return v == LogicValue::Zero || v == LogicValue::One; }
constexpr LogicValue from_bool(bool b) { return b ? LogicValue::One : LogicValue::Zero; }
constexpr Ternary ternary_from_bool(bool b) { return b ? Ternary::One : Ternary::Zero; }

std::string_view to_string(LogicValue v);

/// Three-valued evaluation of one machine. Inputs must satisfy the kind's arity.
Ternary eval_ternary(GateKind kind, std::span<const Ternary> inputs);

/// Five-valued evaluation through the good/faulty projections. Throws NetlistError on arity mismatch.
LogicValue eval_gate(GateKind kind, std::span<const LogicValue> inputs);

/// Non-controlling input value for propagation through `kind` (0 for XOR-family gates).
bool non_controlling_value(GateKind kind);

}  // namespace ffratpg
