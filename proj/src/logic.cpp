#include "ffratpg/logic.hpp"

#include <string>
#include <vector>

namespace ffratpg {

std::string_view to_string(LogicValue v) {
  switch (v) {
    case LogicValue::Zero: return "0";
    case LogicValue::One: return "1";
    case LogicValue::X: return "X";
    case LogicValue::D: return "D";
    case LogicValue::Dbar: return "DBAR";
  }
  return "?";
}

namespace {

Ternary invert(Ternary t) {
  if (t == Ternary::X) return t;
  return t == Ternary::One ? Ternary::Zero : Ternary::One;
}

Ternary and_of(std::span<const Ternary> in) {
  bool unknown = false;
  for (Ternary t : in) {
    if (t == Ternary::Zero) return Ternary::Zero;
    if (t == Ternary::X) unknown = true;
  }
  return unknown ? Ternary::X : Ternary::One;
}

Ternary or_of(std::span<const Ternary> in) {
  bool unknown = false;
  for (Ternary t : in) {
    if (t == Ternary::One) return Ternary::One;
    if (t == Ternary::X) unknown = true;
  }
  return unknown ? Ternary::X : Ternary::Zero;
}

Ternary xor_of(std::span<const Ternary> in) {
  bool parity = false;
  for (Ternary t : in) {
    if (t == Ternary::X) return Ternary::X;
    parity ^= (t == Ternary::One);
  }
  return ternary_from_bool(parity);
}

bool arity_ok(GateKind kind, std::size_t n) {
  switch (kind) {
    case GateKind::Input: return n == 0;
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Dff: return n == 1;
    default: return n >= 2;
  }
}

}  // namespace

Ternary eval_ternary(GateKind kind, std::span<const Ternary> in) {
  switch (kind) {
    case GateKind::And: return and_of(in);
    case GateKind::Nand: return invert(and_of(in));
    case GateKind::Or: return or_of(in);
    case GateKind::Nor: return invert(or_of(in));
    case GateKind::Not: return invert(in[0]);
    case GateKind::Buf:
    case GateKind::Dff: return in[0];
    case GateKind::Xor: return xor_of(in);
    case GateKind::Xnor: return invert(xor_of(in));
    case GateKind::Input: return Ternary::X;
  }
  return Ternary::X;
}

LogicValue eval_gate(GateKind kind, std::span<const LogicValue> inputs) {
  if (!arity_ok(kind, inputs.size())) {
    throw NetlistError("arity mismatch: " + std::string(to_string(kind)) + " with " +
                       std::to_string(inputs.size()) + " inputs");
  }
  std::vector<Ternary> good(inputs.size()), faulty(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    good[i] = good_value(inputs[i]);
    faulty[i] = faulty_value(inputs[i]);
  }
  return combine(eval_ternary(kind, good), eval_ternary(kind, faulty));
}

bool non_controlling_value(GateKind kind) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand: return true;
    default: return false;
  }
}

}  // namespace ffratpg
