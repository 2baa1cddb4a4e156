#include <doctest.h>

#include "ffratpg/logic.hpp"
#include "oracles.hpp"

using namespace ffratpg;

namespace {

constexpr LogicValue kAll[] = {LogicValue::Zero, LogicValue::One, LogicValue::X, LogicValue::D,
                               LogicValue::Dbar};

constexpr GateKind kMulti[] = {GateKind::And, GateKind::Nand, GateKind::Or,
                               GateKind::Nor, GateKind::Xor,  GateKind::Xnor};

/// Exact ternary value of one machine: the output if every completion of X agrees, else X.
Ternary completion_oracle(GateKind kind, const std::vector<Ternary>& in) {
  std::vector<std::size_t> xs;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == Ternary::X) xs.push_back(i);
  }
  std::optional<bool> seen;
  for (unsigned m = 0; m < (1u << xs.size()); ++m) {
    std::vector<bool> bits;
    for (Ternary t : in) bits.push_back(t == Ternary::One);
    for (std::size_t j = 0; j < xs.size(); ++j) bits[xs[j]] = (m >> j) & 1;
    const bool v = oracle::eval(kind, bits);
    if (seen && *seen != v) return Ternary::X;
    seen = v;
  }
  return ternary_from_bool(*seen);
}

void check_all(GateKind kind, std::size_t arity) {
  std::vector<LogicValue> in(arity);
  std::size_t total = 1;
  for (std::size_t i = 0; i < arity; ++i) total *= 5;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (auto& v : in) {
      v = kAll[c % 5];
      c /= 5;
    }
    std::vector<Ternary> good, faulty;
    for (LogicValue v : in) {
      good.push_back(good_value(v));
      faulty.push_back(faulty_value(v));
    }
    const LogicValue out = eval_gate(kind, in);
    const Ternary g = completion_oracle(kind, good);
    const Ternary f = completion_oracle(kind, faulty);
    CAPTURE(to_string(kind));
    CAPTURE(code);
    // X on either machine collapses the five-valued result to X.
    CHECK(out == combine(g, f));
  }
}

}  // namespace

TEST_CASE("five-valued evaluation matches per-machine completion, arity 1 to 3") {
  check_all(GateKind::Not, 1);
  check_all(GateKind::Buf, 1);
  for (GateKind k : kMulti) {
    check_all(k, 2);
    check_all(k, 3);
  }
}

TEST_CASE("ternary evaluation matches completion") {
  const Ternary all[] = {Ternary::Zero, Ternary::One, Ternary::X};
  for (GateKind k : kMulti) {
    for (Ternary a : all) {
      for (Ternary b : all) {
        const std::vector<Ternary> in{a, b};
        CHECK(eval_ternary(k, in) == completion_oracle(k, in));
      }
    }
  }
}

TEST_CASE("projections round trip") {
  for (LogicValue v : kAll) {
    if (v == LogicValue::X) continue;
    CHECK(combine(good_value(v), faulty_value(v)) == v);
  }
  CHECK(good_value(LogicValue::D) == Ternary::One);
  CHECK(faulty_value(LogicValue::D) == Ternary::Zero);
  CHECK(is_fault_effect(LogicValue::Dbar));
  CHECK_FALSE(is_fault_effect(LogicValue::X));
}

TEST_CASE("D through gates") {
  const LogicValue d = LogicValue::D, db = LogicValue::Dbar;
  CHECK(eval_gate(GateKind::And, std::vector{d, LogicValue::One}) == d);
  CHECK(eval_gate(GateKind::And, std::vector{d, LogicValue::Zero}) == LogicValue::Zero);
  CHECK(eval_gate(GateKind::Nand, std::vector{d, LogicValue::One}) == db);
  CHECK(eval_gate(GateKind::And, std::vector{d, db}) == LogicValue::Zero);
  CHECK(eval_gate(GateKind::Or, std::vector{d, db}) == LogicValue::One);
  CHECK(eval_gate(GateKind::Xor, std::vector{d, d}) == LogicValue::Zero);
  CHECK(eval_gate(GateKind::Xor, std::vector{d, LogicValue::X}) == LogicValue::X);
  CHECK(eval_gate(GateKind::Not, std::vector{db}) == d);
}

TEST_CASE("non-controlling values and inversion") {
  CHECK(non_controlling_value(GateKind::And));
  CHECK(non_controlling_value(GateKind::Nand));
  CHECK_FALSE(non_controlling_value(GateKind::Or));
  CHECK_FALSE(non_controlling_value(GateKind::Nor));
  CHECK_FALSE(non_controlling_value(GateKind::Xor));
  CHECK(is_inverting(GateKind::Xnor));
  CHECK_FALSE(is_inverting(GateKind::Buf));
}

TEST_CASE("arity mismatch throws") {
  CHECK_THROWS_AS(eval_gate(GateKind::Not, std::vector{LogicValue::One, LogicValue::One}),
                  NetlistError);
  CHECK_THROWS_AS(eval_gate(GateKind::And, std::vector{LogicValue::One}), NetlistError);
}
