#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "ffratpg/fault.hpp"
#include "ffratpg/simulation.hpp"
#include "oracles.hpp"

using namespace ffratpg;

namespace {

bool same_values(const CircuitState& a, const CircuitState& b) {
  return std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()) &&
         std::equal(a.d_frontier().begin(), a.d_frontier().end(), b.d_frontier().begin(),
                    b.d_frontier().end());
}

}  // namespace

TEST_CASE("event-driven implication equals a full resweep") {
  std::mt19937_64 rng(7);
  for (const char* name : {"c17.bench", "s27.bench", "c432.bench", "c880.bench",
                           "small/cla2.bench", "small/double_reconv.bench"}) {
    CAPTURE(name);
    const Netlist n = corpus::load(name);
    const auto faults = enumerate_faults(n);
    const auto pis = n.primary_inputs();
    for (int trial = 0; trial < 20; ++trial) {
      CircuitState state(n, faults[rng() % faults.size()]);
      for (int step = 0; step < 40; ++step) {
        const GateId pi = pis[rng() % pis.size()];
        const LogicValue v = std::array{LogicValue::Zero, LogicValue::One, LogicValue::X}[rng() % 3];
        imply(n, state, pi, v);
        CircuitState check = state;
        resimulate(n, check);
        REQUIRE(same_values(state, check));
      }
    }
  }
}

TEST_CASE("implication is idempotent") {
  const Netlist n = corpus::load("c432.bench");
  const auto faults = enumerate_faults(n);
  std::mt19937_64 rng(11);
  CircuitState state(n, faults[17]);
  for (int i = 0; i < 30; ++i) {
    const GateId pi = n.primary_inputs()[rng() % n.primary_inputs().size()];
    const LogicValue v = rng() % 2 ? LogicValue::One : LogicValue::Zero;
    imply(n, state, pi, v);
    const CircuitState before = state;
    imply(n, state, pi, v);
    CHECK(state == before);
  }
}

TEST_CASE("unassigning every input restores the initial state") {
  const Netlist n = corpus::load("c880.bench");
  const FaultSite f = enumerate_faults(n)[101];
  CircuitState state(n, f);
  resimulate(n, state);
  const CircuitState initial = state;
  for (GateId pi : n.primary_inputs()) imply(n, state, pi, LogicValue::One);
  for (GateId pi : n.primary_inputs()) imply(n, state, pi, LogicValue::X);
  CHECK(same_values(state, initial));
}

TEST_CASE("two-copy fault simulation agrees with the recursive oracle") {
  std::mt19937_64 rng(3);
  for (const char* name : {"c17.bench", "s27.bench", "c432.bench", "c499.bench"}) {
    CAPTURE(name);
    const Netlist n = corpus::load(name);
    const auto faults = enumerate_faults(n);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<bool> bits(n.primary_inputs().size());
      Pattern p;
      for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = rng() & 1;
        p.push_back(from_bool(bits[i]));
      }
      const FaultSite& f = faults[rng() % faults.size()];
      CHECK(fault_simulate(n, p, f) == oracle::detects(n, bits, f));
      const auto good = simulate_good(n, p);
      const auto ref = oracle::simulate(n, bits);
      CHECK(good == ref);
    }
  }
}

TEST_CASE("five-valued state matches two-copy simulation on full patterns") {
  std::mt19937_64 rng(5);
  const Netlist n = corpus::load("c432.bench");
  const auto faults = enumerate_faults(n);
  for (int trial = 0; trial < 100; ++trial) {
    const FaultSite& f = faults[rng() % faults.size()];
    CircuitState state(n, f);
    Pattern p;
    for (GateId pi : n.primary_inputs()) {
      p.push_back(from_bool(rng() & 1));
      imply(n, state, pi, p.back());
    }
    CHECK(fault_detected(n, state) == fault_simulate(n, p, f));
  }
}

TEST_CASE("D-frontier on a single AND") {
  const Netlist n = corpus::load("small/and2.bench");
  const GateId a = *n.find("a"), b = *n.find("b"), c = *n.find("c");
  CircuitState state(n, FaultSite{c, 0u, false});
  imply(n, state, a, LogicValue::One);
  CHECK(state.pin_value(n, c, 0) == LogicValue::D);
  REQUIRE(state.d_frontier().size() == 1);
  CHECK(state.d_frontier()[0] == c);
  imply(n, state, b, LogicValue::One);
  CHECK(state.value(c) == LogicValue::D);
  CHECK(state.d_frontier().empty());
  CHECK(fault_detected(n, state));
}

TEST_CASE("output fault injection") {
  const Netlist n = corpus::load("small/and2.bench");
  const GateId a = *n.find("a"), b = *n.find("b"), c = *n.find("c");
  CircuitState state(n, FaultSite{c, std::nullopt, true});
  imply(n, state, a, LogicValue::Zero);
  CHECK(state.value(c) == LogicValue::Dbar);
  imply(n, state, a, LogicValue::One);
  imply(n, state, b, LogicValue::One);
  CHECK(state.value(c) == LogicValue::One);
}

TEST_CASE("incomplete patterns are rejected") {
  const Netlist n = corpus::load("small/and2.bench");
  const FaultSite f{*n.find("c"), std::nullopt, false};
  CHECK_THROWS_AS(fault_simulate(n, Pattern{LogicValue::One}, f), Error);
  CHECK_THROWS_AS(fault_simulate(n, Pattern{LogicValue::One, LogicValue::X}, f), Error);
  CHECK(fault_simulate(n, Pattern{LogicValue::One, LogicValue::One}, f));
}
