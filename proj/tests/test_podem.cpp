#include <doctest.h>

#include <numeric>

#include "corpus.hpp"
#include "ffratpg/circuit.hpp"
#include "ffratpg/podem.hpp"
#include "oracles.hpp"

using namespace ffratpg;

namespace {

std::uint64_t sum(const std::vector<std::uint64_t>& v) {
  return std::accumulate(v.begin(), v.end(), std::uint64_t{0});
}

}  // namespace

TEST_CASE("AND output stuck-at-0 needs both inputs high") {
  const auto ctx = make_context(corpus::load("small/and2.bench"));
  const Netlist& n = ctx->netlist;
  GateLevelHeuristicPolicy policy;
  const auto r = generate_test(*ctx, {*n.find("c"), std::nullopt, false}, policy);
  CHECK(r.status == AtpgStatus::Detected);
  CHECK(r.backtracks == 0);
  REQUIRE(r.pattern);
  CHECK(*r.pattern == Pattern{LogicValue::One, LogicValue::One});
}

TEST_CASE("constant node fault is untestable after exhausting the search") {
  const auto ctx = make_context(corpus::load("small/contradiction.bench"));
  const Netlist& n = ctx->netlist;
  for (auto make : {gate_level_heuristic_policy, ffr_level_heuristic_policy}) {
    auto policy = make();
    const auto r = generate_test(*ctx, {*n.find("z"), std::nullopt, false}, *policy,
                                 kUnlimitedBacktracks);
    CHECK(r.status == AtpgStatus::Untestable);
    CHECK_FALSE(r.pattern);
  }
}

TEST_CASE("faults in dead logic are untestable without search") {
  const auto ctx = make_context(corpus::load("small/dead_branch.bench"));
  const Netlist& n = ctx->netlist;
  GateLevelHeuristicPolicy policy;
  const auto r = generate_test(*ctx, {*n.find("m"), std::nullopt, true}, policy);
  CHECK(r.status == AtpgStatus::Untestable);
  CHECK(r.decisions == 0);
  CHECK(r.backtracks == 0);
}

TEST_CASE("classification matches exhaustive search on the small corpus") {
  for (const auto& file : oracle::bench_files(std::string(FFRATPG_CORPUS_DIR) + "/small")) {
    CAPTURE(file);
    const auto ctx = make_context(read_bench_file(file));
    const Netlist& n = ctx->netlist;
    for (auto make : {gate_level_heuristic_policy, ffr_level_heuristic_policy}) {
      auto policy = make();
      for (const FaultSite& f : enumerate_faults(n)) {
        CAPTURE(format_fault(n, f));
        const auto r = generate_test(*ctx, f, *policy, kUnlimitedBacktracks);
        const bool testable = oracle::find_test(n, f).has_value();
        CHECK(r.status == (testable ? AtpgStatus::Detected : AtpgStatus::Untestable));
        if (r.pattern) CHECK(fault_simulate(n, *r.pattern, f));
        CHECK(sum(r.pi_backtrack_counts) == r.backtracks);
        CHECK(sum(r.pi_visit_counts) == r.pi_assignments);
      }
    }
  }
}

TEST_CASE("gate-level backtrace takes the shallowest X fanin") {
  const Netlist n = parse_bench(
      "INPUT(a)\nINPUT(b)\nOUTPUT(y)\n"
      "p = NOT(a)\nq = BUF(p)\nr = BUF(q)\ny = AND(r, b)\n");
  const auto ctx = make_context(n);
  CircuitState state(ctx->netlist, {*n.find("y"), std::nullopt, false});
  GateLevelHeuristicPolicy policy;
  const PiChoice c = policy.backtrace(*ctx, state, {*n.find("y"), true});
  CHECK(c.pi == *n.find("b"));
  CHECK(c.value);
  CHECK(c.steps == 1);
}

TEST_CASE("level ties go to the lower gate id") {
  const Netlist n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NOR(b, a)\n");
  const auto ctx = make_context(n);
  CircuitState state(ctx->netlist, {*n.find("y"), std::nullopt, false});
  for (auto make : {gate_level_heuristic_policy, ffr_level_heuristic_policy}) {
    auto policy = make();
    for (int i = 0; i < 3; ++i) {
      const PiChoice c = policy->backtrace(*ctx, state, {*n.find("y"), true});
      CHECK(c.pi == std::min(*n.find("a"), *n.find("b")));
      CHECK_FALSE(c.value);
    }
  }
}

TEST_CASE("objective already on an input costs one step") {
  const auto ctx = make_context(corpus::load("small/and2.bench"));
  const Netlist& n = ctx->netlist;
  CircuitState state(n, {*n.find("c"), std::nullopt, false});
  for (auto make : {gate_level_heuristic_policy, ffr_level_heuristic_policy}) {
    const PiChoice c = make()->backtrace(*ctx, state, {*n.find("a"), false});
    CHECK(c.pi == *n.find("a"));
    CHECK(c.steps == 1);
  }
}

TEST_CASE("shallow-first choice is costly when a side input is already set") {
  const auto ctx = make_context(corpus::load("small/shallow_trap.bench"));
  const Netlist& n = ctx->netlist;
  auto id = [&](const char* s) { return *n.find(s); };
  CircuitState state(n, {id("obj"), std::nullopt, false});
  imply(n, state, id("x7"), LogicValue::Zero);

  // Gate by gate: obj -> y (level 2 beats x at level 3) -> a -> x1.
  GateLevelHeuristicPolicy gate;
  CircuitState g = state;
  int decisions = 0;
  while (g.value(id("obj")) == LogicValue::X) {
    const PiChoice c = gate.backtrace(*ctx, g, {id("obj"), true});
    if (decisions == 0) CHECK(c.pi == id("x1"));
    imply(n, g, c.pi, from_bool(c.value));
    ++decisions;
  }
  CHECK(decisions == 6);

  // A region hop can name x8 directly; one assignment settles the objective.
  const auto candidates = ffr_hop_candidates(*ctx, state, {id("obj"), true});
  const auto x8 = std::find_if(candidates.begin(), candidates.end(),
                               [&](const FfrTarget& t) { return t.fanin == id("x8"); });
  REQUIRE(x8 != candidates.end());
  CHECK(x8->required_value);
  CircuitState f = state;
  imply(n, f, id("x8"), from_bool(x8->required_value));
  CHECK(good_value(f.value(id("obj"))) == Ternary::One);  // D: the fault effect is here
}

TEST_CASE("region hops shorten the decision sequence on the reconvergent example") {
  const auto ctx = make_context(corpus::load("small/stem_reconv.bench"));
  const Netlist& n = ctx->netlist;
  CircuitState state(n, {*n.find("G8"), std::nullopt, true});
  const PiChoice gate = GateLevelHeuristicPolicy().backtrace(*ctx, state, {*n.find("G8"), false});
  const PiChoice ffr = FfrLevelHeuristicPolicy().backtrace(*ctx, state, {*n.find("G8"), false});
  // Gate by gate: G8 -> G6 -> G1 -> a. By region: G8 -> G1 -> a.
  CHECK(gate.steps == 3);
  CHECK(ffr.steps == 2);
  CHECK(gate.pi == ffr.pi);
}

TEST_CASE("both policies agree on a chain") {
  const auto ctx = make_context(corpus::load("small/not_chain.bench"));
  for (const FaultSite& f : enumerate_faults(ctx->netlist)) {
    auto a = generate_test(*ctx, f, *gate_level_heuristic_policy());
    auto b = generate_test(*ctx, f, *ffr_level_heuristic_policy());
    CHECK(a.pattern == b.pattern);
    CHECK(a.backtracks == b.backtracks);
  }
}

TEST_CASE("backtrack limit aborts") {
  const auto ctx = make_context(corpus::load("small/absorption.bench"));
  const Netlist& n = ctx->netlist;
  auto policy = gate_level_heuristic_policy();
  const FaultSite f{*n.find("t"), std::nullopt, false};
  const auto full = generate_test(*ctx, f, *policy, kUnlimitedBacktracks);
  REQUIRE(full.status == AtpgStatus::Untestable);
  REQUIRE(full.backtracks >= 2);
  const auto cut = generate_test(*ctx, f, *policy, 1);
  CHECK(cut.status == AtpgStatus::Aborted);
  CHECK(cut.backtracks == 1);
  CHECK_THROWS_AS(PodemSearch(*ctx, f, 0), Error);
}

TEST_CASE("parallel runs reduce deterministically") {
  const auto ctx = make_context(corpus::load("c432.bench"));
  const auto faults = enumerate_faults(ctx->netlist);
  const auto one = run_fault_list(*ctx, faults, ffr_level_heuristic_policy, 20, 1);
  const auto many = run_fault_list(*ctx, faults, ffr_level_heuristic_policy, 20, 6);
  CHECK(one.totals == many.totals);
  REQUIRE(one.records.size() == many.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].fault == many.records[i].fault);
    CHECK(one.records[i].result.pattern == many.records[i].result.pattern);
    CHECK(one.records[i].result.backtrace_steps == many.records[i].result.backtrace_steps);
  }
  CHECK(one.totals.faults == faults.size());
  CHECK(one.totals.detected + one.totals.untestable + one.totals.aborted == faults.size());
}

TEST_CASE("decisions count hops, assignments count inputs") {
  const auto ctx = make_context(corpus::load("c17.bench"));
  const auto faults = enumerate_faults(ctx->netlist);
  const auto gate = run_fault_list(*ctx, faults, gate_level_heuristic_policy, 100);
  const auto ffr = run_fault_list(*ctx, faults, ffr_level_heuristic_policy, 100);
  for (const auto* run : {&gate, &ffr}) {
    CHECK(run->totals.decisions == run->totals.backtrace_steps);
    CHECK(run->totals.decisions >= run->totals.pi_assignments);
  }
  CHECK(ffr.totals.decisions <= gate.totals.decisions);
}

TEST_CASE("invalid fault sites are rejected") {
  const auto ctx = make_context(corpus::load("small/and2.bench"));
  const Netlist& n = ctx->netlist;
  GateLevelHeuristicPolicy policy;
  CHECK_THROWS_AS(generate_test(*ctx, {*n.find("a"), std::nullopt, false}, policy), Error);
  CHECK_THROWS_AS(generate_test(*ctx, {*n.find("c"), 2u, false}, policy), Error);
}

TEST_CASE("status spelling") {
  for (AtpgStatus s : {AtpgStatus::Detected, AtpgStatus::Untestable, AtpgStatus::Aborted}) {
    CHECK(status_from_string(to_string(s)) == s);
  }
  CHECK_FALSE(status_from_string("detected"));
}
