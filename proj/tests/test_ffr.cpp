#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "ffratpg/circuit.hpp"
#include "ffratpg/podem.hpp"
#include "oracles.hpp"

using namespace ffratpg;

namespace {

std::vector<std::string> all_corpus() {
  auto files = oracle::bench_files(FFRATPG_CORPUS_DIR);
  auto small = oracle::bench_files(std::string(FFRATPG_CORPUS_DIR) + "/small");
  files.insert(files.end(), small.begin(), small.end());
  return files;
}

std::vector<LogicValue> all_x(const Netlist& n) { return std::vector(n.size(), LogicValue::X); }

}  // namespace

TEST_CASE("partition matches the union-find oracle") {
  for (const auto& file : all_corpus()) {
    CAPTURE(file);
    const Netlist n = read_bench_file(file);
    const FfrPartition p = partition(n);
    const auto heads = oracle::region_heads(n);

    std::size_t total = 0;
    std::vector<int> seen(n.size(), 0);
    for (std::size_t r = 0; r < p.regions().size(); ++r) {
      const Ffr& ffr = p.region(r);
      total += ffr.members.size();
      CHECK(std::is_sorted(ffr.members.begin(), ffr.members.end()));
      CHECK(std::find(ffr.members.begin(), ffr.members.end(), ffr.head) != ffr.members.end());
      for (GateId m : ffr.members) {
        ++seen[m];
        CHECK(p.region_of(m) == r);
        CHECK(heads[m] == ffr.head);
      }
    }
    CHECK(total == n.size());
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("regions are single-fanout trees with exact boundaries and depths") {
  for (const auto& file : all_corpus()) {
    CAPTURE(file);
    const Netlist n = read_bench_file(file);
    const FfrPartition p = partition(n);
    for (std::size_t r = 0; r < p.regions().size(); ++r) {
      const Ffr& ffr = p.region(r);
      std::size_t internal_edges = 0;
      std::set<GateId> boundary;
      for (GateId m : ffr.members) {
        const Gate& g = n.gate(m);
        if (m != ffr.head) {
          REQUIRE(g.fanouts.size() == 1);
          CHECK_FALSE(g.is_po);
          CHECK(p.region_of(g.fanouts[0]) == r);
        } else {
          CHECK((g.fanouts.size() != 1 || g.is_po || g.kind == GateKind::Input));
        }
        for (GateId f : g.fanins) {
          if (p.region_of(f) == r) ++internal_edges;
          else boundary.insert(f);
        }
      }
      CHECK(internal_edges + 1 == ffr.members.size());
      CHECK(ffr.boundary_fanins == std::vector<GateId>(boundary.begin(), boundary.end()));

      std::function<int(GateId)> chain = [&](GateId g) -> int {
        if (n.is_input(g)) return 0;
        int best = 0;
        for (GateId f : n.gate(g).fanins) {
          if (p.region_of(f) == r) best = std::max(best, chain(f));
        }
        return best + 1;
      };
      CHECK(ffr.depth == chain(ffr.head));
    }
  }
}

TEST_CASE("region backtrace equals the gate-by-gate walk on every internal path") {
  for (const auto& file : all_corpus()) {
    const Netlist n = read_bench_file(file);
    if (oracle::cell_count(n) > 100) continue;
    CAPTURE(file);
    const FfrPartition p = partition(n);
    const auto values = all_x(n);
    for (const Gate& obj : n.gates()) {
      if (obj.kind == GateKind::Input) continue;
      const std::size_t r = p.region_of(obj.id);
      // Every downward path inside the region from the objective to a boundary fanin.
      std::map<GateId, std::vector<std::vector<GateId>>> paths;
      std::vector<GateId> path;
      std::function<void(GateId)> walk = [&](GateId g) {
        path.push_back(g);
        for (GateId f : n.gate(g).fanins) {
          if (p.region_of(f) == r) walk(f);
          else paths[f].push_back(path);
        }
        path.pop_back();
      };
      walk(obj.id);

      for (bool v : {false, true}) {
        const auto targets = ffr_backtrace_targets(n, p, obj.id, v, values);
        REQUIRE(targets.size() == paths.size());
        for (const FfrTarget& t : targets) {
          REQUIRE(paths.count(t.fanin));
          auto& candidates = paths[t.fanin];
          // A tree reaches each fanin at most once per entry pin, so every path agrees unless the
          // fanin feeds the subtree on several pins; then the shortest (then lowest entry) rules.
          std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a.back() < b.back();
          });
          CHECK(t.required_value == oracle::walk_backtrace(n, candidates.front(), v));
          CHECK(t.gate_hops == candidates.front().size());
          CHECK(t.feasible_now);
        }
        CHECK(std::is_sorted(targets.begin(), targets.end(),
                             [](const auto& a, const auto& b) { return a.fanin < b.fanin; }));
      }
    }
  }
}

TEST_CASE("every path to a fanin maps consistently with its parity") {
  const Netlist n = corpus::load("small/stem_reconv.bench");
  const FfrPartition p = partition(n);
  const GateId g1 = *n.find("G1"), g8 = *n.find("G8");
  const auto paths = ffr_paths(n, p, g1, g8);
  REQUIRE(paths.size() == 2);
  for (const FfrPath& path : paths) {
    std::vector<GateId> down(path.path_gates.rbegin(), path.path_gates.rend());
    CHECK(oracle::walk_backtrace(n, down, true) == !path.parity);
  }
}

TEST_CASE("reconvergent stem topology") {
  const Netlist n = corpus::load("small/stem_reconv.bench");
  const FfrPartition p = partition(n);
  auto id = [&](const char* s) { return *n.find(s); };
  CHECK(p.is_head(id("G1")));
  const Ffr& top = p.region_containing(id("G8"));
  CHECK(top.head == id("G8"));
  std::vector<GateId> expect{id("G4"), id("G6"), id("G7"), id("G8")};
  std::sort(expect.begin(), expect.end());
  CHECK(top.members == expect);

  // The region hop reaches G1 directly; gate-by-gate needs G8 -> G6 -> G1.
  const auto targets = ffr_backtrace_targets(n, p, id("G8"), true, all_x(n));
  const auto g1 = std::find_if(targets.begin(), targets.end(),
                               [&](const FfrTarget& t) { return t.fanin == id("G1"); });
  REQUIRE(g1 != targets.end());
  CHECK(g1->gate_hops == 2);
  CHECK(ffr_paths(n, p, id("G1"), id("G8")).back().path_gates.size() == 3);
}

TEST_CASE("pure inverter chain is one region") {
  const Netlist n = corpus::load("small/not_chain.bench");
  const FfrPartition p = partition(n);
  const Ffr& r = p.region_containing(*n.find("z"));
  CHECK(r.members.size() == 2);
  CHECK(r.depth == 2);
  CHECK(p.region_containing(*n.find("a")).depth == 0);
  CHECK(p.average_depth() == doctest::Approx(2.0));
}

TEST_CASE("value mapping through AND trees and inverters") {
  const Netlist n = parse_bench(
      "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(y)\nOUTPUT(z)\n"
      "t = AND(a, b)\ny = AND(t, c)\nu = NOT(d)\nz = OR(u, c)\n");
  const FfrPartition p = partition(n);
  const auto ones = ffr_backtrace_targets(n, p, *n.find("y"), true, all_x(n));
  REQUIRE(ones.size() == 3);
  for (const auto& t : ones) CHECK(t.required_value);
  const auto z = ffr_backtrace_targets(n, p, *n.find("z"), true, all_x(n));
  const auto d = std::find_if(z.begin(), z.end(), [&](auto& t) { return t.fanin == *n.find("d"); });
  REQUIRE(d != z.end());
  CHECK_FALSE(d->required_value);
}

TEST_CASE("targets are limited to the objective's subtree") {
  const Netlist n = corpus::load("small/stem_reconv.bench");
  const FfrPartition p = partition(n);
  const auto t = ffr_backtrace_targets(n, p, *n.find("G6"), true, all_x(n));
  std::vector<GateId> fanins;
  for (const auto& x : t) fanins.push_back(x.fanin);
  std::vector<GateId> expect{*n.find("G1"), *n.find("G2")};
  std::sort(expect.begin(), expect.end());
  CHECK(fanins == expect);
}

TEST_CASE("feasibility reflects current values") {
  const Netlist n = corpus::load("small/and2.bench");
  const FfrPartition p = partition(n);
  auto values = all_x(n);
  values[*n.find("a")] = LogicValue::Zero;
  values[*n.find("b")] = LogicValue::One;
  const auto t = ffr_backtrace_targets(n, p, *n.find("c"), true, values);
  REQUIRE(t.size() == 2);
  CHECK_FALSE(t[0].feasible_now);
  CHECK(t[1].feasible_now);
}

TEST_CASE("objective on a primary input is rejected") {
  const Netlist n = corpus::load("small/and2.bench");
  CHECK_THROWS_AS(ffr_backtrace_targets(n, partition(n), *n.find("a"), true, all_x(n)), Error);
}

TEST_CASE("c432 partition summary") {
  const Netlist n = corpus::load("c432.bench");
  const FfrPartition p = partition(n);
  std::size_t total = 0;
  for (const Ffr& r : p.regions()) total += r.members.size();
  CHECK(total == n.size());
  CHECK(p.average_depth() > 1.0);
  std::ostringstream csv;
  write_partition_csv(n, p, csv);
  CHECK(csv.str().rfind("ffr_head,member_count,depth,fanin_count\n", 0) == 0);
  CHECK(csv.str().find("# average_depth=") != std::string::npos);
}
