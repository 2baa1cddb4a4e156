// Command-line front end: fault lists, analyses, ATPG runs, the environment server and reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

#include "ffratpg/circuit.hpp"
#include "ffratpg/fault.hpp"
#include "ffratpg/protocol.hpp"
#include "ffratpg/report.hpp"

namespace {

using namespace ffratpg;

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw Error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<FaultSite> load_faults(const Netlist& netlist, const std::string& spec) {
  if (spec == "all" || spec == "ALL") return enumerate_faults(netlist);
  std::ifstream in(spec);
  if (!in) throw Error("cannot read fault list '" + spec + "'");
  return read_fault_list(netlist, in);
}

void write_patterns(const Netlist& netlist, const FaultListRun& run, std::ostream& out) {
  out << "# inputs=";
  const auto pis = netlist.primary_inputs();
  for (std::size_t i = 0; i < pis.size(); ++i) out << (i ? " " : "") << netlist.gate_name(pis[i]);
  out << "\nfault,pattern\n";
  for (const FaultRecord& rec : run.records) {
    if (!rec.result.pattern) continue;
    out << format_fault(netlist, rec.fault) << ',';
    for (LogicValue v : *rec.result.pattern) out << (v == LogicValue::One ? '1' : '0');
    out << '\n';
  }
}

struct AtpgOptions {
  std::string bench;
  std::string faults = "all";
  std::string policy = "ffr";
  std::uint64_t backtrack_limit = kDefaultBacktrackLimit;
  unsigned parallel = 1;
  std::string report;
  std::string patterns;
  std::string endpoint;
  std::size_t arity = EnvConfig{}.action_arity;
};

int run_atpg(const AtpgOptions& o, std::uint64_t seed) {
  if (o.policy == "rl" && o.endpoint.empty()) throw UsageError("--policy rl requires --endpoint");
  auto ctx = make_context(read_bench_file(o.bench));
  const Netlist& n = ctx->netlist;
  const auto faults = load_faults(n, o.faults);

  PolicyFactory factory;
  if (o.policy == "gate") {
    factory = gate_level_heuristic_policy;
  } else if (o.policy == "ffr") {
    factory = ffr_level_heuristic_policy;
  } else {
    const auto [host, port] = parse_endpoint(o.endpoint);
    factory = [ctx, host, port, arity = o.arity]() -> std::unique_ptr<BacktracePolicy> {
      return std::make_unique<RemoteFfrPolicy>(ctx, connect_tcp(host, port), arity);
    };
  }
  const std::uint64_t limit = o.backtrack_limit == 0 ? kUnlimitedBacktracks : o.backtrack_limit;
  const FaultListRun run = run_fault_list(*ctx, faults, factory, limit, o.parallel);

  RunHeader header{n.name(), o.policy, limit, enumerate_faults(n).size(),
                   ctx->ffrs.average_depth()};
  if (!o.report.empty()) {
    Output out(o.report);
    write_run_csv(make_run_file(n, header, run), out.stream());
  }
  if (!o.patterns.empty()) {
    Output out(o.patterns);
    write_patterns(n, run, out.stream());
  }
  const RunTotals& t = run.totals;
  const nlohmann::json summary = {
      {"circuit", n.name()},
      {"policy", o.policy},
      {"backtrack_limit", o.backtrack_limit},
      {"seed", seed},
      {"faults", t.faults},
      {"detected", t.detected},
      {"untestable", t.untestable},
      {"aborted", t.aborted},
      {"backtracks", t.backtracks},
      {"backtrace_steps", t.backtrace_steps},
      {"decisions", t.decisions},
      {"pi_assignments", t.pi_assignments},
      {"ufp_pct", 100.0 * static_cast<double>(t.undetected()) /
                      static_cast<double>(std::max<std::size_t>(header.fault_universe, 1))},
  };
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FFR-driven PODEM test pattern generation"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed recorded with every run (heuristic policies ignore it)");

  std::string bench, out_path;
  bool collapse = false;
  auto* faults = app.add_subcommand("faults", "Enumerate pin-level stuck-at faults");
  faults->add_option("--bench", bench, "Bench netlist")->required();
  faults->add_flag("--collapse", collapse, "Keep one fault per structural equivalence class");
  faults->add_option("-o,--out", out_path, "Output file (default stdout)");

  auto* part = app.add_subcommand("partition", "Fanout-free region partition as CSV");
  part->add_option("--bench", bench, "Bench netlist")->required();
  part->add_option("-o,--out", out_path, "Output file (default stdout)");

  auto* scoap = app.add_subcommand("scoap", "SCOAP measures as CSV");
  scoap->add_option("--bench", bench, "Bench netlist")->required();
  scoap->add_option("-o,--out", out_path, "Output file (default stdout)");

  AtpgOptions atpg_opts;
  auto* atpg = app.add_subcommand("atpg", "Run PODEM over a fault list");
  atpg->add_option("--bench", atpg_opts.bench, "Bench netlist")->required();
  atpg->add_option("--faults", atpg_opts.faults, "Fault list file, or 'all'")
      ->capture_default_str();
  atpg->add_option("--policy", atpg_opts.policy, "Backtrace policy")
      ->check(CLI::IsMember({"gate", "ffr", "rl"}))
      ->capture_default_str();
  atpg->add_option("--backtrack-limit", atpg_opts.backtrack_limit, "Per-fault limit, 0 = none")
      ->capture_default_str();
  atpg->add_option("--parallel", atpg_opts.parallel, "Worker threads")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  atpg->add_option("--report", atpg_opts.report, "Per-fault run CSV");
  atpg->add_option("--patterns", atpg_opts.patterns, "Test patterns CSV");
  atpg->add_option("--endpoint", atpg_opts.endpoint, "host:port of the agent (policy rl)");
  atpg->add_option("--arity", atpg_opts.arity, "Action arity K sent to the agent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  int port = -1;
  auto* serve = app.add_subcommand("serve-env", "Serve environment episodes (stdio by default)");
  serve->add_option("--port", port, "Listen on 127.0.0.1:PORT instead of stdio (0 = any)")
      ->check(CLI::Range(0, 65535));

  std::vector<std::string> run_files;
  auto* report = app.add_subcommand("report", "Compare run CSVs");
  report->add_option("runs", run_files, "Run CSVs from 'atpg --report'")->required();
  report->add_option("-o,--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*faults) {
      const Netlist n = read_bench_file(bench);
      auto list = enumerate_faults(n);
      if (collapse) list = collapse_faults(n, list);
      Output out(out_path);
      write_fault_list(n, list, out.stream());
    } else if (*part) {
      const Netlist n = read_bench_file(bench);
      Output out(out_path);
      write_partition_csv(n, partition(n), out.stream());
    } else if (*scoap) {
      const Netlist n = read_bench_file(bench);
      Output out(out_path);
      write_scoap_csv(n, compute_scoap(n), out.stream());
    } else if (*atpg) {
      return run_atpg(atpg_opts, seed);
    } else if (*serve) {
      if (port < 0) {
        serve_stream(std::cin, std::cout);
      } else {
        std::atomic<bool> stop{false};
        serve_tcp(static_cast<std::uint16_t>(port), stop, [](std::uint16_t bound) {
          std::cerr << "listening on 127.0.0.1:" << bound << std::endl;
        });
      }
    } else if (*report) {
      std::vector<RunFile> runs;
      for (const std::string& path : run_files) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read '" + path + "'");
        runs.push_back(read_run_csv(in, path));
      }
      Output out(out_path);
      write_report_csv(build_report(runs), out.stream());
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
