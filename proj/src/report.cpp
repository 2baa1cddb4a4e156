#include "ffratpg/report.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ffratpg {

namespace {

constexpr const char* kColumns = "fault,status,backtracks,backtrace_steps,decisions,pi_assignments";

std::uint64_t to_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw SchemaError("bad " + what + " '" + text + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string format_pct(std::optional<double> v) {
  if (!v) return {};
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << *v;
  return os.str();
}

}  // namespace

RunTotals RunFile::totals() const {
  RunTotals t;
  t.faults = rows.size();
  for (const RunRow& r : rows) {
    switch (r.status) {
      case AtpgStatus::Detected: ++t.detected; break;
      case AtpgStatus::Untestable: ++t.untestable; break;
      case AtpgStatus::Aborted: ++t.aborted; break;
    }
    t.backtracks += r.backtracks;
    t.backtrace_steps += r.backtrace_steps;
    t.decisions += r.decisions;
    t.pi_assignments += r.pi_assignments;
  }
  return t;
}

RunFile make_run_file(const Netlist& netlist, RunHeader header, const FaultListRun& run) {
  RunFile file{std::move(header), {}};
  for (const FaultRecord& rec : run.records) {
    const AtpgResult& r = rec.result;
    file.rows.push_back({format_fault(netlist, rec.fault), r.status, r.backtracks,
                         r.backtrace_steps, r.decisions, r.pi_assignments});
  }
  return file;
}

void write_run_csv(const RunFile& run, std::ostream& out) {
  const RunHeader& h = run.header;
  out << "# circuit=" << h.circuit << '\n'
      << "# policy=" << h.policy << '\n'
      << "# backtrack_limit="
      << (h.backtrack_limit == kUnlimitedBacktracks ? 0 : h.backtrack_limit) << '\n'
      << "# fault_universe=" << h.fault_universe << '\n'
      << "# ffr_avg_depth=" << std::fixed << std::setprecision(4) << h.ffr_avg_depth << '\n';
  out << kColumns << '\n';
  for (const RunRow& r : run.rows) {
    out << r.fault << ',' << to_string(r.status) << ',' << r.backtracks << ','
        << r.backtrace_steps << ',' << r.decisions << ',' << r.pi_assignments << '\n';
  }
}

RunFile read_run_csv(std::istream& in, const std::string& source) {
  RunFile run;
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t line_no = 0;
  bool saw_columns = false;
  auto fail = [&](const std::string& msg) {
    throw SchemaError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    if (!saw_columns) {
      if (line != kColumns) fail("expected columns '" + std::string(kColumns) + "'");
      saw_columns = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
    if (cells.size() != 6) fail("expected 6 fields, got " + std::to_string(cells.size()));
    RunRow row;
    row.fault = cells[0];
    const auto status = status_from_string(cells[1]);
    if (!status) fail("unknown status '" + cells[1] + "'");
    row.status = *status;
    try {
      row.backtracks = to_u64(cells[2], "backtracks");
      row.backtrace_steps = to_u64(cells[3], "backtrace_steps");
      row.decisions = to_u64(cells[4], "decisions");
      row.pi_assignments = to_u64(cells[5], "pi_assignments");
    } catch (const SchemaError& e) {
      fail(e.what());
    }
    run.rows.push_back(std::move(row));
  }
  if (!saw_columns) throw SchemaError(source + ": missing column header");
  for (const char* key :
       {"circuit", "policy", "backtrack_limit", "fault_universe", "ffr_avg_depth"}) {
    if (!meta.count(key)) throw SchemaError(source + ": missing header '# " + key + "='");
  }
  RunHeader& h = run.header;
  h.circuit = meta["circuit"];
  h.policy = meta["policy"];
  try {
    h.backtrack_limit = to_u64(meta["backtrack_limit"], "backtrack_limit");
    if (h.backtrack_limit == 0) h.backtrack_limit = kUnlimitedBacktracks;
    h.fault_universe = to_u64(meta["fault_universe"], "fault_universe");
    h.ffr_avg_depth = std::stod(meta["ffr_avg_depth"]);
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception&) {
    throw SchemaError(source + ": bad ffr_avg_depth '" + meta["ffr_avg_depth"] + "'");
  }
  return run;
}

std::vector<ReportRow> build_report(const std::vector<RunFile>& runs) {
  std::map<std::string, std::vector<const RunFile*>> by_circuit;
  for (const RunFile& r : runs) by_circuit[r.header.circuit].push_back(&r);

  std::vector<ReportRow> out;
  for (const auto& [circuit, group] : by_circuit) {
    const RunFile& first = *group.front();
    const RunFile* gate = nullptr;
    for (const RunFile* r : group) {
      const auto mismatch = [&](const std::string& what) {
        throw SchemaError("runs for circuit '" + circuit + "' disagree on " + what + " (" +
                          first.header.policy + " vs " + r->header.policy + ")");
      };
      if (r->header.backtrack_limit != first.header.backtrack_limit) mismatch("backtrack limit");
      if (r->header.fault_universe != first.header.fault_universe) mismatch("fault universe");
      if (r->rows.size() != first.rows.size()) mismatch("fault list length");
      for (std::size_t i = 0; i < r->rows.size(); ++i) {
        if (r->rows[i].fault != first.rows[i].fault) mismatch("fault list");
      }
      if (r->header.policy == "gate" && !gate) gate = r;
    }
    const RunTotals base = gate ? gate->totals() : RunTotals{};
    for (const RunFile* r : group) {
      ReportRow row;
      row.circuit = circuit;
      row.policy = r->header.policy;
      row.totals = r->totals();
      row.fault_universe = r->header.fault_universe;
      row.ffr_avg_depth = r->header.ffr_avg_depth;
      const RunTotals& t = row.totals;
      row.ufp = row.fault_universe
                    ? 100.0 * static_cast<double>(t.undetected()) /
                          static_cast<double>(row.fault_universe)
                    : 0.0;
      if (gate) {
        auto reduction = [](std::uint64_t b, std::uint64_t v) -> std::optional<double> {
          if (b == 0) return v == 0 ? std::optional<double>(0.0) : std::nullopt;
          return 100.0 * (static_cast<double>(b) - static_cast<double>(v)) /
                 static_cast<double>(b);
        };
        row.red1 = reduction(base.backtracks, t.backtracks);
        row.red2 = reduction(base.backtrace_steps, t.backtrace_steps);
        row.diff = static_cast<long long>(base.undetected()) - static_cast<long long>(t.undetected());
        row.imp = reduction(base.undetected(), t.undetected());
        if (t.decisions) {
          row.decision_ratio =
              static_cast<double>(base.decisions) / static_cast<double>(t.decisions);
        }
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "circuit,policy,faults,backtracks,backtrace_steps,decisions,red1_pct,red2_pct,"
         "undetected,untestable,aborted,ufp_pct,diff,imp_pct,decision_ratio,ffr_avg_depth\n";
  for (const ReportRow& r : rows) {
    const RunTotals& t = r.totals;
    std::ostringstream ratio;
    if (r.decision_ratio) ratio << std::fixed << std::setprecision(3) << *r.decision_ratio;
    std::ostringstream depth;
    depth << std::fixed << std::setprecision(4) << r.ffr_avg_depth;
    out << r.circuit << ',' << r.policy << ',' << t.faults << ',' << t.backtracks << ','
        << t.backtrace_steps << ',' << t.decisions << ',' << format_pct(r.red1) << ','
        << format_pct(r.red2) << ',' << t.undetected() << ',' << t.untestable << ','
        << t.aborted << ',' << format_pct(r.ufp) << ','
        << (r.diff ? std::to_string(*r.diff) : std::string()) << ',' << format_pct(r.imp)
        << ',' << ratio.str() << ',' << depth.str() << '\n';
  }
}

}  // namespace ffratpg
