#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ffratpg/podem.hpp"

namespace ffratpg {

/// Metadata written as `# key=value` lines at the top of a run CSV.
struct RunHeader {
  std::string circuit;
  std::string policy;
  std::uint64_t backtrack_limit = kDefaultBacktrackLimit;  // 0 in the file means unlimited
  std::size_t fault_universe = 0;
  double ffr_avg_depth = 0;
};

struct RunRow {
  std::string fault;
  AtpgStatus status = AtpgStatus::Untestable;
  std::uint64_t backtracks = 0;
  std::uint64_t backtrace_steps = 0;
  std::uint64_t decisions = 0;
  std::uint64_t pi_assignments = 0;
};

struct RunFile {
  RunHeader header;
  std::vector<RunRow> rows;
  RunTotals totals() const;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

RunFile make_run_file(const Netlist& netlist, RunHeader header, const FaultListRun& run);
void write_run_csv(const RunFile& run, std::ostream& out);
/// Throws SchemaError on missing header keys, unexpected columns or malformed values.
RunFile read_run_csv(std::istream& in, const std::string& source = "run");

/// One line of the comparison table. Baseline columns compare against the gate-level run of the
/// same circuit and are empty when there is none.
struct ReportRow {
  std::string circuit;
  std::string policy;
  RunTotals totals;
  std::size_t fault_universe = 0;
  double ffr_avg_depth = 0;
  std::optional<double> red1;  // % fewer backtracks than gate-level
  std::optional<double> red2;  // % fewer backtrace steps than gate-level
  std::optional<long long> diff;  // undetected(gate) - undetected(this)
  std::optional<double> imp;   // diff as % of undetected(gate)
  std::optional<double> decision_ratio;  // decisions(gate) / decisions(this)
  double ufp = 0;              // undetected as % of the fault universe
};

/// Groups runs by circuit. Runs of one circuit must share backtrack limit, fault universe and
/// fault list, otherwise SchemaError.
std::vector<ReportRow> build_report(const std::vector<RunFile>& runs);
void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out);

}  // namespace ffratpg
