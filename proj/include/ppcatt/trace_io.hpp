#pragma once

// Trace CSV and run reports.
//
// trace.csv has one header row and one row per record. Columns are fixed
// (see trace_columns()); numbers are written with 17 significant digits so
// reading a trace back reproduces the log exactly. Flags are 0/1.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppcatt/monitor.hpp"
#include "ppcatt/simulator.hpp"

namespace ppcatt {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& trace_columns();

void write_trace_csv(std::ostream& out, const SimLog& log);
void write_trace_csv(const std::filesystem::path& path, const SimLog& log);

/// Parses the records of a trace. Scenario metadata is not stored in the
/// file, so only records are filled in.
SimLog read_trace_csv(std::istream& in);
SimLog read_trace_csv(const std::filesystem::path& path);

/// Everything a report needs about one run.
struct RunReport {
  const Scenario* scenario{nullptr};
  const SimLog* log{nullptr};
  RequirementVerdict verdict;
  GainConditionReport gains;
  LyapunovTrace lyapunov;
  double t1_q{0.0};
  double t1_omega{0.0};
};

/// Builds a report: solves the envelopes, checks gains, verifies the log.
RunReport make_report(const Scenario& scenario, const SimLog& log);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat key/value view of a report, keys prefixed with `prefix`.
KeyValues report_entries(const RunReport& r, const std::string& prefix = "");

void write_kv(std::ostream& out, const KeyValues& kv);
void write_report_txt(std::ostream& out, const RunReport& r);

/// Writes trace.csv, report.txt and report.kv into dir (created if needed).
void write_run_outputs(const std::filesystem::path& dir, const RunReport& r);

std::string format_double(double x);

}  // namespace ppcatt
