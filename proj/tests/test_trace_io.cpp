#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ppcatt/trace_io.hpp"

using namespace ppcatt;

namespace {

SimLog short_log() {
  Scenario s = *builtin_scenario("robustness");
  s.duration = 2.0;
  return run(s);
}

}  // namespace

TEST_SUITE("trace_io") {

TEST_CASE("header lists every column") {
  const auto& cols = trace_columns();
  CHECK(cols.front() == "t");
  CHECK(cols[1] == "q_ev_x");
  CHECK(cols[4] == "q_e0");
  CHECK(cols.back() == "singular");
  CHECK(cols.size() == 1 + 3 + 1 + 15 * 3 + 4 + 3);
  std::ostringstream out;
  write_trace_csv(out, short_log());
  const std::string text = out.str();
  std::string header = text.substr(0, text.find('\n'));
  std::string joined;
  for (const auto& c : cols) joined += (joined.empty() ? "" : ",") + c;
  CHECK(header == joined);
}

TEST_CASE("write then read reproduces records exactly") {
  const SimLog log = short_log();
  std::stringstream buf;
  write_trace_csv(buf, log);
  const SimLog back = read_trace_csv(buf);
  REQUIRE(back.records.size() == log.records.size());
  CHECK(back.records == log.records);
}

TEST_CASE("malformed traces are rejected") {
  std::ostringstream out;
  write_trace_csv(out, short_log());
  const std::string good = out.str();
  const std::size_t eol = good.find('\n');
  {
    std::istringstream in("t,q_ev_x\n0,0\n");
    CHECK_THROWS_AS(read_trace_csv(in), TraceFormatError);
  }
  {
    std::istringstream in(good.substr(0, eol + 1) + "1,2,3\n");
    CHECK_THROWS_AS(read_trace_csv(in), TraceFormatError);
  }
  {
    std::string row = good.substr(eol + 1, good.find('\n', eol + 1) - eol - 1);
    row.replace(0, row.find(','), "abc");
    std::istringstream in(good.substr(0, eol + 1) + row + "\n");
    CHECK_THROWS_AS(read_trace_csv(in), TraceFormatError);
  }
  {
    std::istringstream in("");
    CHECK_THROWS_AS(read_trace_csv(in), TraceFormatError);
  }
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("report entries carry the verdict") {
  const Scenario s = *builtin_scenario("normal");
  Scenario shortened = s;
  shortened.duration = 2.0;
  const SimLog log = run(shortened);
  const RunReport r = make_report(shortened, log);
  const KeyValues kv = report_entries(r, "x.");
  const auto find = [&](const std::string& k) -> std::string {
    for (const auto& [key, value] : kv)
      if (key == k) return value;
    return "<missing>";
  };
  CHECK(find("x.pass") == (r.verdict.pass() ? "1" : "0"));
  CHECK(find("x.scenario") == "normal");
  CHECK(find("x.records") == "201");
  CHECK(find("x.ppf_q.t1") != "<missing>");
  std::ostringstream out;
  write_kv(out, kv);
  CHECK(out.str().find("x.pass=") != std::string::npos);
}

}  // TEST_SUITE
