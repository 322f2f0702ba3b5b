#include "doctest.h"
#include "ppcatt/batch.hpp"

using namespace ppcatt;

TEST_SUITE("batch") {

TEST_CASE("parallel batch reproduces the serial reference bit for bit") {
  std::vector<Scenario> jobs;
  for (const auto& base : builtin_scenarios()) {
    Scenario s = base;
    s.duration = 15.0;
    jobs.push_back(s);
    s.adaptive_ppf = false;
    jobs.push_back(s);
    s.controller = ControllerKind::benchmark;
    jobs.push_back(s);
  }
  const auto serial = run_batch_serial(jobs);
  const auto parallel = run_batch(jobs);
  REQUIRE(serial.size() == jobs.size());
  REQUIRE(parallel.size() == jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CHECK(serial[i].scenario == jobs[i].name);
    CHECK(parallel[i].scenario == serial[i].scenario);
    CHECK(parallel[i].controller == serial[i].controller);
    CHECK(parallel[i].ok() == serial[i].ok());
    CHECK(parallel[i].records == serial[i].records);
  }
  CHECK(batch_threads() >= 1);
}

TEST_CASE("construction errors become step-0 failures") {
  Scenario bad = *builtin_scenario("normal");
  bad.ppf_omega = reference_rate_envelope_table();
  Scenario good = *builtin_scenario("normal");
  good.duration = 1.0;
  const auto logs = run_batch({bad, good});
  REQUIRE(logs.size() == 2);
  REQUIRE_FALSE(logs[0].ok());
  CHECK(logs[0].failure->step == 0);
  CHECK(logs[0].records.empty());
  CHECK(logs[1].ok());
  CHECK(run_batch({}).empty());
}

}  // TEST_SUITE
