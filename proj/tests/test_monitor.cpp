#include <cmath>
#include <limits>

#include "doctest.h"
#include "ppcatt/monitor.hpp"

using namespace ppcatt;

namespace {

const NominalPpf kPq = NominalPpf::solve(reference_attitude_envelope());
const NominalPpf kPw = NominalPpf::solve(default_rate_envelope());

// Ten-second synthetic run sampled at 1 s with a pulse on [3, 3.5).
Scenario synthetic_scenario() {
  Scenario s;
  s.duration = 10.0;
  s.dt = 1.0;
  s.disturbance.pulses = {{3.0, 0.5, Vec3::Constant(0.1)}};
  s.requirements.settle_threshold = 0.01;
  s.requirements.settle_time = 5.0;
  s.requirements.terminal_error = 0.005;
  s.requirements.terminal_fraction = 0.2;
  s.requirements.recovery_limit = 5.0;
  return s;
}

SimLog synthetic_log(const std::vector<double>& err) {
  SimLog log;
  log.dt = 1.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    SimRecord r;
    r.t = static_cast<double>(i);
    r.q_ev = Vec3(err[i], 0.0, 0.0);
    r.q_e0 = std::sqrt(1.0 - err[i] * err[i]);
    r.rho_q = Vec3::Constant(0.02);
    log.records.push_back(r);
  }
  return log;
}

}  // namespace

TEST_SUITE("monitor") {

TEST_CASE("default gains satisfy S2..S4 and the K_b condition") {
  const GainConditionReport r = check_gains(ControllerGains{}, kPq, kPw);
  CHECK(r.S2 == doctest::Approx(7.0));
  CHECK(r.S3 == doctest::Approx(2.5));
  CHECK(r.S4 == doctest::Approx(3.0));
  CHECK(r.kb_residual == doctest::Approx(-2.0));
  CHECK(r.pass());
}

TEST_CASE("S1 is reported but advisory") {
  const GainConditionReport r = check_gains(ControllerGains{}, kPq, kPw, 0.2);
  CHECK(r.l_max == doctest::Approx(0.15));
  CHECK(r.S1 == doctest::Approx(0.2 * 0.017 - 4.0 * 0.15));
  CHECK_FALSE(r.s1_ok);
  CHECK(r.pass());
}

TEST_CASE("campaign gains pass") {
  const GainConditionReport r = check_gains(campaign_gains(), kPq, kPw);
  CHECK(r.S4 == doctest::Approx(0.1));
  CHECK(r.kb_residual == doctest::Approx(-1.5));
  CHECK(r.pass());
}

TEST_CASE("violated conditions fail") {
  ControllerGains g;
  g.K_u = g.K_omega;
  CHECK(check_gains(g, kPq, kPw).S2 < 0.0);
  CHECK_FALSE(check_gains(g, kPq, kPw).pass());
  g = ControllerGains{};
  g.K_b = 5.0;
  CHECK_FALSE(check_gains(g, kPq, kPw).kb_ok);
  g = ControllerGains{};
  g.C_q = 0.4;
  CHECK_FALSE(check_gains(g, kPq, kPw).s4_ok);
}

TEST_CASE("Lyapunov trace recomputes the logged terms") {
  Scenario s = *builtin_scenario("normal");
  s.duration = 5.0;
  const SimLog log = run(s);
  const LyapunovTrace tr = lyapunov_trace(log, s.gains);
  REQUIRE(tr.V.size() == log.records.size());
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    const auto& r = log.records[k];
    CHECK(tr.V1[k] == doctest::Approx(r.V1).epsilon(1e-14));
    CHECK(tr.V2[k] == doctest::Approx(r.V2).epsilon(1e-14));
    CHECK(tr.V3[k] == doctest::Approx(r.V3).epsilon(1e-14));
    CHECK(tr.V4[k] == doctest::Approx(r.V4).epsilon(1e-14));
    CHECK(tr.V[k] == doctest::Approx(tr.V1[k] + tr.V2[k] + tr.V3[k] + tr.V4[k]));
  }
  SimLog zero;
  zero.records.push_back(SimRecord{});
  CHECK(lyapunov_trace(zero, s.gains).V[0] == 0.0);
}

TEST_CASE("settling, terminal error and containment on a synthetic run") {
  const Scenario s = synthetic_scenario();
  //                  t = 0    1     2      3     4     5     6      7      8      9      10
  const SimLog log = synthetic_log({0.5, 0.02, 0.009, 0.05, 0.03, 0.03, 0.004, 0.004, 0.003, 0.002, 0.001});
  const RequirementVerdict v = verify_requirements(log, s);
  CHECK(v.complete);
  CHECK(v.settling_time == 2.0);  // records in [3, 8.5) are ignored
  CHECK(v.terminal_error == 0.003);  // window [8, 10]
  CHECK(v.settle_ok);
  CHECK(v.terminal_ok);
  REQUIRE(v.events.size() == 1);
  CHECK(v.events[0].pulse_end == 3.5);
  CHECK(v.events[0].window_end == 10.0);
  CHECK(v.events[0].recovered);
  CHECK(v.events[0].recovery == doctest::Approx(5.0 + 1.0 - 3.5));
  CHECK(v.events[0].contained_fraction == doctest::Approx(5.0 / 7.0));
  CHECK(v.containment_fraction == 1.0);  // counted records: 9, 10
  CHECK(v.recovery_ok);
  CHECK(v.pass());
}

TEST_CASE("a violation past the settle time breaks containment and settling") {
  const Scenario s = synthetic_scenario();
  const SimLog log = synthetic_log({0.5, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004, 0.03, 0.004});
  const RequirementVerdict v = verify_requirements(log, s);
  CHECK(v.settling_time == 10.0);
  CHECK_FALSE(v.settle_ok);
  CHECK(v.containment_fraction == doctest::Approx(0.5));
  CHECK_FALSE(v.containment_ok);
  CHECK_FALSE(v.terminal_ok);
  CHECK(v.events[0].recovery == doctest::Approx(9.0 + 1.0 - 3.5));
  CHECK_FALSE(v.recovery_ok);  // 6.5 s > 5 s
}

TEST_CASE("unrecovered events and recovery ratio") {
  const Scenario s = synthetic_scenario();
  const SimLog bad = synthetic_log({0.5, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004, 0.03});
  const SimLog good = synthetic_log({0.5, 0.004, 0.004, 0.004, 0.03, 0.004, 0.004, 0.004, 0.004, 0.004, 0.004});
  const RequirementVerdict vb = verify_requirements(bad, s);
  const RequirementVerdict vg = verify_requirements(good, s);
  CHECK_FALSE(vb.events[0].recovered);
  CHECK(std::isinf(vb.worst_recovery()));
  CHECK(vg.worst_recovery() == doctest::Approx(1.5));
  CHECK(std::isinf(recovery_ratio(vg, vb, 1.0)));
  CHECK(std::isnan(recovery_ratio(vb, vg, 1.0)));
  CHECK(recovery_ratio(vg, vg, 1.0) == doctest::Approx(1.0));
  RequirementVerdict none;
  CHECK(recovery_ratio(none, vg, 0.5) == doctest::Approx(1.5 / 0.5));
}

TEST_CASE("torque check enforces the saturation and deadband exactly") {
  const Scenario s = synthetic_scenario();
  SimLog log = synthetic_log(std::vector<double>(11, 0.001));
  CHECK(verify_requirements(log, s).torque_ok);
  log.records[4].tau = Vec3(0.05, -1e-4, 0.0);
  CHECK(verify_requirements(log, s).torque_ok);
  log.records[4].tau = Vec3(0.05 + 1e-15, 0.0, 0.0);
  CHECK_FALSE(verify_requirements(log, s).torque_ok);
  log.records[4].tau = Vec3(0.0, 0.0, 0.99e-4);
  CHECK_FALSE(verify_requirements(log, s).torque_ok);
}

TEST_CASE("incomplete logs never pass") {
  const Scenario s = synthetic_scenario();
  SimLog log = synthetic_log(std::vector<double>(8, 0.001));
  CHECK_FALSE(verify_requirements(log, s).complete);
  log = synthetic_log(std::vector<double>(11, 0.001));
  log.failure = SimFailure{11, "x"};
  CHECK_FALSE(verify_requirements(log, s).pass());
  CHECK_FALSE(verify_requirements(SimLog{}, s).pass());
}

TEST_CASE("perfect start settles at zero") {
  Scenario s = synthetic_scenario();
  s.disturbance.pulses.clear();
  const RequirementVerdict v = verify_requirements(synthetic_log(std::vector<double>(11, 0.0)), s);
  CHECK(v.settling_time == 0.0);
  CHECK(v.events.empty());
  CHECK(v.pass());
}

}  // TEST_SUITE
