#include <cmath>

#include "doctest.h"
#include "ppcatt/envelope.hpp"
#include "ppcatt/simulator.hpp"

using namespace ppcatt;

namespace {

// Independent closed form of the three segments given t1.
double oracle_rho(const NominalPpfParams& p, double t1, double t) {
  const double A = p.rho_e0 - p.rho_einf;
  if (t < t1) return A * std::exp(-p.l * t) + p.rho_einf;
  if (t < p.t2) {
    const double slope_t1 = -p.l * A * std::exp(-p.l * t1);
    // Parabola with vertex (t2, g_inf) and slope_t1 at t1.
    const double a = slope_t1 / (2.0 * (t1 - p.t2));
    return p.g_inf + a * (t - p.t2) * (t - p.t2);
  }
  return p.g_inf;
}

}  // namespace

TEST_SUITE("envelope") {

TEST_CASE("attitude envelope: connection instant and residuals") {
  const NominalPpf ppf = NominalPpf::solve(reference_attitude_envelope());
  CHECK(ppf.t1() > 20.0);
  CHECK(ppf.t1() < 40.0);
  CHECK(ppf.t1() == doctest::Approx(20.5476).epsilon(1e-4));
  const ConnectionResiduals r = ppf.residuals();
  CHECK(r.value_t1 < 1e-9);
  CHECK(r.slope_t1 < 1e-9);
  CHECK(r.value_t2 < 1e-9);
  CHECK(r.slope_t2 < 1e-9);
  CHECK(std::abs(connection_condition(ppf.params(), ppf.t1())) < 1e-12);
}

TEST_CASE("evaluation matches the closed form and is C1") {
  const auto p = reference_attitude_envelope();
  const NominalPpf ppf = NominalPpf::solve(p);
  for (double t = 0.0; t <= 100.0; t += 0.37) {
    CHECK(ppf.eval(t).rho == doctest::Approx(oracle_rho(p, ppf.t1(), t)).epsilon(1e-12));
  }
  CHECK(ppf.eval(0.0).rho == doctest::Approx(1.0));
  CHECK(ppf.eval(60.0).rho == 5e-3);
  CHECK(ppf.eval(1e6).rho == 5e-3);
  for (double tc : {ppf.t1(), p.t2}) {
    const double h = 1e-9;
    CHECK(std::abs(ppf.eval(tc + h).rho - ppf.eval(tc - h).rho) < 1e-10);
    CHECK(std::abs(ppf.eval(tc + h).rho_dot - ppf.eval(tc - h).rho_dot) < 1e-9);
  }
  // Nonincreasing everywhere.
  double prev = ppf.eval(0.0).rho;
  for (double t = 0.01; t < 80.0; t += 0.01) {
    const double r = ppf.eval(t).rho;
    CHECK(r <= prev + 1e-15);
    prev = r;
  }
}

TEST_CASE("derivative matches finite differences inside each segment") {
  const NominalPpf ppf = NominalPpf::solve(reference_attitude_envelope());
  for (double t : {5.0, 30.0, 50.0, 70.0}) {
    const double h = 1e-6;
    const double fd = (ppf.eval(t + h).rho - ppf.eval(t - h).rho) / (2 * h);
    CHECK(ppf.eval(t).rho_dot == doctest::Approx(fd).epsilon(1e-6).scale(1e-9));
  }
}

TEST_CASE("tabulated rate envelope has no connection instant") {
  // With l = 0.5, t2 = 40 the exponential part is below 1e-9 wherever the
  // condition's first term is negative, so the condition stays at about
  // g_inf - rho_einf > 0 and never changes sign.
  const auto p = reference_rate_envelope_table();
  double min_f = 1e9;
  for (double t = 1e-6; t < p.t2; t += 1e-3) min_f = std::min(min_f, connection_condition(p, t));
  CHECK(min_f > 2.8e-5);
  CHECK_THROWS_AS(NominalPpf::solve(p), NoPpfSolution);
}

TEST_CASE("default rate envelope is the table with a feasible decay rate") {
  const auto table = reference_rate_envelope_table();
  const auto p = default_rate_envelope();
  CHECK(p.rho_e0 == table.rho_e0);
  CHECK(p.rho_einf == table.rho_einf);
  CHECK(p.t2 == table.t2);
  CHECK(p.g_inf == table.g_inf);
  const NominalPpf ppf = NominalPpf::solve(p);
  const auto r = ppf.residuals();
  CHECK(std::max({r.value_t1, r.slope_t1, r.value_t2, r.slope_t2}) < 1e-9);
}

TEST_CASE("t1 lies in (t2 - 2/l, t2) and approaches t2 as l grows") {
  NominalPpfParams p = reference_attitude_envelope();
  double prev_gap = 1e9;
  for (double l : {0.05, 0.08, 0.12, 0.2, 0.3}) {
    p.l = l;
    p.g_inf = 1e-4 + 1e-9;  // g_inf just above rho_einf keeps a root for every l
    const NominalPpf ppf = NominalPpf::solve(p);
    CHECK(ppf.t1() > p.t2 - 2.0 / l);
    CHECK(ppf.t1() < p.t2);
    const double gap = p.t2 - ppf.t1();
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("as g_inf approaches rho_einf, t1 approaches t2 - 2/l") {
  NominalPpfParams p = reference_attitude_envelope();
  double prev = 1e9;
  for (double g : {5e-3, 1e-3, 3e-4, 1.1e-4, 1.0001e-4}) {
    p.g_inf = g;
    const double t1 = NominalPpf::solve(p).t1();
    const double dist = std::abs(t1 - (p.t2 - 2.0 / p.l));
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("two connection instants: the earlier one is used") {
  // l = 0.2 on the rate table: the condition dips below zero around
  // t2 - 1/l and comes back up before t2.
  NominalPpfParams p = reference_rate_envelope_table();
  p.l = 0.2;
  CHECK(connection_condition(p, 1e-6) > 0.0);
  CHECK(connection_condition(p, p.t2 - 1.0 / p.l) < 0.0);
  CHECK(connection_condition(p, p.t2 - 1e-6) > 0.0);
  const NominalPpf ppf = NominalPpf::solve(p);
  CHECK(ppf.t1() < p.t2 - 1.0 / p.l);
  CHECK(std::abs(connection_condition(p, ppf.t1())) < 1e-12);
}

TEST_CASE("invalid parameters are rejected") {
  NominalPpfParams p = reference_attitude_envelope();
  p.l = 0.0;
  CHECK_THROWS_AS(NominalPpf::solve(p), NoPpfSolution);
  p = reference_attitude_envelope();
  p.g_inf = 2.0;
  CHECK(!p.validation_error().empty());
  p = reference_attitude_envelope();
  p.t2 = std::nan("");
  CHECK_THROWS_AS(NominalPpf::solve(p), NoPpfSolution);
}

TEST_CASE("adaptive law") {
  const Mat3 xi = Vec3(2.0, 4.0, 8.0).asDiagonal();
  const Mat3 J_inv = Vec3(0.5, 0.25, 1.0).asDiagonal();
  const AdaptiveEnvelopeGains g{2.0, 1.0, 1.0};
  const Vec3 drho(0.1, 0.2, 0.3);
  const Vec3 dtau(-0.3, 0.0, 0.7);
  const Vec3 r = adaptive_rate(drho, dtau, xi, J_inv, g);
  const Vec3 expect(-0.2 + 2.0 * 0.5 * std::tanh(0.3), -0.4, -0.6 + 8.0 * std::tanh(0.7));
  CHECK((r - expect).norm() < 1e-15);
  // No saturation deficit: pure decay.
  CHECK(adaptive_rate(drho, Vec3::Zero(), xi, J_inv, g) == -2.0 * drho);
}

TEST_CASE("composite envelope adds the adaptive part") {
  const NominalPpf ppf = NominalPpf::solve(reference_attitude_envelope());
  const EnvelopeSample s = composite(ppf, Vec3(0.1, 0.0, 0.2), Vec3(1.0, 0.0, -1.0), 70.0);
  CHECK(s.rho == Vec3(5e-3 + 0.1, 5e-3, 5e-3 + 0.2));
  CHECK(s.rho_dot == Vec3(1.0, 0.0, -1.0));
}

}  // TEST_SUITE
