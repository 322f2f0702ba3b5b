#include <cmath>
#include <random>

#include "doctest.h"
#include "ppcatt/barrier.hpp"

using namespace ppcatt;

TEST_SUITE("barrier") {

TEST_CASE("log_cosh is accurate and overflow-free") {
  for (double x : {1e-12, 1e-6, 1e-3, 0.1, 0.5, 0.99, 1.0, 2.0, 10.0, 20.0}) {
    CHECK(log_cosh(x) == doctest::Approx(std::log(std::cosh(x))).epsilon(1e-13));
    CHECK(log_cosh(-x) == log_cosh(x));
  }
  CHECK(log_cosh(1e-8) == doctest::Approx(0.5e-16).epsilon(1e-10));
  CHECK(log_cosh(0.0) == 0.0);
  CHECK(std::isfinite(log_cosh(1e6)));
  CHECK(log_cosh(1e6) == doctest::Approx(1e6 - std::log(2.0)));
}

TEST_CASE("value and gradient on a known point") {
  const BarrierParams p{2.0, 0.5};
  const Vec3 eps(0.3, -0.4, 0.0);  // |eps|^2 = 0.25
  CHECK(blf_value(eps, p) == doctest::Approx(0.5 * 2.0 * 0.5 * std::log(std::cosh(0.5))));
  const Vec3 g = blf_gradient(eps, p);
  CHECK((g - 2.0 * std::tanh(0.5) * eps).norm() < 1e-15);
  CHECK(blf_value(Vec3::Zero(), p) == 0.0);
  CHECK(blf_gradient(Vec3::Zero(), p) == Vec3::Zero());
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> comp(-2.0, 2.0);
  std::uniform_real_distribution<double> gain(0.1, 5.0);
  std::uniform_real_distribution<double> width(0.2, 5.0);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 eps(comp(rng), comp(rng), comp(rng));
    const BarrierParams p{gain(rng), width(rng)};
    const Vec3 g = blf_gradient(eps, p);
    Vec3 fd;
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(eps[i]));
      Vec3 ep = eps, em = eps;
      ep[i] += h;
      em[i] -= h;
      fd[i] = (blf_value(ep, p) - blf_value(em, p)) / (2.0 * h);
    }
    const double scale = std::max(g.norm(), 1e-3);
    CHECK((g - fd).norm() / scale < 1e-6);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("gradient stays finite outside the unit ball") {
  const BarrierParams p{3.0, 1.0};
  for (double r : {0.99, 1.0, 1.5, 10.0, 1e3}) {
    const Vec3 g = blf_gradient(Vec3(r, 0.0, 0.0), p);
    CHECK(std::isfinite(g.norm()));
    CHECK(g.norm() <= p.k * r * (1.0 + 1e-15));
  }
}

TEST_CASE("property P1 on log-spaced samples") {
  int failures = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double x = std::pow(10.0, -8.0 + (std::log10(50.0) + 8.0) * i / (n - 1));
    if (!property_p1_check(x)) ++failures;
  }
  CHECK(failures == 0);
  CHECK(property_p1_check(0.0));
  CHECK_FALSE(property_p1_check(-1.0));
}

TEST_CASE("property P2") {
  CHECK(property_p2_check(3.0, 1.0, 2.9));
  // The largest x with 3 tanh x >= x is about 2.985.
  CHECK_FALSE(property_p2_check(3.0, 1.0, 3.2));
  CHECK_FALSE(property_p2_check(0.5, 1.0, 0.1, 100));
}

}  // TEST_SUITE
