#include "ppcatt/barrier.hpp"

#include <cmath>
#include <limits>

namespace ppcatt {

double log_cosh(double x) {
  const double ax = std::abs(x);
  if (ax < 1.0) {
    // cosh x - 1 = 2 sinh^2(x/2) keeps the small-x digits.
    const double s = std::sinh(0.5 * ax);
    return std::log1p(2.0 * s * s);
  }
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

double blf_value(const Vec3& eps, const BarrierParams& p) {
  return 0.5 * p.k * p.F * log_cosh(eps.squaredNorm() / p.F);
}

Vec3 blf_gradient(const Vec3& eps, const BarrierParams& p) {
  return p.k * std::tanh(eps.squaredNorm() / p.F) * eps;
}

bool property_p1_check(double x) {
  if (x < 0.0) return false;
  constexpr double slack = 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
  const double xt = x * std::tanh(x);
  const double lc = log_cosh(x);
  return 0.5 * xt <= lc * slack && lc <= xt * slack;
}

bool property_p2_check(double k, double m, double x_max, int n_samples) {
  for (int i = 0; i < n_samples; ++i) {
    const double x = x_max * static_cast<double>(i) / n_samples;
    if (k * std::tanh(m * x) < x) return false;
  }
  return true;
}

}  // namespace ppcatt
