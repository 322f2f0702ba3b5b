#pragma once

// Log-cosh barrier Lyapunov function
//   V_B(eps) = (k/2) F ln cosh(eps^T eps / F),
//   grad V_B = k tanh(eps^T eps / F) eps.
// Unlike the log-type barrier 0.5 ln(1 / (1 - |eps|^2)) its gradient stays
// finite for |eps| >= 1, so an envelope violation softens the constraint
// instead of making the controller singular.

#include "ppcatt/attmath.hpp"

namespace ppcatt {

struct BarrierParams {
  double k{1.0};
  double F{1.0};
};

/// ln(cosh(x)), accurate near zero and overflow-free for large |x|.
double log_cosh(double x);

double blf_value(const Vec3& eps, const BarrierParams& p);
Vec3 blf_gradient(const Vec3& eps, const BarrierParams& p);

/// 0.5 x tanh x <= ln cosh x <= x tanh x, up to a few ulps of rounding.
bool property_p1_check(double x);

/// Whether k tanh(m x) >= x at n_samples evenly spaced points of [0, x_max).
bool property_p2_check(double k, double m, double x_max, int n_samples = 10000);

}  // namespace ppcatt
