#pragma once

// Prescribed performance envelopes.
//
// The nominal envelope has three segments:
//   rho_e(t) = (rho_e0 - rho_einf) exp(-l t) + rho_einf   on [0, t1)
//   rho_p(t) = a1 t^2 + a2 t + a3                          on [t1, t2)
//   rho_c(t) = g_inf                                       on [t2, inf)
// with t1, a1, a2, a3 fixed by value and slope continuity at t1 and t2.
// The composite envelope adds a per-channel widening term driven by
// actuator saturation: rho = rho_n + delta_rho.

#include <stdexcept>
#include <string>

#include "ppcatt/attmath.hpp"

namespace ppcatt {

struct NominalPpfParams {
  double rho_e0{1.0};
  double rho_einf{1e-4};
  double l{0.05};   // 1/s
  double t2{60.0};  // s
  double g_inf{5e-3};

  /// Empty string when valid, otherwise the first violated constraint.
  std::string validation_error() const;
};

class NoPpfSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PpfSample {
  double rho{0.0};
  double rho_dot{0.0};
};

/// Residuals of the four connection constraints of a solved envelope.
struct ConnectionResiduals {
  double value_t1{0.0};  // |rho_e(t1) - rho_p(t1)|
  double slope_t1{0.0};  // |rho_e'(t1) - rho_p'(t1)|
  double value_t2{0.0};  // |rho_p(t2) - g_inf|
  double slope_t2{0.0};  // |rho_p'(t2)|
};

class NominalPpf {
 public:
  /// Solves for t1 by bisection and derives the parabola coefficients.
  /// When two connection instants exist the earlier one is used.
  /// Throws NoPpfSolution when the parameters are invalid or when no
  /// connection instant exists in (0, t2).
  static NominalPpf solve(const NominalPpfParams& params);

  PpfSample eval(double t) const;

  const NominalPpfParams& params() const { return params_; }
  double t1() const { return t1_; }
  double a1() const { return a1_; }
  double a2() const { return a2_; }
  double a3() const { return a3_; }

  ConnectionResiduals residuals() const;

 private:
  NominalPpf(const NominalPpfParams& p, double t1);

  NominalPpfParams params_;
  double t1_{0.0};
  double a1_{0.0};
  double a2_{0.0};
  double a3_{0.0};
};

/// Connection condition whose root in (0, t2) is t1:
///   (l (t2 - t1) / 2 - 1) (rho_e0 - rho_einf) exp(-l t1) - rho_einf + g_inf
double connection_condition(const NominalPpfParams& p, double t1);

NominalPpf solve_nominal(const NominalPpfParams& params);

struct AdaptiveEnvelopeGains {
  double decay{2.0};       // C_q or C_omega, 1/s
  double drive{1.0};       // C_tau or B_tau
  double tanh_slope{1.0};  // c_tau
};

/// drive * xi * J^{-1} vec(|tanh(c Delta_tau_i)|)
Vec3 adaptive_input(const Vec3& delta_tau, const Mat3& xi, const Mat3& J_inv,
                    const AdaptiveEnvelopeGains& gains);

/// delta_rho' = -decay * delta_rho + adaptive_input(...)
Vec3 adaptive_rate(const Vec3& delta_rho, const Vec3& delta_tau, const Mat3& xi,
                   const Mat3& J_inv, const AdaptiveEnvelopeGains& gains);

struct EnvelopeSample {
  Vec3 rho{Vec3::Zero()};
  Vec3 rho_dot{Vec3::Zero()};
};

/// rho_i = rho_n(t) + delta_rho_i, rho_dot_i = rho_n'(t) + delta_rho_dot_i.
EnvelopeSample composite(const NominalPpf& ppf, const Vec3& delta_rho,
                         const Vec3& delta_rho_dot, double t);

}  // namespace ppcatt
