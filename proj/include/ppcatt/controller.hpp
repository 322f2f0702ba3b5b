#pragma once

// Double-layer prescribed-performance backstepping attitude controller and
// the single-layer log-barrier benchmark it is compared against.
//
// Layer 1 (attitude): eps_q = q_ev / rho_q, bounded virtual rate command
//   v = -(|q_e0| / 2) k M_omega F_e^{-1} diag(rho_q) vec(tanh(beta eps_q,i)).
// Layer 2 (rate): z2 = omega_e - v, eps_omega = z2 / rho_omega, and
//   u = -M0 - d_hat + J v_dot - K_omega J xi^{-1} eps_omega + J gamma z2
//       - K_u J xi^{-1} theta
//       - tanh(|eps_q|^2 / F1) / (k2 tanh(|eps_omega|^2 / F2) + sigma)
//         * J xi^{-1} diag(rho_omega) psi_q F_e eps_q
// with xi = diag(1 / rho_omega), gamma = diag(rho_omega' / rho_omega),
// psi_q = diag(1 / rho_q).

#include <optional>

#include "ppcatt/attmath.hpp"
#include "ppcatt/barrier.hpp"
#include "ppcatt/dynamics.hpp"
#include "ppcatt/envelope.hpp"

namespace ppcatt {

struct ControllerGains {
  double k{3.0};
  double M_omega{0.017};  // rad/s
  double beta{5.0};
  double k1{1.0};
  double k2{1.0};
  double F1{1.0};
  double F2{1.0};
  double K_omega{5.0};
  double K_u{0.5};
  double K_a{2.0};
  double K_b{1.0};
  double C_q{2.0};
  double C_tau{1.0};
  double C_omega{2.0};
  double B_tau{1.0};
  double c_tau{1.0};
  Vec3 mu{Vec3::Constant(0.01)};
  double sigma{1e-3};
  double D_m{5e-3};     // N m
  double T_f{0.02};     // s, v_dot filter time constant
  double eps_theta{1e-6};

  AdaptiveEnvelopeGains attitude_envelope() const { return {C_q, C_tau, c_tau}; }
  AdaptiveEnvelopeGains rate_envelope() const { return {C_omega, B_tau, c_tau}; }
};

/// eps_i = e_i / rho_i. Throws std::domain_error when some rho_i <= 0.
Vec3 transform_error(const Vec3& e, const Vec3& rho);

/// Bounded virtual rate command. Throws SingularAttitude when |q_e0| <= 1e-8.
Vec3 virtual_law(const UnitQuaternion& q_e, const Vec3& eps_q, const Vec3& rho_q,
                 const ControllerGains& g);

/// First-order low-pass filtered backward difference of v.
class DerivativeFilter {
 public:
  explicit DerivativeFilter(double time_constant);

  /// Feeds v sampled dt after the previous sample; returns the estimate.
  /// The first call returns zero.
  Vec3 update(const Vec3& v, double dt);

  const Vec3& estimate() const { return v_dot_; }
  double time_constant() const { return T_f_; }
  void reset();

 private:
  double T_f_;
  std::optional<Vec3> v_prev_;
  Vec3 v_dot_{Vec3::Zero()};
};

/// d_hat = D_m vec(tanh(eps_omega,i / mu_i)).
Vec3 disturbance_comp(const Vec3& eps_omega, const ControllerGains& g);

/// x' = -decay * x + input with both coefficients frozen over one sample.
struct FrozenLaw {
  double decay{0.0};
  Vec3 input{Vec3::Zero()};

  Vec3 rate(const Vec3& x) const { return -decay * x + input; }
  /// Exact solution of the frozen law after dt.
  Vec3 advance(const Vec3& x, double dt) const;
};

/// The auxiliary law below in frozen form, gain evaluated at theta.
FrozenLaw auxiliary_law(const Vec3& theta, const Vec3& delta_tau, const Mat3& xi,
                        const Mat3& J_inv, const ControllerGains& g);

/// theta' = -[K_a + K_b |xi J^{-1} dtau|^2 / max(|theta|^2, eps_theta^2)] theta
///          + xi J^{-1} vec(tanh dtau_i)
Vec3 auxiliary_rate(const Vec3& theta, const Vec3& delta_tau, const Mat3& xi,
                    const Mat3& J_inv, const ControllerGains& g);

struct CommandInputs {
  UnitQuaternion q_e;
  Vec3 eps_q{Vec3::Zero()};
  Vec3 eps_omega{Vec3::Zero()};
  Vec3 z2{Vec3::Zero()};
  Vec3 rho_q{Vec3::Ones()};
  Vec3 rho_omega{Vec3::Ones()};
  Vec3 rho_omega_dot{Vec3::Zero()};
  Vec3 M0{Vec3::Zero()};
  Vec3 v_dot{Vec3::Zero()};
  Vec3 theta{Vec3::Zero()};
};

/// Individual terms of the command law; u is their sum.
struct CommandTerms {
  Vec3 lumped{Vec3::Zero()};        // -M0
  Vec3 compensation{Vec3::Zero()};  // -d_hat
  Vec3 feedforward{Vec3::Zero()};   // J v_dot
  Vec3 rate_feedback{Vec3::Zero()}; // -K_omega J xi^{-1} eps_omega
  Vec3 envelope{Vec3::Zero()};      // J gamma z2
  Vec3 auxiliary{Vec3::Zero()};     // -K_u J xi^{-1} theta
  Vec3 coupling{Vec3::Zero()};      // cross-layer cancellation
  Vec3 u{Vec3::Zero()};
};

/// Throws SingularAttitude through its use of F_e only when q_e is singular
/// (F_e itself is always defined, so in practice this never throws).
CommandTerms command_law(const CommandInputs& in, const ControllerGains& g,
                         const InertiaModel& J);

/// Everything the simulator needs from one controller evaluation.
struct ControlInputs {
  double t{0.0};
  double dt{0.01};
  PlantState plant;
  DesiredRate desired;
  Vec3 delta_rho_q{Vec3::Zero()};
  Vec3 delta_rho_omega{Vec3::Zero()};
  Vec3 theta{Vec3::Zero()};
  Vec3 last_delta_tau{Vec3::Zero()};  // held from the previous step
};

struct ControlOutput {
  UnitQuaternion q_e;
  Vec3 omega_e{Vec3::Zero()};
  Vec3 M0{Vec3::Zero()};
  Vec3 eps_q{Vec3::Zero()};
  Vec3 eps_omega{Vec3::Zero()};
  Vec3 z2{Vec3::Zero()};
  Vec3 rho_q{Vec3::Zero()};
  Vec3 rho_omega{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  Vec3 v_dot{Vec3::Zero()};
  Vec3 d_hat{Vec3::Zero()};
  Vec3 u{Vec3::Zero()};
  bool singular{false};
};

/// Rates of the controller-internal states (adaptive envelopes, theta).
struct InternalRates {
  Vec3 delta_rho_q{Vec3::Zero()};
  Vec3 delta_rho_omega{Vec3::Zero()};
  Vec3 theta{Vec3::Zero()};
};

/// Internal-state laws sampled at t_n. The controller is a sampled-data
/// system: these are advanced with FrozenLaw::advance over each step.
struct InternalLaws {
  FrozenLaw delta_rho_q;
  FrozenLaw delta_rho_omega;
  FrozenLaw theta;

  InternalRates rates(const Vec3& delta_rho_q, const Vec3& delta_rho_omega,
                      const Vec3& theta) const;
};

class ProposedController {
 public:
  ProposedController(const ControllerGains& gains, const NominalPpf& ppf_q,
                     const NominalPpf& ppf_omega, const InertiaModel& J, bool adaptive_ppf);

  /// Evaluates the command at the start of a step. Advances the v_dot filter.
  ControlOutput compute(const ControlInputs& in);

  InternalLaws internal_laws(double t, const Vec3& delta_rho_omega, const Vec3& theta,
                             const Vec3& delta_tau) const;
  InternalRates internal_rates(double t, const Vec3& delta_rho_q, const Vec3& delta_rho_omega,
                               const Vec3& theta, const Vec3& delta_tau) const;

  const ControllerGains& gains() const { return gains_; }
  bool adaptive_ppf() const { return adaptive_ppf_; }

 private:
  ControllerGains gains_;
  NominalPpf ppf_q_;
  NominalPpf ppf_omega_;
  InertiaModel J_;
  bool adaptive_ppf_;
  DerivativeFilter filter_;
};

/// Gains of the single-layer log-barrier benchmark.
struct BenchmarkGains {
  double k_q{0.05};      // attitude-loop barrier gain, 1/s
  double K_rate{1.0};    // rate-loop gain, 1/s
  double T_f{0.02};      // s, filter for the rate command derivative
};

/// Gradient of V_l = 0.5 ln(1 / (1 - |eps|^2)): eps / (1 - |eps|^2).
/// Returns std::nullopt outside the domain |eps|^2 < 1 - 1e-9.
std::optional<Vec3> log_blf_gradient(const Vec3& eps);

struct BenchmarkTerms {
  Vec3 omega_c{Vec3::Zero()};  // rate command
  bool singular{false};        // envelope left the log-barrier domain
};

/// Attitude loop of the benchmark:
///   omega_c = F_e^{-1} [diag(rho' / rho) q_ev - k_q diag(rho) grad V_l],
/// which gives eps' = -k_q grad V_l. Outside the barrier domain the gradient
/// term is undefined and is clamped to zero; the step is flagged singular.
BenchmarkTerms benchmark_log_blf(const UnitQuaternion& q_e, const Vec3& rho, const Vec3& rho_dot,
                                 const BenchmarkGains& g);

class BenchmarkController {
 public:
  BenchmarkController(const BenchmarkGains& gains, const NominalPpf& ppf_q,
                      const InertiaModel& J);

  ControlOutput compute(const ControlInputs& in);

  const BenchmarkGains& gains() const { return gains_; }

 private:
  BenchmarkGains gains_;
  NominalPpf ppf_q_;
  InertiaModel J_;
  DerivativeFilter filter_;
};

}  // namespace ppcatt
