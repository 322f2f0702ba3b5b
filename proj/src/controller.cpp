#include "ppcatt/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppcatt {

namespace {

Mat3 diag(const Vec3& v) { return v.asDiagonal().toDenseMatrix(); }

Vec3 vec_tanh(const Vec3& v) { return v.array().tanh().matrix(); }

}  // namespace

Vec3 transform_error(const Vec3& e, const Vec3& rho) {
  if (!(rho.array() > 0.0).all()) {
    throw std::domain_error("performance envelope must be positive");
  }
  return e.cwiseQuotient(rho);
}

Vec3 virtual_law(const UnitQuaternion& q_e, const Vec3& eps_q, const Vec3& rho_q,
                 const ControllerGains& g) {
  const double q0 = std::abs(q_e.scalar());
  if (q0 <= 1e-8) {
    throw SingularAttitude("virtual law undefined at |q_e0| <= 1e-8");
  }
  const Mat3 fe_inv = fe_jacobian_inverse(q_e);
  return -0.5 * q0 * g.k * g.M_omega * (fe_inv * rho_q.cwiseProduct(vec_tanh(g.beta * eps_q)));
}

DerivativeFilter::DerivativeFilter(double time_constant) : T_f_(time_constant) {
  if (!(time_constant > 0.0)) {
    throw std::invalid_argument("filter time constant must be positive");
  }
}

Vec3 DerivativeFilter::update(const Vec3& v, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("filter step must be positive");
  if (v_prev_) {
    const Vec3 raw = (v - *v_prev_) / dt;
    const double alpha = std::min(1.0, dt / T_f_);
    v_dot_ += alpha * (raw - v_dot_);
  }
  v_prev_ = v;
  return v_dot_;
}

void DerivativeFilter::reset() {
  v_prev_.reset();
  v_dot_.setZero();
}

Vec3 disturbance_comp(const Vec3& eps_omega, const ControllerGains& g) {
  return g.D_m * vec_tanh(eps_omega.cwiseQuotient(g.mu));
}

Vec3 FrozenLaw::advance(const Vec3& x, double dt) const {
  if (decay == 0.0) return x + dt * input;
  const double e = std::exp(-decay * dt);
  return e * x + (-std::expm1(-decay * dt) / decay) * input;
}

FrozenLaw auxiliary_law(const Vec3& theta, const Vec3& delta_tau, const Mat3& xi,
                        const Mat3& J_inv, const ControllerGains& g) {
  const Mat3 xi_jinv = xi * J_inv;
  const double denom = std::max(theta.squaredNorm(), g.eps_theta * g.eps_theta);
  return {g.K_a + g.K_b * (xi_jinv * delta_tau).squaredNorm() / denom,
          xi_jinv * vec_tanh(delta_tau)};
}

Vec3 auxiliary_rate(const Vec3& theta, const Vec3& delta_tau, const Mat3& xi,
                    const Mat3& J_inv, const ControllerGains& g) {
  return auxiliary_law(theta, delta_tau, xi, J_inv, g).rate(theta);
}

InternalRates InternalLaws::rates(const Vec3& drq, const Vec3& drw, const Vec3& th) const {
  return {delta_rho_q.rate(drq), delta_rho_omega.rate(drw), theta.rate(th)};
}

CommandTerms command_law(const CommandInputs& in, const ControllerGains& g,
                         const InertiaModel& J) {
  const Mat3& Jm = J.matrix();
  // xi^{-1} = diag(rho_omega), gamma = diag(rho_omega' / rho_omega)
  const Mat3 j_xi_inv = Jm * diag(in.rho_omega);
  const Vec3 gamma = in.rho_omega_dot.cwiseQuotient(in.rho_omega);

  CommandTerms t;
  t.lumped = -in.M0;
  t.compensation = -disturbance_comp(in.eps_omega, g);
  t.feedforward = Jm * in.v_dot;
  t.rate_feedback = -g.K_omega * (j_xi_inv * in.eps_omega);
  t.envelope = Jm * gamma.cwiseProduct(in.z2);
  t.auxiliary = -g.K_u * (j_xi_inv * in.theta);

  const double num = std::tanh(in.eps_q.squaredNorm() / g.F1);
  const double den = g.k2 * std::tanh(in.eps_omega.squaredNorm() / g.F2) + g.sigma;
  // J xi^{-1} diag(rho_omega) psi_q F_e eps_q
  const Vec3 psi_fe_eps = (fe_jacobian(in.q_e) * in.eps_q).cwiseQuotient(in.rho_q);
  t.coupling = -(num / den) * (j_xi_inv * in.rho_omega.cwiseProduct(psi_fe_eps));

  t.u = t.lumped + t.compensation + t.feedforward + t.rate_feedback + t.envelope +
        t.auxiliary + t.coupling;
  return t;
}

ProposedController::ProposedController(const ControllerGains& gains, const NominalPpf& ppf_q,
                                       const NominalPpf& ppf_omega, const InertiaModel& J,
                                       bool adaptive_ppf)
    : gains_(gains),
      ppf_q_(ppf_q),
      ppf_omega_(ppf_omega),
      J_(J),
      adaptive_ppf_(adaptive_ppf),
      filter_(gains.T_f) {}

InternalLaws ProposedController::internal_laws(double t, const Vec3& delta_rho_omega,
                                               const Vec3& theta,
                                               const Vec3& delta_tau) const {
  const Vec3 rho_omega = Vec3::Constant(ppf_omega_.eval(t).rho) + delta_rho_omega;
  const Mat3 xi = diag(rho_omega.cwiseInverse());
  InternalLaws laws;
  if (adaptive_ppf_) {
    const AdaptiveEnvelopeGains gq = gains_.attitude_envelope();
    const AdaptiveEnvelopeGains gw = gains_.rate_envelope();
    laws.delta_rho_q = {gq.decay, adaptive_input(delta_tau, xi, J_.inverse(), gq)};
    laws.delta_rho_omega = {gw.decay, adaptive_input(delta_tau, xi, J_.inverse(), gw)};
  }
  laws.theta = auxiliary_law(theta, delta_tau, xi, J_.inverse(), gains_);
  return laws;
}

InternalRates ProposedController::internal_rates(double t, const Vec3& delta_rho_q,
                                                 const Vec3& delta_rho_omega,
                                                 const Vec3& theta,
                                                 const Vec3& delta_tau) const {
  return internal_laws(t, delta_rho_omega, theta, delta_tau)
      .rates(delta_rho_q, delta_rho_omega, theta);
}

ControlOutput ProposedController::compute(const ControlInputs& in) {
  ControlOutput out;
  const ErrorState err = error_state(in.plant, in.desired.omega_d);
  out.q_e = err.q_e;
  out.omega_e = err.omega_e;
  out.M0 = lumped_term(in.plant, J_, in.desired.omega_d, in.desired.omega_d_dot);

  const InternalRates rates =
      internal_rates(in.t, in.delta_rho_q, in.delta_rho_omega, in.theta, in.last_delta_tau);
  const EnvelopeSample env_q = composite(ppf_q_, in.delta_rho_q, rates.delta_rho_q, in.t);
  const EnvelopeSample env_w =
      composite(ppf_omega_, in.delta_rho_omega, rates.delta_rho_omega, in.t);
  out.rho_q = env_q.rho;
  out.rho_omega = env_w.rho;

  out.eps_q = transform_error(err.q_e.vec(), env_q.rho);
  try {
    out.v = virtual_law(err.q_e, out.eps_q, env_q.rho, gains_);
  } catch (const SingularAttitude&) {
    out.singular = true;
    out.v.setZero();
  }
  out.z2 = err.omega_e - out.v;
  out.eps_omega = transform_error(out.z2, env_w.rho);
  out.v_dot = filter_.update(out.v, in.dt);

  CommandInputs ci;
  ci.q_e = err.q_e;
  ci.eps_q = out.eps_q;
  ci.eps_omega = out.eps_omega;
  ci.z2 = out.z2;
  ci.rho_q = env_q.rho;
  ci.rho_omega = env_w.rho;
  ci.rho_omega_dot = env_w.rho_dot;
  ci.M0 = out.M0;
  ci.v_dot = out.v_dot;
  ci.theta = in.theta;
  const CommandTerms terms = command_law(ci, gains_, J_);
  out.d_hat = -terms.compensation;
  out.u = terms.u;
  return out;
}

std::optional<Vec3> log_blf_gradient(const Vec3& eps) {
  const double s = eps.squaredNorm();
  if (s >= 1.0 - 1e-9) return std::nullopt;
  return eps / (1.0 - s);
}

BenchmarkTerms benchmark_log_blf(const UnitQuaternion& q_e, const Vec3& rho, const Vec3& rho_dot,
                                 const BenchmarkGains& g) {
  BenchmarkTerms out;
  const Mat3 fe_inv = fe_jacobian_inverse(q_e);
  const Vec3 eps = transform_error(q_e.vec(), rho);
  Vec3 inner = rho_dot.cwiseQuotient(rho).cwiseProduct(q_e.vec());
  if (const auto grad = log_blf_gradient(eps)) {
    inner -= g.k_q * rho.cwiseProduct(*grad);
  } else {
    out.singular = true;
  }
  out.omega_c = fe_inv * inner;
  return out;
}

BenchmarkController::BenchmarkController(const BenchmarkGains& gains, const NominalPpf& ppf_q,
                                         const InertiaModel& J)
    : gains_(gains), ppf_q_(ppf_q), J_(J), filter_(gains.T_f) {}

ControlOutput BenchmarkController::compute(const ControlInputs& in) {
  ControlOutput out;
  const ErrorState err = error_state(in.plant, in.desired.omega_d);
  out.q_e = err.q_e;
  out.omega_e = err.omega_e;
  out.M0 = lumped_term(in.plant, J_, in.desired.omega_d, in.desired.omega_d_dot);

  const PpfSample n = ppf_q_.eval(in.t);
  out.rho_q = Vec3::Constant(n.rho);
  out.eps_q = transform_error(err.q_e.vec(), out.rho_q);
  try {
    const BenchmarkTerms bt =
        benchmark_log_blf(err.q_e, out.rho_q, Vec3::Constant(n.rho_dot), gains_);
    out.v = bt.omega_c;
    out.singular = bt.singular;
  } catch (const SingularAttitude&) {
    out.singular = true;
    out.v.setZero();
  }
  out.z2 = err.omega_e - out.v;
  out.v_dot = filter_.update(out.v, in.dt);
  const Mat3& Jm = J_.matrix();
  out.u = -out.M0 + Jm * out.v_dot - gains_.K_rate * (Jm * out.z2);
  return out;
}

}  // namespace ppcatt
