#include "ppcatt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace ppcatt {

InertiaModel::InertiaModel(const Mat3& J) : J_(J) {
  if (!J.allFinite()) {
    throw std::invalid_argument("inertia matrix has non-finite entries");
  }
  if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("inertia matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(J, Eigen::EigenvaluesOnly);
  lambda_min_ = eig.eigenvalues().minCoeff();
  lambda_max_ = eig.eigenvalues().maxCoeff();
  if (!(lambda_min_ > 0.0)) {
    throw std::invalid_argument("inertia matrix is not positive-definite");
  }
  J_inv_ = J.inverse();
}

InertiaModel InertiaModel::diagonal(double jx, double jy, double jz) {
  return InertiaModel(Vec3(jx, jy, jz).asDiagonal().toDenseMatrix());
}

DisturbanceModel DisturbanceModel::reference() { return {}; }

DisturbanceModel DisturbanceModel::none() {
  DisturbanceModel m;
  m.continuous_enabled = false;
  return m;
}

void ActuatorModel::validate() const {
  if (!(tau_min >= 0.0) || !(tau_max > tau_min)) {
    throw std::invalid_argument("actuator limits must satisfy 0 <= tau_min < tau_max");
  }
}

ErrorState error_state(const PlantState& state, const Vec3& omega_d) {
  ErrorState e;
  e.q_e = quat_error(state.q_d, state.q_s);
  e.C_e = quat_to_rotmat(e.q_e);
  e.omega_e = state.omega_s - e.C_e * omega_d;
  return e;
}

namespace {

Vec3 lumped_term_impl(const ErrorState& e, const Vec3& omega_s, const InertiaModel& J,
                      const Vec3& omega_d, const Vec3& omega_d_dot) {
  const Mat3& Jm = J.matrix();
  const Vec3 c_wd = e.C_e * omega_d;
  return Jm * e.omega_e.cross(c_wd) - Jm * (e.C_e * omega_d_dot) -
         omega_s.cross(Jm * omega_s);
}

}  // namespace

Vec3 lumped_term(const PlantState& state, const InertiaModel& J, const Vec3& omega_d,
                 const Vec3& omega_d_dot) {
  return lumped_term_impl(error_state(state, omega_d), state.omega_s, J, omega_d, omega_d_dot);
}

PlantDerivative plant_derivative(const PlantState& state, const Vec3& tau, const Vec3& d,
                                 const InertiaModel& J, const Vec3& omega_d,
                                 const Vec3& omega_d_dot) {
  // RK4 stages hand in slightly non-unit quaternions; the error quaternion
  // and C_e are built from their normalized versions.
  const ErrorState e = error_state(state, omega_d);
  const Vec3 m0 = lumped_term_impl(e, state.omega_s, J, omega_d, omega_d_dot);
  const Vec3 omega_e_dot = J.inverse() * (m0 + tau + d);
  // omega_s = omega_e + C_e omega_d and C_e' = -omega_e^x C_e.
  const Vec3 c_wd = e.C_e * omega_d;
  const Vec3 omega_s_dot = omega_e_dot - e.omega_e.cross(c_wd) + e.C_e * omega_d_dot;

  PlantDerivative out;
  out.q_s = quat_kinematics(state.q_s, state.omega_s);
  out.omega_s = omega_s_dot;
  out.q_d = quat_kinematics(state.q_d, omega_d);
  return out;
}

DesiredRate desired_trajectory(double t) {
  constexpr double amp = 0.5 * kDegToRad;
  DesiredRate r;
  r.omega_d = amp * Vec3(std::cos(t / 30.0), std::sin(t / 20.0), -std::cos(t / 40.0));
  r.omega_d_dot = amp * Vec3(-std::sin(t / 30.0) / 30.0, std::cos(t / 20.0) / 20.0,
                             std::sin(t / 40.0) / 40.0);
  return r;
}

Vec3 continuous_disturbance(double t, const DisturbanceModel& m) {
  if (!m.continuous_enabled) return Vec3::Zero();
  Vec3 d;
  for (int i = 0; i < 3; ++i) {
    d[i] = m.scale * (m.sin_amp[i] * std::sin(m.sin_mult[i] * m.omega_p * t) +
                      m.cos_amp[i] * std::cos(m.cos_mult[i] * m.omega_p * t) + m.offset[i]);
  }
  return d;
}

Vec3 disturbance(double t, const DisturbanceModel& m) {
  Vec3 d = continuous_disturbance(t, m);
  for (const auto& p : m.pulses) {
    if (p.active(t)) d += p.amplitude;
  }
  return d;
}

Actuation actuate(const Vec3& u, const ActuatorModel& model) {
  Actuation a;
  for (int i = 0; i < 3; ++i) {
    const double ui = u[i];
    double ti = 0.0;
    if (std::abs(ui) >= model.tau_min) {
      ti = std::clamp(ui, -model.tau_max, model.tau_max);
    }
    a.tau[i] = ti;
    a.delta_tau[i] = ti - ui;
  }
  return a;
}

}  // namespace ppcatt
