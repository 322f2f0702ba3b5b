#pragma once

// Rigid-body attitude-error plant.
//
// The integrated state is the body attitude q_s, body rate omega_s and the
// desired attitude q_d. The error variables (q_e, omega_e) are derived:
//   q_e = conj(q_d) (x) q_s,   omega_e = omega_s - C_e omega_d,
// and obey
//   q_ev' = F_e omega_e,  q_e0' = -0.5 q_ev^T omega_e,
//   J omega_e' = M0 + tau + d,
//   M0 = J omega_e^x C_e omega_d - J C_e omega_d' - omega_s^x J omega_s.

#include <utility>
#include <vector>

#include "ppcatt/attmath.hpp"

namespace ppcatt {

struct PlantState {
  UnitQuaternion q_s;
  Vec3 omega_s{Vec3::Zero()};
  UnitQuaternion q_d;
};

struct PlantDerivative {
  QuaternionRate q_s;
  Vec3 omega_s{Vec3::Zero()};
  QuaternionRate q_d;
};

class InertiaModel {
 public:
  /// Throws std::invalid_argument unless J is symmetric positive-definite.
  explicit InertiaModel(const Mat3& J);
  static InertiaModel diagonal(double jx, double jy, double jz);

  const Mat3& matrix() const { return J_; }
  const Mat3& inverse() const { return J_inv_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

 private:
  Mat3 J_;
  Mat3 J_inv_;
  double lambda_min_;
  double lambda_max_;
};

/// Rectangular torque pulse added on top of the continuous disturbance.
struct DisturbancePulse {
  double start{0.0};     // s
  double duration{0.1};  // s
  Vec3 amplitude{Vec3::Zero()};  // N m

  double end() const { return start + duration; }
  bool active(double t) const { return t >= start && t < start + duration; }
};

/// Continuous part, per axis i:
///   d_i = scale * (a_i sin(m_i omega_p t) + b_i cos(n_i omega_p t) + offset_i)
struct DisturbanceModel {
  bool continuous_enabled{true};
  double scale{1e-4};
  double omega_p{0.01};  // rad/s
  Vec3 sin_amp{4.0, -1.5, 3.0};
  Vec3 sin_mult{3.0, 2.0, 10.0};
  Vec3 cos_amp{3.0, 3.0, -8.0};
  Vec3 cos_mult{10.0, 5.0, 4.0};
  Vec3 offset{-20.0, 20.0, 20.0};
  std::vector<DisturbancePulse> pulses;

  /// Reference disturbance with no pulses.
  static DisturbanceModel reference();
  /// Zero everywhere.
  static DisturbanceModel none();
};

struct ActuatorModel {
  double tau_max{0.05};  // N m, symmetric per-axis bound
  double tau_min{1e-4};  // N m, outputs below this magnitude snap to zero

  /// Throws std::invalid_argument unless 0 <= tau_min < tau_max.
  void validate() const;
};

struct Actuation {
  Vec3 tau{Vec3::Zero()};
  Vec3 delta_tau{Vec3::Zero()};  // tau - u
};

struct ErrorState {
  UnitQuaternion q_e;
  Vec3 omega_e{Vec3::Zero()};
  Mat3 C_e{Mat3::Identity()};
};

struct DesiredRate {
  Vec3 omega_d{Vec3::Zero()};
  Vec3 omega_d_dot{Vec3::Zero()};
};

ErrorState error_state(const PlantState& state, const Vec3& omega_d);

Vec3 lumped_term(const PlantState& state, const InertiaModel& J, const Vec3& omega_d,
                 const Vec3& omega_d_dot);

/// Right-hand side of the plant. omega_s' is obtained through the error
/// dynamics J omega_e' = M0 + tau + d and mapped back to the body rate.
PlantDerivative plant_derivative(const PlantState& state, const Vec3& tau, const Vec3& d,
                                 const InertiaModel& J, const Vec3& omega_d,
                                 const Vec3& omega_d_dot);

/// omega_d(t) = 0.5 deg/s * [cos(t/30), sin(t/20), -cos(t/40)], in rad/s,
/// with its exact time derivative.
DesiredRate desired_trajectory(double t);

Vec3 disturbance(double t, const DisturbanceModel& model);
Vec3 continuous_disturbance(double t, const DisturbanceModel& model);

Actuation actuate(const Vec3& u, const ActuatorModel& model);

}  // namespace ppcatt
