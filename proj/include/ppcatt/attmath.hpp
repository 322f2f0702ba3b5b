#pragma once

// Small fixed-size attitude arithmetic.
//
// Quaternions are stored scalar-last, q = [q_v; q_0], and multiply with the
// Hamilton convention (i*j = k). Attitude kinematics use body-frame rates:
//   q_dot = 0.5 * q (x) [omega; 0].
// The error quaternion between a desired attitude q_d and the body attitude
// q_s is q_e = conj(q_d) (x) q_s, so that q_e is the rotation taking the
// desired frame onto the body frame.

#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ppcatt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Thrown when an operation needs F_e^{-1} but |q_e0| is (numerically) zero.
class SingularAttitude : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  /// Builds from vector and scalar part and normalizes.
  UnitQuaternion(const Vec3& vec, double scalar);

  /// Builds from [x, y, z, w] (scalar-last) and normalizes.
  static UnitQuaternion from_components(double x, double y, double z, double w);

  static UnitQuaternion identity() { return {}; }

  /// Stores the components without normalizing. Used for RK4 stage states,
  /// which drift off the unit sphere between renormalizations.
  static UnitQuaternion raw(const Vec3& vec, double scalar);

  const Vec3& vec() const { return vec_; }
  double scalar() const { return scalar_; }

  double norm() const;
  UnitQuaternion normalized() const;
  UnitQuaternion conjugate() const { return raw(-vec_, scalar_); }

  friend UnitQuaternion operator*(const UnitQuaternion& p, const UnitQuaternion& q);

 private:
  Vec3 vec_{Vec3::Zero()};
  double scalar_{1.0};
};

/// b^x, with skew(b) * s == b.cross(s).
Mat3 skew(const Vec3& b);

/// q_e = conj(q_d) (x) q_s.
UnitQuaternion quat_error(const UnitQuaternion& q_d, const UnitQuaternion& q_s);

/// Direction-cosine matrix of q: maps components in the reference frame of q
/// into the rotated frame, C(q) v = conj(q) (x) v (x) q. For the error
/// quaternion this is C_e, the transformation from the desired frame to the
/// body frame.
Mat3 quat_to_rotmat(const UnitQuaternion& q);

/// F_e = 0.5 (q_e0 I + q_ev^x).
Mat3 fe_jacobian(const UnitQuaternion& q_e);

/// F_e^{-1}. Throws SingularAttitude when |q_e0| < 1e-8.
Mat3 fe_jacobian_inverse(const UnitQuaternion& q_e);

/// 0.5 * q (x) [omega; 0] as a raw (vec, scalar) pair.
struct QuaternionRate {
  Vec3 vec{Vec3::Zero()};
  double scalar{0.0};
};
QuaternionRate quat_kinematics(const UnitQuaternion& q, const Vec3& omega);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace ppcatt
