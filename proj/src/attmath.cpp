#include "ppcatt/attmath.hpp"

#include <cmath>

namespace ppcatt {

UnitQuaternion::UnitQuaternion(const Vec3& vec, double scalar) : vec_(vec), scalar_(scalar) {
  *this = normalized();
}

UnitQuaternion UnitQuaternion::from_components(double x, double y, double z, double w) {
  return UnitQuaternion(Vec3(x, y, z), w);
}

UnitQuaternion UnitQuaternion::raw(const Vec3& vec, double scalar) {
  UnitQuaternion q;
  q.vec_ = vec;
  q.scalar_ = scalar;
  return q;
}

double UnitQuaternion::norm() const {
  return std::sqrt(vec_.squaredNorm() + scalar_ * scalar_);
}

UnitQuaternion UnitQuaternion::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::domain_error("cannot normalize a zero or non-finite quaternion");
  }
  return raw(vec_ / n, scalar_ / n);
}

UnitQuaternion operator*(const UnitQuaternion& p, const UnitQuaternion& q) {
  const Vec3 v = p.scalar_ * q.vec_ + q.scalar_ * p.vec_ + p.vec_.cross(q.vec_);
  const double s = p.scalar_ * q.scalar_ - p.vec_.dot(q.vec_);
  return UnitQuaternion::raw(v, s);
}

Mat3 skew(const Vec3& b) {
  Mat3 m;
  m << 0.0, -b.z(), b.y(),
       b.z(), 0.0, -b.x(),
       -b.y(), b.x(), 0.0;
  return m;
}

UnitQuaternion quat_error(const UnitQuaternion& q_d, const UnitQuaternion& q_s) {
  return (q_d.conjugate() * q_s).normalized();
}

Mat3 quat_to_rotmat(const UnitQuaternion& q) {
  // C = (q0^2 - |qv|^2) I + 2 qv qv^T - 2 q0 qv^x
  const Vec3& v = q.vec();
  const double s = q.scalar();
  return (s * s - v.squaredNorm()) * Mat3::Identity() + 2.0 * v * v.transpose() -
         2.0 * s * skew(v);
}

Mat3 fe_jacobian(const UnitQuaternion& q_e) {
  return 0.5 * (q_e.scalar() * Mat3::Identity() + skew(q_e.vec()));
}

Mat3 fe_jacobian_inverse(const UnitQuaternion& q_e) {
  const double s = q_e.scalar();
  if (std::abs(s) < 1e-8) {
    throw SingularAttitude("F_e is singular: |q_e0| < 1e-8 (180 deg attitude error)");
  }
  // (q0 I + qv^x)^{-1} = q0 I - qv^x + qv qv^T / q0 for a unit quaternion.
  const Vec3& v = q_e.vec();
  return 2.0 * (s * Mat3::Identity() - skew(v) + v * v.transpose() / s);
}

QuaternionRate quat_kinematics(const UnitQuaternion& q, const Vec3& omega) {
  const Vec3& v = q.vec();
  return {0.5 * (q.scalar() * omega + v.cross(omega)), -0.5 * v.dot(omega)};
}

}  // namespace ppcatt
