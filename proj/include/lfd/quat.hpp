#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lfd {

using Vec3 = Eigen::Vector3d;

/// Half-angle scaled rotation vector: the codomain of log_map and the domain of exp_map.
/// A rotation by angle theta about unit axis n is represented as (theta / 2) * n.
struct RotVec {
  Vec3 value = Vec3::Zero();

  RotVec() = default;
  explicit RotVec(const Vec3& r) : value(r) {}
  RotVec(double x, double y, double z) : value(x, y, z) {}

  double norm() const { return value.norm(); }
};

/// Unit quaternion v + u on S^3, stored scalar-first.
/// Every constructor normalizes, so the unit-norm invariant always holds.
class UnitQuat {
 public:
  UnitQuat() = default;

  /// Normalizes (v, u). Throws InvalidArgument on a zero or non-finite input.
  UnitQuat(double v, const Vec3& u);
  UnitQuat(double v, double ux, double uy, double uz) : UnitQuat(v, Vec3(ux, uy, uz)) {}

  static UnitQuat identity() { return {}; }
  static UnitQuat from_array(const std::array<double, 4>& wxyz) {
    return {wxyz[0], wxyz[1], wxyz[2], wxyz[3]};
  }

  double v() const { return v_; }
  const Vec3& u() const { return u_; }
  std::array<double, 4> to_array() const { return {v_, u_.x(), u_.y(), u_.z()}; }

  double norm() const;
  double dot(const UnitQuat& other) const { return v_ * other.v_ + u_.dot(other.u_); }

  /// Same rotation, opposite hemisphere.
  UnitQuat operator-() const;
  UnitQuat conjugate() const;

  friend bool operator==(const UnitQuat& a, const UnitQuat& b) {
    return a.v_ == b.v_ && a.u_ == b.u_;
  }

 private:
  struct Raw {};
  UnitQuat(Raw, double v, const Vec3& u) : v_(v), u_(u) {}

  double v_ = 1.0;
  Vec3 u_ = Vec3::Zero();
};

/// Hamilton product a * b, renormalized.
UnitQuat quat_mul(const UnitQuat& a, const UnitQuat& b);
inline UnitQuat operator*(const UnitQuat& a, const UnitQuat& b) { return quat_mul(a, b); }

UnitQuat conj(const UnitQuat& q);

/// Rotates a vector by q (q * (0, p) * conj(q)).
Vec3 rotate(const UnitQuat& q, const Vec3& p);

/// (cos|r|, sin|r| r/|r|); the identity for r = 0. Throws DomainError for |r| >= pi.
UnitQuat exp_map(const RotVec& r);

/// arccos(v) u/|u|; zero for |u| < 1e-12. Throws DomainError at q = -1.
RotVec log_map(const UnitQuat& q);

/// Constant-speed geodesic from a towards the copy of b in a's hemisphere.
/// Throws InvalidArgument for s outside [0, 1].
UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double s);

/// Rotation angle between a and b in degrees, in [0, 180]; insensitive to sign.
double geodesic_angle(const UnitQuat& a, const UnitQuat& b);

/// Flips signs so that consecutive elements have non-negative dot product.
std::vector<UnitQuat> continuity_fix(std::span<const UnitQuat> seq);

}  // namespace lfd
