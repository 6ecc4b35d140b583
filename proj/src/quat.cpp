#include "lfd/quat.hpp"

#include <cmath>
#include <numbers>

#include "lfd/errors.hpp"

namespace lfd {

namespace {

constexpr double kSmallVector = 1e-12;

Eigen::Vector4d as_vec4(const UnitQuat& q) { return {q.v(), q.u().x(), q.u().y(), q.u().z()}; }

// Half of the angle between a and b seen as vectors in R^4; accurate near 0 and pi.
double half_chord_angle(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

}  // namespace

UnitQuat::UnitQuat(double v, const Vec3& u) {
  const double n = std::sqrt(v * v + u.squaredNorm());
  if (!std::isfinite(n) || n == 0.0) {
    throw InvalidArgument("quaternion must be finite and non-zero");
  }
  // Already-unit input is kept bit-for-bit, which makes normalization idempotent.
  if (std::abs(n - 1.0) <= 1e-15) {
    v_ = v;
    u_ = u;
    return;
  }
  v_ = v / n;
  u_ = u / n;
}

double UnitQuat::norm() const { return std::sqrt(v_ * v_ + u_.squaredNorm()); }

UnitQuat UnitQuat::operator-() const { return UnitQuat(Raw{}, -v_, -u_); }

UnitQuat UnitQuat::conjugate() const { return UnitQuat(Raw{}, v_, -u_); }

UnitQuat quat_mul(const UnitQuat& a, const UnitQuat& b) {
  const double v = a.v() * b.v() - a.u().dot(b.u());
  const Vec3 u = a.v() * b.u() + b.v() * a.u() + a.u().cross(b.u());
  return {v, u};
}

UnitQuat conj(const UnitQuat& q) { return q.conjugate(); }

Vec3 rotate(const UnitQuat& q, const Vec3& p) {
  // q p q* for unit q.
  const Vec3 t = 2.0 * q.u().cross(p);
  return p + q.v() * t + q.u().cross(t);
}

UnitQuat exp_map(const RotVec& r) {
  const double n = r.norm();
  if (!(n < std::numbers::pi)) {
    throw DomainError("exp_map: |r| must be below pi, got " + std::to_string(n));
  }
  if (n == 0.0) {
    return UnitQuat::identity();
  }
  return {std::cos(n), std::sin(n) * r.value / n};
}

RotVec log_map(const UnitQuat& q) {
  const double un = q.u().norm();
  if (un < kSmallVector) {
    if (q.v() <= -1.0 + kSmallVector) {
      throw DomainError("log_map: undefined at the antipodal quaternion -1");
    }
    return {};
  }
  // atan2 equals arccos(v) on S^3 without loss of precision near the identity.
  return RotVec(std::atan2(un, q.v()) * q.u() / un);
}

UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InvalidArgument("slerp: fraction must lie in [0, 1]");
  }
  const UnitQuat bb = a.dot(b) < 0.0 ? -b : b;
  if (s == 0.0) return a;
  if (s == 1.0) return bb;

  const Eigen::Vector4d qa = as_vec4(a);
  const Eigen::Vector4d qb = as_vec4(bb);
  const double theta = half_chord_angle(qa, qb);
  Eigen::Vector4d out;
  if (theta < 1e-9) {
    out = (1.0 - s) * qa + s * qb;
  } else {
    const double st = std::sin(theta);
    out = (std::sin((1.0 - s) * theta) / st) * qa + (std::sin(s * theta) / st) * qb;
  }
  return {out[0], out[1], out[2], out[3]};
}

double geodesic_angle(const UnitQuat& a, const UnitQuat& b) {
  const UnitQuat bb = a.dot(b) < 0.0 ? -b : b;
  const double half = half_chord_angle(as_vec4(a), as_vec4(bb));
  return 2.0 * half * 180.0 / std::numbers::pi;
}

std::vector<UnitQuat> continuity_fix(std::span<const UnitQuat> seq) {
  std::vector<UnitQuat> out(seq.begin(), seq.end());
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k - 1].dot(out[k]) < 0.0) {
      out[k] = -out[k];
    }
  }
  return out;
}

}  // namespace lfd
