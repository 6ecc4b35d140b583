#pragma once

#include <cstddef>
#include <vector>

#include "lfd/basis.hpp"
#include "lfd/dmp_position.hpp"
#include "lfd/quat.hpp"
#include "lfd/trajectory.hpp"

namespace lfd {

/// Unit-quaternion orientation DMP. The angular state obeys
///   omega' = alpha (beta e - omega) + D diag(mix(x)) x,  e = 2 log(g conj(q)),
/// and the orientation is advanced with q <- exp(omega dt / 2) q.
struct OrientationDmpModel {
  DmpGains gains;
  CanonicalSystem canonical;
  BasisSet basis;
  AxisWeights weights;  // per angular axis
  UnitQuat q0;
  UnitQuat g_o;
  Vec3 scaling = Vec3::Zero();  // diagonal of D = 2 log(g_o conj(q0)), radians
  double duration = 1.0;
};

/// Includes the check that `scaling` matches q0/g_o within 1e-12.
void validate(const OrientationDmpModel& model);

/// 2 log(g conj(q)), taken along the shorter arc so that its norm equals the geodesic
/// angle in radians. Throws DomainError when the two rotations are 180 degrees apart.
Vec3 orientation_error_term(const UnitQuat& q, const UnitQuat& g);

struct OrientationFit {
  OrientationDmpModel model;
  FitReport report;
};

/// Angular velocity and acceleration by forward differences of the normalized demo, then
/// per-axis LWR on D^-1 (omega' - alpha (beta e - omega)) with scale track x(t_k).
/// Axes whose scaling magnitude is below 1e-10 get zero weights and a warning.
OrientationFit fit_orientation(const TimedPoseTrajectory& demo, const DmpGains& gains, std::size_t n_bfs,
                               const CanonicalSystem& canonical = {});

struct OrientationRollout {
  std::vector<double> stamps;
  std::vector<UnitQuat> orientations;
  std::vector<Vec3> angular_velocities;  // rad/s
  std::vector<double> phase;
};

/// Uses cfg.start_quat_override / cfg.goal_quat_override when present; the forcing is
/// scaled by the D of the effective boundaries. Throws DomainError (with step index) if
/// the goal error leaves the log domain.
OrientationRollout rollout_orientation(const OrientationDmpModel& model, const RolloutConfig& cfg);

/// The active goal follows g <- slerp(g, new_goal, 1 - exp(-alpha_g dt)) from switch_time on.
OrientationRollout goal_switch_orientation(const OrientationDmpModel& model, const RolloutConfig& cfg,
                                           const GoalSwitch<UnitQuat>& sw);

}  // namespace lfd
