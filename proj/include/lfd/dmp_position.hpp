#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfd/basis.hpp"
#include "lfd/quat.hpp"
#include "lfd/trajectory.hpp"

namespace lfd {

/// Spring (alpha * beta) and damper (alpha) gains of a transformation system.
/// beta = alpha / 4 is critically damped.
struct DmpGains {
  double alpha = 25.0;
  double beta = 6.25;
};

using AxisWeights = std::array<Eigen::VectorXd, 3>;

/// Discrete position DMP fitted on a duration-normalized demonstration.
struct PositionDmpModel {
  DmpGains gains;
  CanonicalSystem canonical;
  BasisSet basis;
  AxisWeights weights;  // per Cartesian axis, n_bfs each
  Vec3 y0 = Vec3::Zero();
  Vec3 g = Vec3::Zero();
  double duration = 1.0;  // seconds, of the demonstration
};

/// Throws InvalidArgument when gains, duration or weight shapes are inconsistent.
void validate(const PositionDmpModel& model);

struct FitReport {
  std::vector<std::string> warnings;
  std::array<bool, 3> degenerate_axis{false, false, false};
  std::array<double, 3> residual_rms{0.0, 0.0, 0.0};  // forcing-target misfit per axis
};

struct PositionFit {
  PositionDmpModel model;
  FitReport report;
};

/// Forcing target of a duration-normalized, uniformly sampled demo:
/// f_des = y'' - alpha (beta (g - y) - y'), with derivatives by finite differences.
std::vector<Vec3> position_forcing_target(const TimedPoseTrajectory& normalized_demo, const DmpGains& gains);

/// Fits weights per axis with LWR. The demo needs >= 5 strictly increasing samples;
/// non-uniform stamps are resampled to the same count first.
PositionFit fit_position(const TimedPoseTrajectory& demo, const DmpGains& gains, std::size_t n_bfs,
                         const CanonicalSystem& canonical = {});

/// Options shared by position and orientation rollouts.
struct RolloutConfig {
  std::size_t n_pts = 500;
  double horizon_scale = 1.0;  // >= 1, integration continues past the nominal duration
  std::optional<Vec3> start_override;
  std::optional<Vec3> goal_override;
  std::optional<UnitQuat> start_quat_override;
  std::optional<UnitQuat> goal_quat_override;
  PhaseStopState phase_stop;
};

void validate(const RolloutConfig& cfg);

/// Filtered goal change: from `switch_time` (normalized time) on, the active goal
/// relaxes towards `new_goal` at rate alpha_g.
template <typename T>
struct GoalSwitch {
  T new_goal;
  double alpha_g = 10.0;
  double switch_time = 0.0;
};

struct PositionRollout {
  std::vector<double> stamps;  // seconds, t_norm * duration
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;  // m/s
  std::vector<double> phase;
};

/// Explicit Euler integration with dt = horizon_scale / (n_pts - 1) in normalized time.
/// The forcing term is scaled by the effective (g - y0).
PositionRollout rollout_position(const PositionDmpModel& model, const RolloutConfig& cfg);

PositionRollout goal_switch_position(const PositionDmpModel& model, const RolloutConfig& cfg,
                                     const GoalSwitch<Vec3>& sw);

}  // namespace lfd
