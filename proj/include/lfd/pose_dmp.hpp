#pragma once

#include <cstddef>
#include <string>

#include "lfd/dmp_orientation.hpp"
#include "lfd/dmp_position.hpp"
#include "lfd/trajectory.hpp"

namespace lfd {

struct FitSettings {
  CanonicalSystem canonical;
  DmpGains position_gains;
  DmpGains orientation_gains;
  std::size_t n_bfs = 100;
  std::size_t n_bfs_o = 40;
};

/// Position and orientation primitives learned from one demonstration; both run on the
/// same canonical system.
struct PoseDmpModel {
  PositionDmpModel position;
  OrientationDmpModel orientation;
  std::string profile;
};

struct PoseFit {
  PoseDmpModel model;
  FitReport position_report;
  FitReport orientation_report;
};

PoseFit fit_pose(const TimedPoseTrajectory& demo, const FitSettings& settings);

TimedPoseTrajectory rollout_pose(const PoseDmpModel& model, const RolloutConfig& cfg);

}  // namespace lfd
