#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfd/quat.hpp"

namespace lfd {

/// Timestamped Cartesian poses (meters, seconds, scalar-first quaternions).
struct TimedPoseTrajectory {
  std::vector<double> stamps;
  std::vector<Vec3> positions;
  std::vector<UnitQuat> orientations;
  std::optional<std::string> label;

  std::size_t size() const { return stamps.size(); }
  double duration() const { return stamps.empty() ? 0.0 : stamps.back() - stamps.front(); }

  /// Copy of samples [first, last] inclusive; the label is kept.
  TimedPoseTrajectory slice(std::size_t first, std::size_t last) const;
};

/// Throws InvalidArgument on mismatched lengths or fewer than two samples, and
/// NonMonotonicTime unless stamps strictly increase.
void validate(const TimedPoseTrajectory& traj);

/// Validates and makes the orientations hemisphere-continuous.
TimedPoseTrajectory ingest(TimedPoseTrajectory traj);

bool has_uniform_stamps(std::span<const double> stamps, double rel_tol = 1e-6);

}  // namespace lfd
