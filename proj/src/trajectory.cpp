#include "lfd/trajectory.hpp"

#include <cmath>

#include "lfd/errors.hpp"

namespace lfd {

TimedPoseTrajectory TimedPoseTrajectory::slice(std::size_t first, std::size_t last) const {
  if (first > last || last >= size()) {
    throw InvalidArgument("slice: index range out of bounds");
  }
  const auto b = static_cast<std::ptrdiff_t>(first);
  const auto e = static_cast<std::ptrdiff_t>(last + 1);
  TimedPoseTrajectory out;
  out.stamps.assign(stamps.begin() + b, stamps.begin() + e);
  out.positions.assign(positions.begin() + b, positions.begin() + e);
  out.orientations.assign(orientations.begin() + b, orientations.begin() + e);
  out.label = label;
  return out;
}

void validate(const TimedPoseTrajectory& traj) {
  const std::size_t n = traj.stamps.size();
  if (traj.positions.size() != n || traj.orientations.size() != n) {
    throw InvalidArgument("trajectory: stamps, positions and orientations differ in length");
  }
  if (n < 2) {
    throw InvalidArgument("trajectory: need at least two samples");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(traj.stamps[k]) || !traj.positions[k].allFinite()) {
      throw InvalidArgument("trajectory: non-finite value at sample " + std::to_string(k));
    }
    if (k > 0 && !(traj.stamps[k] > traj.stamps[k - 1])) {
      throw NonMonotonicTime("trajectory: stamps must strictly increase (sample " +
                             std::to_string(k) + ")");
    }
  }
}

TimedPoseTrajectory ingest(TimedPoseTrajectory traj) {
  validate(traj);
  traj.orientations = continuity_fix(traj.orientations);
  return traj;
}

bool has_uniform_stamps(std::span<const double> stamps, double rel_tol) {
  if (stamps.size() < 2) return true;
  const double h = (stamps.back() - stamps.front()) / static_cast<double>(stamps.size() - 1);
  for (std::size_t k = 1; k < stamps.size(); ++k) {
    if (std::abs((stamps[k] - stamps[k - 1]) - h) > rel_tol * h) return false;
  }
  return true;
}

}  // namespace lfd
