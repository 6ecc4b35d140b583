#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lfd/trajectory.hpp"

namespace lfd {

struct SegmentationConfig {
  double speed_threshold = 0.002;  // m/s
  double dwell_min = 0.2;          // s, a pause must last this long to split
  double min_segment = 0.5;        // s, shorter segments are dropped
};

/// Inclusive sample range of one segment inside its source trajectory.
struct SegmentRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Speeds are measured per sample interval. A maximal run of intervals slower than the
/// threshold is cut when it lasts at least dwell_min or touches either end of the input;
/// the remaining runs become segments.
std::vector<SegmentRange> find_segments(const TimedPoseTrajectory& traj, const SegmentationConfig& cfg);

std::vector<TimedPoseTrajectory> segment_by_velocity(const TimedPoseTrajectory& traj,
                                                     const SegmentationConfig& cfg);

/// Uniform resampling over [first, last] stamp. Positions use piecewise quintic Hermite
/// interpolation with knot velocities/accelerations from local degree-5 finite differences
/// (exact on quintics); orientations use per-interval slerp. Endpoints are copied verbatim.
TimedPoseTrajectory resample_uniform(const TimedPoseTrajectory& traj, std::size_t n_pts);

/// Uniform copy of the demo re-stamped k / (n - 1) over unit duration; non-uniform input
/// is resampled to its own sample count first.
TimedPoseTrajectory normalize_demo_time(const TimedPoseTrajectory& demo);

struct Derivatives {
  std::vector<Vec3> velocity;
  std::vector<Vec3> acceleration;
  std::vector<Vec3> angular_velocity;      // rad/s
  std::vector<Vec3> angular_acceleration;  // rad/s^2
};

/// Linear velocity/acceleration: central differences inside, second-order one-sided
/// at the ends. Angular velocity: see angular_velocity_forward.
/// Throws TooFewSamples below 3 samples and NonUniformStamps on irregular stamps.
Derivatives derivatives(const TimedPoseTrajectory& traj);

/// omega_k = 2 log(q_{k+1} conj(q_k)) / h for k < n-1, held constant on the last sample.
/// Throws DomainError when consecutive samples are 180 degrees apart.
std::vector<Vec3> angular_velocity_forward(std::span<const UnitQuat> q, double h);

/// Forward differences of a sampled vector signal, last value held.
std::vector<Vec3> forward_difference(std::span<const Vec3> values, double h);

struct DtwResult {
  std::vector<std::pair<std::size_t, std::size_t>> path;
  double total_cost = 0.0;
  double mean_cost = 0.0;  // total over path length
};

/// Classical DTW with the symmetric step set {(1,0), (0,1), (1,1)} on an n x m cost.
DtwResult dtw_align(std::size_t n, std::size_t m,
                    const std::function<double(std::size_t, std::size_t)>& cost);

DtwResult dtw_align(std::span<const double> ref, std::span<const double> test);
/// Euclidean distance, in the input's units.
DtwResult dtw_align(std::span<const Vec3> ref, std::span<const Vec3> test);
/// Geodesic angle, degrees.
DtwResult dtw_align(std::span<const UnitQuat> ref, std::span<const UnitQuat> test);

enum class DtwMetric { Position, Orientation };

DtwResult dtw_align(const TimedPoseTrajectory& ref, const TimedPoseTrajectory& test, DtwMetric metric);

}  // namespace lfd
