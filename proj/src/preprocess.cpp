#include "lfd/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lfd/errors.hpp"

namespace lfd {

namespace {

// Finite-difference weights for derivatives 0..2 at z over arbitrary nodes (Fornberg).
// weights[j][d] multiplies f(nodes[j]) in the d-th derivative estimate.
std::vector<std::array<double, 3>> fd_weights(double z, std::span<const double> nodes) {
  constexpr int kMaxOrder = 2;
  const std::size_t n = nodes.size();
  std::vector<std::array<double, 3>> c(n, {0.0, 0.0, 0.0});
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min(static_cast<int>(i), kMaxOrder);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  return c;
}

struct KnotData {
  std::vector<Vec3> velocity;
  std::vector<Vec3> acceleration;
};

// Velocity and acceleration at every knot from the interpolating polynomial through
// the (up to) six nearest knots.
KnotData knot_derivatives(std::span<const double> t, std::span<const Vec3> p) {
  const std::size_t n = t.size();
  const std::size_t width = std::min<std::size_t>(6, n);
  KnotData out;
  out.velocity.assign(n, Vec3::Zero());
  out.acceleration.assign(n, Vec3::Zero());
  std::vector<double> local(width);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = std::min(k >= 2 ? k - 2 : 0, n - width);
    for (std::size_t j = 0; j < width; ++j) local[j] = t[lo + j] - t[k];
    const auto w = fd_weights(0.0, local);
    for (std::size_t j = 0; j < width; ++j) {
      out.velocity[k] += w[j][1] * p[lo + j];
      out.acceleration[k] += w[j][2] * p[lo + j];
    }
  }
  return out;
}

Vec3 quintic_hermite(const Vec3& p0, const Vec3& v0, const Vec3& a0, const Vec3& p1, const Vec3& v1,
                     const Vec3& a1, double h, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s3 * s;
  const double s5 = s4 * s;
  const double h00 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double h10 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double h20 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double h01 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  const double h11 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double h21 = 0.5 * s3 - s4 + 0.5 * s5;
  return h00 * p0 + h10 * h * v0 + h20 * h * h * a0 + h01 * p1 + h11 * h * v1 + h21 * h * h * a1;
}

}  // namespace

std::vector<SegmentRange> find_segments(const TimedPoseTrajectory& traj, const SegmentationConfig& cfg) {
  validate(traj);
  if (!(cfg.speed_threshold > 0.0 && cfg.dwell_min > 0.0 && cfg.min_segment > 0.0)) {
    throw InvalidArgument("segmentation thresholds must be positive");
  }
  const std::size_t intervals = traj.size() - 1;
  std::vector<bool> slow(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    const double dt = traj.stamps[k + 1] - traj.stamps[k];
    slow[k] = (traj.positions[k + 1] - traj.positions[k]).norm() / dt < cfg.speed_threshold;
  }

  std::vector<bool> cut(intervals, false);
  for (std::size_t k = 0; k < intervals;) {
    if (!slow[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < intervals && slow[end]) ++end;
    const double dwell = traj.stamps[end] - traj.stamps[k];
    if (dwell >= cfg.dwell_min || k == 0 || end == intervals) {
      std::fill(cut.begin() + static_cast<std::ptrdiff_t>(k), cut.begin() + static_cast<std::ptrdiff_t>(end), true);
    }
    k = end;
  }

  std::vector<SegmentRange> segments;
  for (std::size_t k = 0; k < intervals;) {
    if (cut[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < intervals && !cut[end]) ++end;
    // intervals [k, end) span samples k..end
    if (traj.stamps[end] - traj.stamps[k] >= cfg.min_segment) {
      segments.push_back({k, end});
    }
    k = end;
  }
  return segments;
}

std::vector<TimedPoseTrajectory> segment_by_velocity(const TimedPoseTrajectory& traj,
                                                     const SegmentationConfig& cfg) {
  std::vector<TimedPoseTrajectory> out;
  for (const auto& r : find_segments(traj, cfg)) {
    out.push_back(traj.slice(r.first, r.last));
  }
  return out;
}

TimedPoseTrajectory resample_uniform(const TimedPoseTrajectory& traj, std::size_t n_pts) {
  validate(traj);
  if (n_pts < 2) {
    throw InvalidArgument("resample_uniform: need at least two output points");
  }
  const std::size_t n = traj.size();
  const KnotData knots = knot_derivatives(traj.stamps, traj.positions);
  const std::vector<UnitQuat> q = continuity_fix(traj.orientations);

  TimedPoseTrajectory out;
  out.label = traj.label;
  out.stamps.resize(n_pts);
  out.positions.resize(n_pts);
  out.orientations.resize(n_pts);

  const double t0 = traj.stamps.front();
  const double t1 = traj.stamps.back();
  std::size_t seg = 0;
  for (std::size_t j = 0; j < n_pts; ++j) {
    if (j == 0 || j == n_pts - 1) {
      const std::size_t src = j == 0 ? 0 : n - 1;
      out.stamps[j] = traj.stamps[src];
      out.positions[j] = traj.positions[src];
      out.orientations[j] = traj.orientations[src];
      continue;
    }
    const double t = t0 + (t1 - t0) * static_cast<double>(j) / static_cast<double>(n_pts - 1);
    while (seg + 2 < n && traj.stamps[seg + 1] <= t) ++seg;
    const double h = traj.stamps[seg + 1] - traj.stamps[seg];
    const double s = std::clamp((t - traj.stamps[seg]) / h, 0.0, 1.0);
    out.stamps[j] = t;
    out.positions[j] = quintic_hermite(traj.positions[seg], knots.velocity[seg], knots.acceleration[seg],
                                       traj.positions[seg + 1], knots.velocity[seg + 1],
                                       knots.acceleration[seg + 1], h, s);
    out.orientations[j] = slerp(q[seg], q[seg + 1], s);
  }
  out.orientations = continuity_fix(out.orientations);
  return out;
}

TimedPoseTrajectory normalize_demo_time(const TimedPoseTrajectory& demo) {
  TimedPoseTrajectory uniform = has_uniform_stamps(demo.stamps) ? demo : resample_uniform(demo, demo.size());
  const std::size_t n = uniform.size();
  for (std::size_t k = 0; k < n; ++k) {
    uniform.stamps[k] = static_cast<double>(k) / static_cast<double>(n - 1);
  }
  uniform.orientations = continuity_fix(uniform.orientations);
  return uniform;
}

std::vector<Vec3> forward_difference(std::span<const Vec3> values, double h) {
  std::vector<Vec3> out(values.size(), Vec3::Zero());
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    out[k] = (values[k + 1] - values[k]) / h;
  }
  if (values.size() >= 2) out.back() = out[values.size() - 2];
  return out;
}

std::vector<Vec3> angular_velocity_forward(std::span<const UnitQuat> q, double h) {
  std::vector<Vec3> out(q.size(), Vec3::Zero());
  for (std::size_t k = 0; k + 1 < q.size(); ++k) {
    UnitQuat rel = q[k + 1] * conj(q[k]);
    if (rel.v() < 0.0) rel = -rel;
    if (std::abs(rel.v()) < 1e-12) {
      throw DomainError("consecutive orientations are 180 degrees apart", k);
    }
    out[k] = 2.0 * log_map(rel).value / h;
  }
  if (q.size() >= 2) out.back() = out[q.size() - 2];
  return out;
}

Derivatives derivatives(const TimedPoseTrajectory& traj) {
  validate(traj);
  const std::size_t n = traj.size();
  if (n < 3) {
    throw TooFewSamples("derivatives: need at least 3 samples");
  }
  if (!has_uniform_stamps(traj.stamps)) {
    throw NonUniformStamps("derivatives: stamps must be uniform, resample first");
  }
  const double h = traj.duration() / static_cast<double>(n - 1);
  const auto& p = traj.positions;

  Derivatives d;
  d.velocity.resize(n);
  d.acceleration.resize(n);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    d.velocity[k] = (p[k + 1] - p[k - 1]) / (2.0 * h);
    d.acceleration[k] = (p[k + 1] - 2.0 * p[k] + p[k - 1]) / (h * h);
  }
  d.velocity[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h);
  d.velocity[n - 1] = (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * h);
  if (n >= 4) {
    d.acceleration[0] = (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / (h * h);
    d.acceleration[n - 1] = (2.0 * p[n - 1] - 5.0 * p[n - 2] + 4.0 * p[n - 3] - p[n - 4]) / (h * h);
  } else {
    d.acceleration[0] = d.acceleration[1];
    d.acceleration[n - 1] = d.acceleration[n - 2];
  }

  const std::vector<UnitQuat> q = continuity_fix(traj.orientations);
  d.angular_velocity = angular_velocity_forward(q, h);
  d.angular_acceleration = forward_difference(d.angular_velocity, h);
  return d;
}

DtwResult dtw_align(std::size_t n, std::size_t m,
                    const std::function<double(std::size_t, std::size_t)>& cost) {
  if (n == 0 || m == 0) {
    throw InvalidArgument("dtw_align: sequences must be nonempty");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> acc(n * m, kInf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
        if (i > 0) best = std::min(best, at(i - 1, j));
        if (j > 0) best = std::min(best, at(i, j - 1));
      }
      at(i, j) = best + cost(i, j);
    }
  }

  DtwResult result;
  result.total_cost = at(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  result.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  result.mean_cost = result.total_cost / static_cast<double>(result.path.size());
  return result;
}

DtwResult dtw_align(std::span<const double> ref, std::span<const double> test) {
  return dtw_align(ref.size(), test.size(),
                   [&](std::size_t i, std::size_t j) { return std::abs(ref[i] - test[j]); });
}

DtwResult dtw_align(std::span<const Vec3> ref, std::span<const Vec3> test) {
  return dtw_align(ref.size(), test.size(),
                   [&](std::size_t i, std::size_t j) { return (ref[i] - test[j]).norm(); });
}

DtwResult dtw_align(std::span<const UnitQuat> ref, std::span<const UnitQuat> test) {
  return dtw_align(ref.size(), test.size(),
                   [&](std::size_t i, std::size_t j) { return geodesic_angle(ref[i], test[j]); });
}

DtwResult dtw_align(const TimedPoseTrajectory& ref, const TimedPoseTrajectory& test, DtwMetric metric) {
  if (metric == DtwMetric::Position) {
    return dtw_align(std::span<const Vec3>(ref.positions), std::span<const Vec3>(test.positions));
  }
  return dtw_align(std::span<const UnitQuat>(ref.orientations), std::span<const UnitQuat>(test.orientations));
}

}  // namespace lfd
