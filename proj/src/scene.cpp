#include "lfd/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Geometry>

#include "lfd/errors.hpp"
#include "lfd/preprocess.hpp"

namespace lfd {

namespace {

constexpr double kPlaneBand = 1e-9;  // m, samples this close to the surface count as on it

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + s * ab - p).norm();
}

double min_distance(std::span<const Vec3> path, const Vec3& p) {
  if (path.size() == 1) return (path[0] - p).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    best = std::min(best, point_segment_distance(p, path[k], path[k + 1]));
  }
  return best;
}

// Does the path cross the plane through `marker` within `tol` of it?
// downward: from the normal side to the far side.
bool crosses_near(std::span<const Vec3> path, const Vec3& marker, const Vec3& normal, double tol, bool downward) {
  const double sign = downward ? 1.0 : -1.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double h0 = sign * normal.dot(path[k] - marker);
    const double h1 = sign * normal.dot(path[k + 1] - marker);
    if (h0 >= -kPlaneBand && h1 < -kPlaneBand) {
      const double s = h0 > h1 ? std::clamp(h0 / (h0 - h1), 0.0, 1.0) : 0.0;
      const Vec3 hit = path[k] + s * (path[k + 1] - path[k]);
      if ((hit - marker).norm() <= tol) return true;
    }
  }
  return false;
}

UnitQuat frame_to_quat(const Vec3& e1, const Vec3& e2, const Vec3& e3) {
  Eigen::Matrix3d m;
  m.col(0) = e1;
  m.col(1) = e2;
  m.col(2) = e3;
  const Eigen::Quaterniond q(m);
  return {q.w(), q.x(), q.y(), q.z()};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void NeedleGeometry::validate() const {
  if (!(radius > 0.0)) throw InvalidArgument("needle radius must be positive");
  if (!(arc_angle > 0.0 && arc_angle < 2.0 * std::numbers::pi)) {
    throw InvalidArgument("needle arc angle must lie in (0, 2 pi)");
  }
}

Vec3 NeedleGeometry::tip_offset() const {
  return {radius * std::cos(0.5 * arc_angle), radius * std::sin(0.5 * arc_angle), 0.0};
}

Vec3 NeedleGeometry::tail_offset() const {
  return {radius * std::cos(0.5 * arc_angle), -radius * std::sin(0.5 * arc_angle), 0.0};
}

void SutureScene::validate() const {
  if (!entry.allFinite() || !exit.allFinite()) throw InvalidArgument("scene: markers must be finite");
  if ((exit - entry).norm() == 0.0) throw InvalidArgument("scene: entry and exit coincide");
  if (!(entry_tol > 0.0 && exit_tol > 0.0)) throw InvalidArgument("scene: tolerances must be positive");
  if (std::abs(surface_normal.norm() - 1.0) > 1e-9) throw InvalidArgument("scene: surface normal must be unit");
}

SutureScene RigidTransform::apply(const SutureScene& s) const {
  SutureScene out = s;
  out.entry = apply(s.entry);
  out.exit = apply(s.exit);
  out.surface_normal = rotate(rotation, s.surface_normal);
  return out;
}

TimedPoseTrajectory RigidTransform::apply(const TimedPoseTrajectory& traj) const {
  TimedPoseTrajectory out = traj;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out.positions[k] = apply(traj.positions[k]);
    out.orientations[k] = rotation * traj.orientations[k];
  }
  return out;
}

std::vector<Vec3> needle_tip_path(const TimedPoseTrajectory& center_poses, const NeedleGeometry& geom) {
  geom.validate();
  const Vec3 offset = geom.tip_offset();
  std::vector<Vec3> tips(center_poses.size());
  for (std::size_t k = 0; k < tips.size(); ++k) {
    tips[k] = center_poses.positions[k] + rotate(center_poses.orientations[k], offset);
  }
  return tips;
}

ErrorReport error_report(const TimedPoseTrajectory& ref, const TimedPoseTrajectory& test) {
  if (ref.size() == 0 || test.size() == 0) {
    throw InvalidArgument("error_report: trajectories must be nonempty");
  }
  ErrorReport r;
  r.start_pos = 1e3 * (ref.positions.front() - test.positions.front()).norm();
  r.goal_pos = 1e3 * (ref.positions.back() - test.positions.back()).norm();
  r.traj_pos = 1e3 * dtw_align(ref, test, DtwMetric::Position).mean_cost;
  r.start_ori = geodesic_angle(ref.orientations.front(), test.orientations.front());
  r.goal_ori = geodesic_angle(ref.orientations.back(), test.orientations.back());
  r.traj_ori = dtw_align(ref, test, DtwMetric::Orientation).mean_cost;
  return r;
}

FieldStats field_stats(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("field_stats: empty input");
  const double n = static_cast<double>(values.size());
  FieldStats s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / n);
  s.median = median_of({values.begin(), values.end()});
  return s;
}

ErrorSummary summarize_errors(std::span<const ErrorReport> reports) {
  if (reports.empty()) throw InvalidArgument("summarize_errors: empty batch");
  auto column = [&](double ErrorReport::*field) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(r.*field);
    return field_stats(v);
  };
  ErrorSummary s;
  s.count = reports.size();
  s.start_pos = column(&ErrorReport::start_pos);
  s.goal_pos = column(&ErrorReport::goal_pos);
  s.traj_pos = column(&ErrorReport::traj_pos);
  s.start_ori = column(&ErrorReport::start_ori);
  s.goal_ori = column(&ErrorReport::goal_ori);
  s.traj_ori = column(&ErrorReport::traj_ori);
  return s;
}

int level_tenths(CompletionReason reason) {
  switch (reason) {
    case CompletionReason::Complete: return 10;
    case CompletionReason::MissedExit: return 8;
    case CompletionReason::MissedEntryReasonable: return 4;
    case CompletionReason::OtherFailure: return 0;
  }
  return 0;
}

const char* reason_name(CompletionReason reason) {
  switch (reason) {
    case CompletionReason::Complete: return "complete";
    case CompletionReason::MissedExit: return "missed_exit";
    case CompletionReason::MissedEntryReasonable: return "missed_entry_reasonable";
    case CompletionReason::OtherFailure: return "other_failure";
  }
  return "other_failure";
}

GeneralityScore GeneralityScore::from_reason(CompletionReason reason) {
  GeneralityScore s;
  s.reason = reason;
  s.level = level_tenths(reason) / 10.0;
  return s;
}

GeneralityScore score_generality(std::span<const Vec3> tip_path, const SutureScene& scene,
                                 std::optional<std::span<const Vec3>> reference, double reasonable_tol) {
  if (tip_path.empty()) throw InvalidArgument("score_generality: empty tip path");
  scene.validate();
  const Vec3& n = scene.surface_normal;

  const bool entry_hit = min_distance(tip_path, scene.entry) <= scene.entry_tol &&
                         crosses_near(tip_path, scene.entry, n, scene.entry_tol, true);
  const bool exit_hit = min_distance(tip_path, scene.exit) <= scene.exit_tol &&
                        crosses_near(tip_path, scene.exit, n, scene.exit_tol, false);

  if (entry_hit) {
    return GeneralityScore::from_reason(exit_hit ? CompletionReason::Complete : CompletionReason::MissedExit);
  }
  if (!reference || reference->empty()) {
    GeneralityScore s = GeneralityScore::from_reason(CompletionReason::OtherFailure);
    s.warnings.push_back("entry marker missed and no reference path given; scored as failure");
    return s;
  }
  const double dtw_mean = dtw_align(tip_path, *reference).mean_cost;
  return GeneralityScore::from_reason(dtw_mean <= reasonable_tol ? CompletionReason::MissedEntryReasonable
                                                                 : CompletionReason::OtherFailure);
}

double mean_generality(std::span<const CompletionReason> reasons) {
  if (reasons.empty()) throw InvalidArgument("mean_generality: empty input");
  long long tenths = 0;
  for (auto r : reasons) tenths += level_tenths(r);
  return static_cast<double>(tenths) / (10.0 * static_cast<double>(reasons.size()));
}

TaskGoals derive_task_goals(const SutureScene& scene, const NeedleGeometry& geom, SutureTask task) {
  scene.validate();
  geom.validate();
  const Vec3 chord = scene.exit - scene.entry;
  const double d = chord.norm();
  const Vec3 e1 = chord / d;
  const Vec3 n_perp = scene.surface_normal - scene.surface_normal.dot(e1) * e1;
  if (n_perp.norm() < 1e-9) {
    throw DegenerateScene("entry-exit chord is parallel to the surface normal");
  }
  const double r = geom.radius;
  if (d >= 2.0 * r) {
    throw DegenerateScene("entry-exit distance exceeds the needle diameter");
  }
  const double chord_angle = 2.0 * std::asin(d / (2.0 * r));
  if (chord_angle >= geom.arc_angle) {
    throw DegenerateScene("needle arc is too short to span the entry-exit chord");
  }

  const Vec3 e2 = n_perp / n_perp.norm();
  const Vec3 e3 = e1.cross(e2);
  const Vec3 center = 0.5 * (scene.entry + scene.exit) + std::sqrt(r * r - 0.25 * d * d) * e2;
  const UnitQuat frame = frame_to_quat(e1, e2, e3);

  // Angles below are measured in the (e1, e2) plane around the center.
  const double entry_angle = std::atan2((scene.entry - center).dot(e2), (scene.entry - center).dot(e1));
  const double exit_angle = std::atan2((scene.exit - center).dot(e2), (scene.exit - center).dot(e1));
  const double half_arc = 0.5 * geom.arc_angle;
  auto pose_at = [&](double body_angle) {
    return Pose{center, frame * exp_map(RotVec(0.0, 0.0, 0.5 * body_angle))};
  };
  auto wrap = [](double a) { return std::atan2(std::sin(a), std::cos(a)); };

  const Pose tip_at_entry = pose_at(wrap(entry_angle - half_arc));
  const Pose tip_at_exit = pose_at(wrap(exit_angle - half_arc));
  const Pose tail_at_exit = pose_at(wrap(exit_angle + half_arc));
  if (task == SutureTask::Insert) return {tip_at_entry, tip_at_exit};
  return {tip_at_exit, tail_at_exit};
}

std::vector<SubtaskSuccess> aggregate_success(const std::vector<std::vector<bool>>& outcomes) {
  if (outcomes.empty()) return {};
  const std::size_t subtasks = outcomes.front().size();
  std::vector<SubtaskSuccess> out(subtasks);
  for (auto& s : out) s.trials = outcomes.size();
  for (const auto& trial : outcomes) {
    if (trial.size() != subtasks) throw InvalidArgument("aggregate_success: outcomes must be rectangular");
    for (std::size_t k = 0; k < subtasks; ++k) {
      ++out[k].attempts;
      if (!trial[k]) break;
      ++out[k].successes;
      ++out[k].cumulative;
    }
  }
  return out;
}

DurationStats duration_stats(std::span<const TimedPoseTrajectory> group) {
  if (group.empty()) throw InvalidArgument("duration_stats: empty group");
  std::vector<double> d;
  d.reserve(group.size());
  for (const auto& t : group) d.push_back(t.duration());
  const FieldStats f = field_stats(d);
  return {group.size(), f.mean, f.std};
}

std::map<std::string, DurationStats> duration_stats(
    const std::map<std::string, std::vector<TimedPoseTrajectory>>& groups) {
  for (const auto& [name, g] : groups) {
    if (g.empty()) throw InvalidArgument("duration_stats: group '" + name + "' is empty");
  }
  std::map<std::string, DurationStats> out;
  for (const auto& [name, g] : groups) out[name] = duration_stats(g);
  return out;
}

double duration_ratio(const DurationStats& baseline, const DurationStats& candidate) {
  if (!(baseline.mean > 0.0)) throw InvalidArgument("duration_ratio: baseline mean must be positive");
  return candidate.mean / baseline.mean;
}

}  // namespace lfd
