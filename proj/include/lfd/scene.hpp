#pragma once

#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfd/quat.hpp"
#include "lfd/trajectory.hpp"

namespace lfd {

/// Circular suture needle. In the needle body frame the circle lies in the x-y plane,
/// centered at the origin; the tip is at angle +arc_angle/2 from +x and the tail at
/// -arc_angle/2, so rotating about +z advances the tip.
struct NeedleGeometry {
  double radius = 0.01018;
  double arc_angle = 2.0 * std::numbers::pi / 3.0;

  void validate() const;
  Vec3 tip_offset() const;
  Vec3 tail_offset() const;
};

/// Entry/exit markers on a locally flat tissue surface.
struct SutureScene {
  Vec3 entry = Vec3::Zero();
  Vec3 exit = Vec3::Zero();
  double entry_tol = 0.0015;
  double exit_tol = 0.0015;
  Vec3 surface_normal = Vec3::UnitZ();

  void validate() const;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  UnitQuat orientation;
};

struct RigidTransform {
  UnitQuat rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotate(rotation, p) + translation; }
  Pose apply(const Pose& p) const { return {apply(p.position), rotation * p.orientation}; }
  SutureScene apply(const SutureScene& s) const;
  TimedPoseTrajectory apply(const TimedPoseTrajectory& traj) const;
};

/// Needle tip positions for a trajectory of needle-center poses.
std::vector<Vec3> needle_tip_path(const TimedPoseTrajectory& center_poses, const NeedleGeometry& geom);

/// Endpoint and DTW-mean errors in mm and degrees.
struct ErrorReport {
  double start_pos = 0.0;
  double goal_pos = 0.0;
  double traj_pos = 0.0;
  double start_ori = 0.0;
  double goal_ori = 0.0;
  double traj_ori = 0.0;
};

ErrorReport error_report(const TimedPoseTrajectory& ref, const TimedPoseTrajectory& test);

struct FieldStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double median = 0.0;
};

struct ErrorSummary {
  std::size_t count = 0;
  FieldStats start_pos, goal_pos, traj_pos, start_ori, goal_ori, traj_ori;
};

/// Throws InvalidArgument on an empty batch.
ErrorSummary summarize_errors(std::span<const ErrorReport> reports);

FieldStats field_stats(std::span<const double> values);

enum class CompletionReason { Complete, MissedExit, MissedEntryReasonable, OtherFailure };

/// Grade in tenths: 10, 8, 4, 0.
int level_tenths(CompletionReason reason);
const char* reason_name(CompletionReason reason);

struct GeneralityScore {
  double level = 0.0;
  CompletionReason reason = CompletionReason::OtherFailure;
  std::vector<std::string> warnings;

  static GeneralityScore from_reason(CompletionReason reason);
};

/// A marker is hit when the path comes within its tolerance and crosses the surface
/// plane (downwards at entry, upwards at exit) within that tolerance of the marker.
/// Without an entry hit, `reference` decides between a reasonable partial attempt
/// (DTW mean distance <= reasonable_tol) and a failure.
GeneralityScore score_generality(std::span<const Vec3> tip_path, const SutureScene& scene,
                                 std::optional<std::span<const Vec3>> reference, double reasonable_tol);

/// Mean grade, computed on integer tenths so that exact fractions are exact.
double mean_generality(std::span<const CompletionReason> reasons);

enum class SutureTask { Insert, Extract };

struct TaskGoals {
  Pose start;
  Pose goal;
};

/// Needle-center poses for a throw. The needle circle passes through both markers in
/// the plane spanned by the entry-exit chord and the surface normal, centered above the
/// surface. Insert: tip at entry -> tip at exit. Extract: tip at exit -> tail at exit.
/// Throws DegenerateScene when the chord is parallel to the normal, or when the needle
/// cannot span the chord (chord >= diameter, or chord angle >= arc angle).
TaskGoals derive_task_goals(const SutureScene& scene, const NeedleGeometry& geom, SutureTask task);

struct SubtaskSuccess {
  std::size_t attempts = 0;
  std::size_t successes = 0;
  std::size_t cumulative = 0;  // trials that succeeded on this and every earlier subtask
  std::size_t trials = 0;

  double individual_rate() const { return attempts ? static_cast<double>(successes) / attempts : 0.0; }
  double overall_rate() const { return trials ? static_cast<double>(cumulative) / trials : 0.0; }
};

/// outcomes[trial][subtask]. A subtask is attempted only if all earlier ones succeeded;
/// later entries of a failed trial are ignored. Throws InvalidArgument if not rectangular.
std::vector<SubtaskSuccess> aggregate_success(const std::vector<std::vector<bool>>& outcomes);

struct DurationStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
};

/// Throws InvalidArgument for an empty group.
DurationStats duration_stats(std::span<const TimedPoseTrajectory> group);
std::map<std::string, DurationStats> duration_stats(const std::map<std::string, std::vector<TimedPoseTrajectory>>& groups);

/// Mean duration of `candidate` over mean duration of `baseline`.
double duration_ratio(const DurationStats& baseline, const DurationStats& candidate);

}  // namespace lfd
