#include "lfd/pose_dmp.hpp"

namespace lfd {

PoseFit fit_pose(const TimedPoseTrajectory& demo, const FitSettings& settings) {
  PositionFit pos = fit_position(demo, settings.position_gains, settings.n_bfs, settings.canonical);
  OrientationFit ori = fit_orientation(demo, settings.orientation_gains, settings.n_bfs_o, settings.canonical);
  PoseFit fit;
  fit.model.position = std::move(pos.model);
  fit.model.orientation = std::move(ori.model);
  fit.position_report = std::move(pos.report);
  fit.orientation_report = std::move(ori.report);
  return fit;
}

TimedPoseTrajectory rollout_pose(const PoseDmpModel& model, const RolloutConfig& cfg) {
  PositionRollout pos = rollout_position(model.position, cfg);
  OrientationRollout ori = rollout_orientation(model.orientation, cfg);
  TimedPoseTrajectory out;
  out.stamps = std::move(pos.stamps);
  out.positions = std::move(pos.positions);
  out.orientations = std::move(ori.orientations);
  return out;
}

}  // namespace lfd
