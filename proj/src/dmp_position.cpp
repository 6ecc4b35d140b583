#include "lfd/dmp_position.hpp"

#include <cmath>

#include "lfd/errors.hpp"
#include "lfd/preprocess.hpp"

namespace lfd {

namespace {

constexpr char kAxisNames[3] = {'x', 'y', 'z'};

PositionRollout integrate(const PositionDmpModel& model, const RolloutConfig& cfg,
                          const GoalSwitch<Vec3>* sw) {
  validate(model);
  validate(cfg);

  const Vec3 y0 = cfg.start_override.value_or(model.y0);
  Vec3 goal = cfg.goal_override.value_or(model.g);
  const double dt = cfg.horizon_scale / static_cast<double>(cfg.n_pts - 1);
  const double blend = sw ? 1.0 - std::exp(-sw->alpha_g * dt) : 0.0;

  PositionRollout out;
  out.stamps.reserve(cfg.n_pts);
  out.positions.reserve(cfg.n_pts);
  out.velocities.reserve(cfg.n_pts);
  out.phase.reserve(cfg.n_pts);

  Vec3 y = y0;
  Vec3 v = Vec3::Zero();
  double x = 1.0;
  for (std::size_t k = 0; k < cfg.n_pts; ++k) {
    const double t = static_cast<double>(k) * dt;
    out.stamps.push_back(t * model.duration);
    out.positions.push_back(y);
    out.velocities.push_back(v / model.duration);
    out.phase.push_back(x);
    if (k + 1 == cfg.n_pts) break;

    if (sw && t >= sw->switch_time) {
      goal += blend * (sw->new_goal - goal);
    }
    Vec3 acc;
    for (int a = 0; a < 3; ++a) {
      const double f = forcing_from_weights(model.basis, model.weights[a], x, goal[a] - y0[a]);
      acc[a] = model.gains.alpha * (model.gains.beta * (goal[a] - y[a]) - v[a]) + f;
    }
    y += v * dt;
    v += acc * dt;
    x = advance_phase(model.canonical, x, dt, cfg.phase_stop);
  }
  return out;
}

}  // namespace

void validate(const PositionDmpModel& model) {
  if (!(model.gains.alpha > 0.0 && model.gains.beta > 0.0)) {
    throw InvalidArgument("position model: gains must be positive");
  }
  if (!(model.duration > 0.0)) {
    throw InvalidArgument("position model: duration must be positive");
  }
  if (model.basis.size() == 0 || model.basis.widths.size() != model.basis.size()) {
    throw InvalidArgument("position model: malformed basis");
  }
  for (const auto& w : model.weights) {
    if (static_cast<std::size_t>(w.size()) != model.basis.size()) {
      throw InvalidArgument("position model: weights must be 3 x n_bfs");
    }
  }
}

void validate(const RolloutConfig& cfg) {
  if (cfg.n_pts < 2) {
    throw InvalidArgument("rollout: need at least 2 points");
  }
  if (!(cfg.horizon_scale >= 1.0)) {
    throw InvalidArgument("rollout: horizon_scale must be >= 1");
  }
  if (cfg.phase_stop.error_gain < 0.0) {
    throw InvalidArgument("rollout: phase-stop gain must be non-negative");
  }
}

std::vector<Vec3> position_forcing_target(const TimedPoseTrajectory& normalized_demo, const DmpGains& gains) {
  const Derivatives d = derivatives(normalized_demo);
  const Vec3 g = normalized_demo.positions.back();
  std::vector<Vec3> target(normalized_demo.size());
  for (std::size_t k = 0; k < target.size(); ++k) {
    target[k] = d.acceleration[k] -
                gains.alpha * (gains.beta * (g - normalized_demo.positions[k]) - d.velocity[k]);
  }
  return target;
}

PositionFit fit_position(const TimedPoseTrajectory& demo, const DmpGains& gains, std::size_t n_bfs,
                         const CanonicalSystem& canonical) {
  validate(demo);
  if (demo.size() < 5) {
    throw TooFewSamples("fit_position: need at least 5 samples, got " + std::to_string(demo.size()));
  }
  if (!(gains.alpha > 0.0 && gains.beta > 0.0)) {
    throw InvalidArgument("fit_position: gains must be positive");
  }
  const TimedPoseTrajectory norm = normalize_demo_time(demo);
  const std::vector<Vec3> target = position_forcing_target(norm, gains);

  PositionFit fit;
  PositionDmpModel& model = fit.model;
  model.gains = gains;
  model.canonical = canonical;
  model.basis = make_basis(canonical, n_bfs, 1.0);
  model.y0 = norm.positions.front();
  model.g = norm.positions.back();
  model.duration = demo.duration();

  const std::size_t n = norm.size();
  std::vector<double> phases(n);
  for (std::size_t k = 0; k < n; ++k) phases[k] = phase_at(canonical, norm.stamps[k]);

  const Vec3 offset = model.g - model.y0;
  for (int a = 0; a < 3; ++a) {
    LwrProblem problem;
    problem.phases = phases;
    problem.scale_track.resize(n);
    problem.targets.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      problem.scale_track[k] = phases[k] * offset[a];
      problem.targets[k] = target[k][a];
    }
    const LwrFit lwr = lwr_fit(problem, model.basis);
    model.weights[a] = lwr.weights;
    if (lwr.any_degenerate()) {
      fit.report.degenerate_axis[a] = true;
      fit.report.warnings.push_back(std::string("position axis ") + kAxisNames[a] +
                                    ": start equals goal, forcing term disabled");
    }
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = problem.targets[k] - forcing_from_weights(model.basis, lwr.weights, phases[k], offset[a]);
      sq += r * r;
    }
    fit.report.residual_rms[a] = std::sqrt(sq / static_cast<double>(n));
  }
  return fit;
}

PositionRollout rollout_position(const PositionDmpModel& model, const RolloutConfig& cfg) {
  return integrate(model, cfg, nullptr);
}

PositionRollout goal_switch_position(const PositionDmpModel& model, const RolloutConfig& cfg,
                                     const GoalSwitch<Vec3>& sw) {
  if (!(sw.alpha_g > 0.0)) {
    throw InvalidArgument("goal switch: alpha_g must be positive");
  }
  return integrate(model, cfg, &sw);
}

}  // namespace lfd
