#include "lfd/dmp_orientation.hpp"

#include <cmath>
#include <string>

#include "lfd/errors.hpp"
#include "lfd/preprocess.hpp"

namespace lfd {

namespace {

constexpr double kDegenerateScaling = 1e-10;
constexpr char kAxisNames[3] = {'x', 'y', 'z'};

OrientationRollout integrate(const OrientationDmpModel& model, const RolloutConfig& cfg,
                             const GoalSwitch<UnitQuat>* sw) {
  validate(model);
  validate(cfg);

  const UnitQuat q0 = cfg.start_quat_override.value_or(model.q0);
  UnitQuat goal = cfg.goal_quat_override.value_or(model.g_o);
  const double dt = cfg.horizon_scale / static_cast<double>(cfg.n_pts - 1);
  const double blend = sw ? 1.0 - std::exp(-sw->alpha_g * dt) : 0.0;

  Vec3 scaling;
  try {
    scaling = orientation_error_term(q0, goal);
  } catch (const DomainError& e) {
    throw DomainError(e.what(), std::size_t{0});
  }

  OrientationRollout out;
  out.stamps.reserve(cfg.n_pts);
  out.orientations.reserve(cfg.n_pts);
  out.angular_velocities.reserve(cfg.n_pts);
  out.phase.reserve(cfg.n_pts);

  UnitQuat q = q0;
  Vec3 omega = Vec3::Zero();
  double x = 1.0;
  for (std::size_t k = 0; k < cfg.n_pts; ++k) {
    const double t = static_cast<double>(k) * dt;
    out.stamps.push_back(t * model.duration);
    out.orientations.push_back(q);
    out.angular_velocities.push_back(omega / model.duration);
    out.phase.push_back(x);
    if (k + 1 == cfg.n_pts) break;

    try {
      if (sw && t >= sw->switch_time) {
        goal = slerp(goal, sw->new_goal, blend);
        scaling = orientation_error_term(q0, goal);
      }
      const Vec3 err = orientation_error_term(q, goal);
      Vec3 acc;
      for (int a = 0; a < 3; ++a) {
        const double f = forcing_from_weights(model.basis, model.weights[a], x, scaling[a]);
        acc[a] = model.gains.alpha * (model.gains.beta * err[a] - omega[a]) + f;
      }
      q = exp_map(RotVec(0.5 * dt * omega)) * q;
      omega += acc * dt;
    } catch (const DomainError& e) {
      throw DomainError(e.what(), k);
    }
    x = advance_phase(model.canonical, x, dt, cfg.phase_stop);
  }
  return out;
}

}  // namespace

Vec3 orientation_error_term(const UnitQuat& q, const UnitQuat& g) {
  UnitQuat rel = g * conj(q);
  if (rel.v() < 0.0) rel = -rel;
  if (rel.v() < 1e-12) {
    throw DomainError("orientation error: rotations are 180 degrees apart");
  }
  return 2.0 * log_map(rel).value;
}

void validate(const OrientationDmpModel& model) {
  if (!(model.gains.alpha > 0.0 && model.gains.beta > 0.0)) {
    throw InvalidArgument("orientation model: gains must be positive");
  }
  if (!(model.duration > 0.0)) {
    throw InvalidArgument("orientation model: duration must be positive");
  }
  if (model.basis.size() == 0 || model.basis.widths.size() != model.basis.size()) {
    throw InvalidArgument("orientation model: malformed basis");
  }
  for (const auto& w : model.weights) {
    if (static_cast<std::size_t>(w.size()) != model.basis.size()) {
      throw InvalidArgument("orientation model: weights must be 3 x n_bfs");
    }
  }
  const Vec3 expected = orientation_error_term(model.q0, model.g_o);
  if ((expected - model.scaling).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("orientation model: scaling does not match q0 and g_o");
  }
}

OrientationFit fit_orientation(const TimedPoseTrajectory& demo, const DmpGains& gains, std::size_t n_bfs,
                               const CanonicalSystem& canonical) {
  validate(demo);
  if (demo.size() < 5) {
    throw TooFewSamples("fit_orientation: need at least 5 samples, got " + std::to_string(demo.size()));
  }
  if (!(gains.alpha > 0.0 && gains.beta > 0.0)) {
    throw InvalidArgument("fit_orientation: gains must be positive");
  }
  const TimedPoseTrajectory norm = normalize_demo_time(demo);
  const std::size_t n = norm.size();
  const double h = 1.0 / static_cast<double>(n - 1);
  const std::vector<UnitQuat>& q = norm.orientations;

  OrientationFit fit;
  OrientationDmpModel& model = fit.model;
  model.gains = gains;
  model.canonical = canonical;
  model.basis = make_basis(canonical, n_bfs, 1.0);
  model.q0 = q.front();
  model.g_o = q.back();
  model.scaling = orientation_error_term(model.q0, model.g_o);
  model.duration = demo.duration();

  const std::vector<Vec3> omega = angular_velocity_forward(q, h);
  const std::vector<Vec3> omega_dot = forward_difference(omega, h);

  std::vector<double> phases(n);
  std::vector<Vec3> rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    phases[k] = phase_at(canonical, norm.stamps[k]);
    const Vec3 err = orientation_error_term(q[k], model.g_o);
    rhs[k] = omega_dot[k] - gains.alpha * (gains.beta * err - omega[k]);
  }

  for (int a = 0; a < 3; ++a) {
    model.weights[a] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_bfs));
    const double d = model.scaling[a];
    if (std::abs(d) < kDegenerateScaling) {
      fit.report.degenerate_axis[a] = true;
      fit.report.warnings.push_back(std::string("orientation axis ") + kAxisNames[a] +
                                    ": no net rotation, forcing term disabled");
      double sq = 0.0;
      for (std::size_t k = 0; k < n; ++k) sq += rhs[k][a] * rhs[k][a];
      fit.report.residual_rms[a] = std::sqrt(sq / static_cast<double>(n));
      continue;
    }
    LwrProblem problem;
    problem.phases = phases;
    problem.scale_track = phases;
    problem.targets.resize(n);
    for (std::size_t k = 0; k < n; ++k) problem.targets[k] = rhs[k][a] / d;
    const LwrFit lwr = lwr_fit(problem, model.basis);
    model.weights[a] = lwr.weights;

    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = rhs[k][a] - forcing_from_weights(model.basis, lwr.weights, phases[k], d);
      sq += r * r;
    }
    fit.report.residual_rms[a] = std::sqrt(sq / static_cast<double>(n));
  }
  return fit;
}

OrientationRollout rollout_orientation(const OrientationDmpModel& model, const RolloutConfig& cfg) {
  return integrate(model, cfg, nullptr);
}

OrientationRollout goal_switch_orientation(const OrientationDmpModel& model, const RolloutConfig& cfg,
                                           const GoalSwitch<UnitQuat>& sw) {
  if (!(sw.alpha_g > 0.0)) {
    throw InvalidArgument("goal switch: alpha_g must be positive");
  }
  return integrate(model, cfg, &sw);
}

}  // namespace lfd
