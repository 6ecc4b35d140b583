#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lfd/dmp_position.hpp"
#include "lfd/errors.hpp"
#include "lfd/preprocess.hpp"
#include "lfd/scene.hpp"
#include "support/synthetic.hpp"

using namespace lfd;
using namespace lfd::testing;

namespace {

PositionDmpModel zero_model(const Vec3& y0, const Vec3& g, std::size_t n_bfs = 50) {
  PositionDmpModel m;
  m.basis = make_basis(m.canonical, n_bfs, 1.0);
  for (auto& w : m.weights) w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_bfs));
  m.y0 = y0;
  m.g = g;
  return m;
}

TimedPoseTrajectory min_jerk_demo(std::size_t samples = 500) {
  DemoSpec s;
  s.goal = Vec3(0.1, 0.0, 0.0);
  s.duration = 1.0;
  s.samples = samples;
  return make_demo(s);
}

double dtw_mean_mm(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  return 1e3 * dtw_align(std::span<const Vec3>(a), std::span<const Vec3>(b)).mean_cost;
}

}  // namespace

TEST(PositionFit, StationaryDemoIsDegenerate) {
  TimedPoseTrajectory demo;
  for (int k = 0; k < 20; ++k) {
    demo.stamps.push_back(0.1 * k);
    demo.positions.emplace_back(0.01, 0.02, 0.03);
    demo.orientations.emplace_back();
  }
  const PositionFit fit = fit_position(demo, {}, 10);
  for (int a = 0; a < 3; ++a) {
    EXPECT_TRUE(fit.report.degenerate_axis[a]);
    EXPECT_LT(fit.model.weights[a].cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_FALSE(fit.report.warnings.empty());
}

TEST(PositionFit, TooFewSamples) {
  TimedPoseTrajectory demo = min_jerk_demo(4);
  EXPECT_THROW(fit_position(demo, {}, 10), TooFewSamples);
}

TEST(PositionFit, RejectsNonMonotonicTime) {
  TimedPoseTrajectory demo = min_jerk_demo(10);
  demo.stamps[5] = demo.stamps[4];
  EXPECT_THROW(fit_position(demo, {}, 10), NonMonotonicTime);
}

TEST(PositionFit, RecordsBoundariesAndDuration) {
  DemoSpec s;
  s.start = Vec3(0.01, -0.02, 0.03);
  s.goal = Vec3(0.05, 0.04, 0.0);
  s.duration = 3.5;
  const PositionFit fit = fit_position(make_demo(s), {}, 100);
  EXPECT_EQ(fit.model.y0, s.start);
  EXPECT_EQ(fit.model.g, s.goal);
  EXPECT_DOUBLE_EQ(fit.model.duration, 3.5);
  EXPECT_EQ(fit.model.gains.alpha, 25.0);
  EXPECT_EQ(fit.model.gains.beta, 6.25);
  EXPECT_EQ(fit.model.basis.size(), 100u);
}

TEST(PositionFit, MinimumJerkReproduction) {
  const TimedPoseTrajectory demo = min_jerk_demo();
  const PositionFit fit = fit_position(demo, {}, 100);
  RolloutConfig rc;
  const PositionRollout r = rollout_position(fit.model, rc);
  ASSERT_EQ(r.positions.size(), 500u);
  EXPECT_LE(dtw_mean_mm(demo.positions, r.positions), 1.0);
  EXPECT_LT(1e3 * (r.positions.back() - demo.positions.back()).norm(), 0.5);
}

// Independent recomputation of the forcing target from the analytic quintic.
TEST(PositionFit, ForcingTargetMatchesAnalyticDerivatives) {
  const TimedPoseTrajectory demo = min_jerk_demo(2001);
  const DmpGains gains;
  const auto f = position_forcing_target(demo, gains);
  const double h = 1.0 / 2000.0;
  for (std::size_t k = 1; k + 1 < demo.size(); k += 97) {
    const double t = k * h;
    const double y = 0.1 * min_jerk(t);
    const double v = 0.1 * 30.0 * t * t * (1 - t) * (1 - t);
    const double a = 0.1 * 60.0 * t * (1 - t) * (1 - 2 * t);
    const double want = a - gains.alpha * (gains.beta * (0.1 - y) - v);
    EXPECT_NEAR(f[k].x(), want, 1e-4 * (std::abs(want) + 1.0));
  }
}

TEST(PositionFit, ForcingTargetMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const TimedPoseTrajectory demo = normalize_demo_time(make_demo(random_demo_spec(rng, 300)));
  const DmpGains gains;
  const auto f = position_forcing_target(demo, gains);
  const Derivatives d = derivatives(demo);
  const Vec3 g = demo.positions.back();
  for (std::size_t k = 0; k < demo.size(); ++k) {
    const Vec3 want = d.acceleration[k] - gains.alpha * (gains.beta * (g - demo.positions[k]) - d.velocity[k]);
    EXPECT_LE((f[k] - want).norm(), 1e-8 * (want.norm() + 1e-12));
  }
}

TEST(PositionRollout, EquilibriumStaysPut) {
  const Vec3 g(0.1, 0.2, 0.3);
  const PositionRollout r = rollout_position(zero_model(g, g), RolloutConfig{});
  for (const auto& p : r.positions) EXPECT_EQ(p, g);
}

TEST(PositionRollout, StartsExactlyAtEffectiveStart) {
  std::mt19937_64 rng(3);
  const PositionFit fit = fit_position(make_demo(random_demo_spec(rng, 200)), {}, 50);
  RolloutConfig rc;
  EXPECT_EQ(rollout_position(fit.model, rc).positions.front(), fit.model.y0);
  rc.start_override = Vec3(0.3, -0.1, 0.7);
  EXPECT_EQ(rollout_position(fit.model, rc).positions.front(), *rc.start_override);
}

// Closed form of the critically damped response from rest: e(t) = (1 + w t) e^{-w t} e0, w = alpha / 2.
TEST(PositionRollout, ZeroWeightsFollowCriticallyDampedResponse) {
  const Vec3 g(0.1, 0.0, 0.0);
  RolloutConfig rc;
  rc.horizon_scale = 2.0;
  rc.n_pts = 4001;
  const PositionRollout r = rollout_position(zero_model(Vec3::Zero(), g), rc);
  EXPECT_LE((r.positions.back() - g).norm(), 1e-3 * g.norm());
  double max_x = 0.0;
  for (const auto& p : r.positions) max_x = std::max(max_x, p.x());
  EXPECT_LE(max_x, 1.05 * g.x());
  const double w = 12.5;
  for (std::size_t k = 0; k < r.positions.size(); k += 250) {
    const double t = 2.0 * k / 4000.0;
    const double want = 0.1 * (1.0 - (1.0 + w * t) * std::exp(-w * t));
    EXPECT_NEAR(r.positions[k].x(), want, 2e-3 * 0.1);
  }
}

TEST(PositionRollout, OutputShapeAndStamps) {
  PositionDmpModel m = zero_model(Vec3::Zero(), Vec3::UnitX());
  m.duration = 4.0;
  RolloutConfig rc;
  rc.n_pts = 101;
  rc.horizon_scale = 1.5;
  const PositionRollout r = rollout_position(m, rc);
  ASSERT_EQ(r.stamps.size(), 101u);
  EXPECT_EQ(r.stamps.front(), 0.0);
  EXPECT_NEAR(r.stamps.back(), 6.0, 1e-12);
  EXPECT_EQ(r.phase.front(), 1.0);
  EXPECT_NEAR(r.phase.back(), std::exp(-1.5), 1e-12);
}

TEST(PositionRollout, GoalOverrideGeneralizes) {
  std::mt19937_64 rng(4);
  const TimedPoseTrajectory demo = make_demo(random_demo_spec(rng, 500));
  const PositionFit fit = fit_position(demo, {}, 100);
  RolloutConfig rc;
  rc.goal_override = fit.model.g + Vec3(0.005, 0.0, 0.0);
  const PositionRollout r = rollout_position(fit.model, rc);
  EXPECT_LT(1e3 * (r.positions.back() - *rc.goal_override).norm(), 0.5);
}

TEST(PositionRollout, TranslationEquivariant) {
  std::mt19937_64 rng(5);
  const PositionFit fit = fit_position(make_demo(random_demo_spec(rng, 300)), {}, 60);
  const Vec3 d(0.02, -0.01, 0.015);
  RolloutConfig rc;
  const PositionRollout a = rollout_position(fit.model, rc);
  rc.start_override = fit.model.y0 + d;
  rc.goal_override = fit.model.g + d;
  const PositionRollout b = rollout_position(fit.model, rc);
  for (std::size_t k = 0; k < a.positions.size(); ++k) EXPECT_LT((b.positions[k] - a.positions[k] - d).norm(), 1e-12);
}

TEST(PositionRollout, ConvergesUnderBoundedRandomWeights) {
  // Small weights: the forcing left at x = e^-2 is then below the tolerance.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const DemoSpec s = random_demo_spec(rng, 2);
    PositionDmpModel m = zero_model(s.start, s.goal, 100);
    for (auto& axis : m.weights) {
      for (auto& v : axis) v = w(rng);
    }
    RolloutConfig rc;
    rc.horizon_scale = 2.0;
    rc.n_pts = 999;
    const PositionRollout r = rollout_position(m, rc);
    EXPECT_LE((r.positions.back() - s.goal).norm(), 1e-3 * (s.goal - s.start).norm());
  }
}

TEST(PositionRollout, SelfDistillationKeepsWeights) {
  std::mt19937_64 rng(7);
  const TimedPoseTrajectory demo = make_demo(random_demo_spec(rng, 500));
  const PositionFit first = fit_position(demo, {}, 100);
  const PositionRollout r = rollout_position(first.model, RolloutConfig{});
  TimedPoseTrajectory regen;
  regen.stamps = r.stamps;
  regen.positions = r.positions;
  regen.orientations.assign(r.positions.size(), UnitQuat());
  // The rollout ends just short of g, so refit on its own boundaries.
  const PositionFit second = fit_position(regen, {}, 100);
  for (int a = 0; a < 3; ++a) {
    const double ref = std::sqrt(first.model.weights[a].squaredNorm() / 100.0);
    const double diff = std::sqrt((second.model.weights[a] - first.model.weights[a]).squaredNorm() / 100.0);
    EXPECT_LT(diff, 0.05 * ref + 1e-9) << "axis " << a;
  }
}

TEST(PositionRollout, RejectsBadConfig) {
  const PositionDmpModel m = zero_model(Vec3::Zero(), Vec3::UnitX());
  RolloutConfig rc;
  rc.n_pts = 1;
  EXPECT_THROW(rollout_position(m, rc), InvalidArgument);
  rc = {};
  rc.horizon_scale = 0.5;
  EXPECT_THROW(rollout_position(m, rc), InvalidArgument);
  rc = {};
  rc.phase_stop.error_gain = -1.0;
  EXPECT_THROW(rollout_position(m, rc), InvalidArgument);
}

TEST(PositionModel, ValidateCatchesShapeErrors) {
  PositionDmpModel m = zero_model(Vec3::Zero(), Vec3::UnitX(), 10);
  EXPECT_NO_THROW(validate(m));
  m.weights[1] = Eigen::VectorXd::Zero(9);
  EXPECT_THROW(validate(m), InvalidArgument);
  m = zero_model(Vec3::Zero(), Vec3::UnitX(), 10);
  m.duration = 0.0;
  EXPECT_THROW(validate(m), InvalidArgument);
  m = zero_model(Vec3::Zero(), Vec3::UnitX(), 10);
  m.gains.beta = -1.0;
  EXPECT_THROW(validate(m), InvalidArgument);
}

TEST(PhaseStop, SlowsPhaseAndZeroErrorIsBitwiseNeutral) {
  std::mt19937_64 rng(8);
  const PositionFit fit = fit_position(make_demo(random_demo_spec(rng, 200)), {}, 40);
  RolloutConfig plain;
  RolloutConfig neutral;
  neutral.phase_stop = {5.0, 0.0};
  RolloutConfig slowed;
  slowed.phase_stop = {5.0, 0.3};
  const PositionRollout a = rollout_position(fit.model, plain);
  const PositionRollout b = rollout_position(fit.model, neutral);
  const PositionRollout c = rollout_position(fit.model, slowed);
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_EQ(a.phase, b.phase);
  for (std::size_t k = 1; k < a.phase.size(); ++k) EXPECT_GT(c.phase[k], a.phase[k]);
}

TEST(GoalSwitch, SameGoalIsPlainRollout) {
  std::mt19937_64 rng(9);
  const PositionFit fit = fit_position(make_demo(random_demo_spec(rng, 200)), {}, 40);
  const RolloutConfig rc;
  const PositionRollout a = rollout_position(fit.model, rc);
  const PositionRollout b = goal_switch_position(fit.model, rc, {fit.model.g, 10.0, 0.3});
  EXPECT_EQ(a.positions, b.positions);
}

TEST(GoalSwitch, FastFilterApproachesOverriddenRollout) {
  std::mt19937_64 rng(10);
  const PositionFit fit = fit_position(make_demo(random_demo_spec(rng, 400)), {}, 60);
  const Vec3 new_goal = fit.model.g + Vec3(0.01, 0.02, 0.0);
  RolloutConfig rc;
  const PositionRollout sw = goal_switch_position(fit.model, rc, {new_goal, 1e6, 0.0});
  rc.goal_override = new_goal;
  const PositionRollout direct = rollout_position(fit.model, rc);
  double worst = 0.0;
  for (std::size_t k = 0; k < sw.positions.size(); ++k) {
    worst = std::max(worst, (sw.positions[k] - direct.positions[k]).norm());
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GoalSwitch, MidRolloutSwitchIsContinuousAndConverges) {
  std::mt19937_64 rng(11);
  const PositionFit fit = fit_position(make_demo(random_demo_spec(rng, 400)), {}, 60);
  const Vec3 new_goal = fit.model.g + Vec3(-0.02, 0.01, 0.01);
  RolloutConfig rc;
  rc.horizon_scale = 3.0;
  rc.n_pts = 1201;
  const PositionRollout r = goal_switch_position(fit.model, rc, {new_goal, 10.0, 0.5});
  const double scale = (fit.model.g - fit.model.y0).norm();
  EXPECT_LT((r.positions.back() - new_goal).norm(), 1e-3 * scale);
  // No jumps in position or velocity at the switch.
  double max_dv = 0.0, typical = 0.0;
  for (std::size_t k = 1; k < r.velocities.size(); ++k) {
    max_dv = std::max(max_dv, (r.velocities[k] - r.velocities[k - 1]).norm());
    typical = std::max(typical, r.velocities[k].norm());
  }
  EXPECT_LT(max_dv, 0.05 * typical);
}

TEST(GoalSwitch, RejectsNonPositiveGain) {
  const PositionDmpModel m = zero_model(Vec3::Zero(), Vec3::UnitX());
  EXPECT_THROW(goal_switch_position(m, RolloutConfig{}, {Vec3::UnitY(), 0.0, 0.0}), InvalidArgument);
}
