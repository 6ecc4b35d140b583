#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lfd/basis.hpp"
#include "lfd/errors.hpp"

using namespace lfd;

namespace {

LwrProblem random_problem(std::mt19937_64& rng, std::size_t samples) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LwrProblem p;
  const CanonicalSystem cs;
  const double scale = 0.05 + 0.1 * std::abs(u(rng));
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = phase_at(cs, static_cast<double>(k) / static_cast<double>(samples - 1));
    p.phases.push_back(x);
    p.scale_track.push_back(x * scale);
    p.targets.push_back(u(rng));
  }
  return p;
}

double cost(const LwrProblem& p, const BasisSet& b, std::size_t i, double w) {
  double j = 0.0;
  for (std::size_t k = 0; k < p.phases.size(); ++k) {
    const double d = p.phases[k] - b.centers[i];
    const double r = p.targets[k] - w * p.scale_track[k];
    j += std::exp(-b.widths[i] * d * d) * r * r;
  }
  return j;
}

}  // namespace

TEST(Phase, ClosedForm) {
  const CanonicalSystem cs;
  EXPECT_EQ(phase_at(cs, 0.0), 1.0);
  EXPECT_NEAR(phase_at(cs, 1.0), std::exp(-1.0), 1e-16);
  EXPECT_LT(phase_at(cs, 50.0), 1e-20);
  EXPECT_GT(phase_at(cs, 50.0), 0.0);
  EXPECT_THROW(phase_at(cs, -0.1), InvalidArgument);
}

TEST(Phase, StrictlyDecreasing) {
  const CanonicalSystem cs{2.0, 1.0};
  double prev = phase_at(cs, 0.0);
  for (int k = 1; k < 100; ++k) {
    const double x = phase_at(cs, 0.05 * k);
    EXPECT_LT(x, prev);
    prev = x;
  }
}

TEST(Phase, AdvanceMatchesClosedForm) {
  const CanonicalSystem cs;
  double x = 1.0;
  for (int k = 0; k < 100; ++k) x = advance_phase(cs, x, 0.01);
  EXPECT_NEAR(x, phase_at(cs, 1.0), 1e-14);
}

TEST(Phase, StoppingSlowsDecay) {
  const CanonicalSystem cs;
  EXPECT_EQ(advance_phase(cs, 0.7, 0.01, {3.0, 0.0}), advance_phase(cs, 0.7, 0.01));
  EXPECT_GT(advance_phase(cs, 0.7, 0.01, {3.0, 0.5}), advance_phase(cs, 0.7, 0.01));
  EXPECT_NEAR(advance_phase(cs, 1.0, 0.1, {1.0, 1.0}), std::exp(-0.05), 1e-15);
}

TEST(MakeBasis, TwoBases) {
  const BasisSet b = make_basis(CanonicalSystem{}, 2, 1.0);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.centers[0], 1.0);
  EXPECT_NEAR(b.centers[1], std::exp(-1.0), 1e-16);
  EXPECT_NEAR(b.widths[0], std::pow(2.0, 1.5), 1e-14);
  EXPECT_NEAR(b.widths[1], std::pow(2.0, 1.5) / std::exp(-1.0), 1e-12);
}

TEST(MakeBasis, HundredStrictlyDecreasingCenters) {
  const BasisSet b = make_basis(CanonicalSystem{}, 100, 1.0);
  ASSERT_EQ(b.size(), 100u);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_GT(b.centers[i], 0.0);
    EXPECT_LE(b.centers[i], 1.0);
    EXPECT_NEAR(b.widths[i], std::pow(100.0, 1.5) / b.centers[i], 1e-9 * b.widths[i]);
    if (i) EXPECT_LT(b.centers[i], b.centers[i - 1]);
  }
}

TEST(MakeBasis, SingleBasisAtMidDuration) {
  const CanonicalSystem cs{1.5, 1.0};
  const BasisSet b = make_basis(cs, 1, 2.0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NEAR(b.centers[0], std::exp(-1.5), 1e-16);
}

TEST(MakeBasis, Reproducible) {
  const BasisSet a = make_basis(CanonicalSystem{}, 37, 1.3);
  const BasisSet b = make_basis(CanonicalSystem{}, 37, 1.3);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(a.widths, b.widths);
}

TEST(MakeBasis, RejectsBadArguments) {
  EXPECT_THROW(make_basis(CanonicalSystem{}, 0, 1.0), InvalidArgument);
  EXPECT_THROW(make_basis(CanonicalSystem{}, 3, 0.0), InvalidArgument);
  EXPECT_THROW(make_basis(CanonicalSystem{}, 3, -1.0), InvalidArgument);
}

TEST(EvalBasis, PeakTailAndFormula) {
  const BasisSet b = make_basis(CanonicalSystem{}, 20, 1.0);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(eval_basis(b, b.centers[i])[static_cast<Eigen::Index>(i)], 1.0);
  EXPECT_LT(eval_basis(b, 0.0)[0], 1e-12);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const double x = u(rng);
    const Eigen::VectorXd psi = eval_basis(b, x);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double want = std::exp(-b.widths[i] * (x - b.centers[i]) * (x - b.centers[i]));
      EXPECT_NEAR(psi[static_cast<Eigen::Index>(i)], want, 1e-15);
    }
  }
}

TEST(Lwr, ConstantFit) {
  BasisSet b;
  b.centers = {0.5};
  b.widths = {0.0};  // psi = 1 everywhere
  const LwrProblem p{{0.9, 0.8}, {1.0, 1.0}, {2.0, 2.0}};
  const LwrFit fit = lwr_fit(p, b);
  EXPECT_DOUBLE_EQ(fit.weights[0], 2.0);
  EXPECT_FALSE(fit.any_degenerate());
}

TEST(Lwr, ExactlyRepresentableTarget) {
  std::mt19937_64 rng(2);
  LwrProblem p = random_problem(rng, 200);
  const double c = -3.25;
  for (std::size_t k = 0; k < p.targets.size(); ++k) p.targets[k] = c * p.scale_track[k];
  const BasisSet b = make_basis(CanonicalSystem{}, 30, 1.0);
  const LwrFit fit = lwr_fit(p, b);
  for (Eigen::Index i = 0; i < fit.weights.size(); ++i) EXPECT_NEAR(fit.weights[i], c, 1e-12);
}

TEST(Lwr, ZeroScaleIsDegenerate) {
  std::mt19937_64 rng(3);
  LwrProblem p = random_problem(rng, 50);
  for (auto& s : p.scale_track) s = 0.0;
  const LwrFit fit = lwr_fit(p, make_basis(CanonicalSystem{}, 10, 1.0));
  EXPECT_TRUE(fit.all_degenerate());
  EXPECT_EQ(fit.weights, Eigen::VectorXd::Zero(10));
}

TEST(Lwr, RejectsMismatchedProblem) {
  const LwrProblem p{{1.0, 0.5}, {1.0}, {1.0, 2.0}};
  EXPECT_THROW(lwr_fit(p, make_basis(CanonicalSystem{}, 3, 1.0)), InvalidArgument);
}

// Oracle: grid scan of the cost and its analytic derivative.
TEST(Lwr, TenSampleProblemsMatchGridAndDerivativeOracles) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const LwrProblem p = random_problem(rng, 10);
    const BasisSet b = make_basis(CanonicalSystem{}, 6, 1.0);
    const LwrFit fit = lwr_fit(p, b);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double w = fit.weights[static_cast<Eigen::Index>(i)];
      double slope = 0.0;
      for (std::size_t k = 0; k < p.phases.size(); ++k) {
        const double d = p.phases[k] - b.centers[i];
        slope += -2.0 * std::exp(-b.widths[i] * d * d) * p.scale_track[k] * (p.targets[k] - w * p.scale_track[k]);
      }
      EXPECT_LT(std::abs(slope), 1e-8);

      // The minimizer is a convex combination of the ratios F / s.
      double lo = 1e300, hi = -1e300;
      for (std::size_t k = 0; k < p.phases.size(); ++k) {
        lo = std::min(lo, p.targets[k] / p.scale_track[k]);
        hi = std::max(hi, p.targets[k] / p.scale_track[k]);
      }
      const double step = (hi - lo) / 50000.0;
      double best = lo, best_cost = cost(p, b, i, lo);
      for (int n = 0; n <= 50000; ++n) {
        const double v = lo + n * step;
        const double c = cost(p, b, i, v);
        if (c < best_cost) best_cost = c, best = v;
      }
      EXPECT_LE(std::abs(best - w), step);
    }
  }
}

TEST(Lwr, PerturbationsIncreaseCost) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const LwrProblem p = random_problem(rng, 80);
    const BasisSet b = make_basis(CanonicalSystem{}, 15, 1.0);
    const LwrFit fit = lwr_fit(p, b);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double w = fit.weights[static_cast<Eigen::Index>(i)];
      const double delta = 1e-3 * std::abs(w) + 1e-6;
      const double j0 = cost(p, b, i, w);
      EXPECT_GT(cost(p, b, i, w + delta), j0);
      EXPECT_GT(cost(p, b, i, w - delta), j0);
    }
  }
}

TEST(Forcing, Identities) {
  const BasisSet b = make_basis(CanonicalSystem{}, 12, 1.0);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  Eigen::VectorXd w(12);
  for (auto& v : w) v = u(rng);
  EXPECT_EQ(forcing_from_weights(b, Eigen::VectorXd::Zero(12), 0.4, 0.1), 0.0);
  EXPECT_EQ(forcing_from_weights(b, w, 0.0, 0.1), 0.0);
  EXPECT_NEAR(forcing_from_weights(b, Eigen::VectorXd::Constant(12, 7.0), 0.4, 0.1), 7.0 * 0.4 * 0.1, 1e-15);
  for (double x : {0.05, 0.3, 0.9}) {
    EXPECT_LE(std::abs(forcing_from_weights(b, w, x, 0.1)), w.cwiseAbs().maxCoeff() * x * 0.1 + 1e-15);
  }
}

TEST(Forcing, StableFarFromEveryCenter) {
  const BasisSet b = make_basis(CanonicalSystem{}, 100, 1.0);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(100, 2.0);
  // Every psi underflows at x = 1e-3 for these widths; the shifted sum stays finite.
  const double f = forcing_from_weights(b, w, 1e-3, 1.0);
  EXPECT_TRUE(std::isfinite(f));
  EXPECT_NEAR(f, 2.0 * 1e-3, 1e-15);
}

TEST(Forcing, RejectsWrongWeightCount) {
  const BasisSet b = make_basis(CanonicalSystem{}, 5, 1.0);
  EXPECT_THROW(forcing_from_weights(b, Eigen::VectorXd::Zero(4), 0.5, 1.0), InvalidArgument);
}
