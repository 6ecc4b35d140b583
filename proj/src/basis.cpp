#include "lfd/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lfd/errors.hpp"

namespace lfd {

namespace {

constexpr double kDegenerateDenominator = 1e-12;

}  // namespace

double phase_at(const CanonicalSystem& cs, double t) {
  if (t < 0.0) {
    throw InvalidArgument("phase_at: time must be non-negative");
  }
  return std::exp(-cs.alpha_x * t / cs.tau);
}

double advance_phase(const CanonicalSystem& cs, double x, double dt, const PhaseStopState& stop) {
  const double slowdown = 1.0 + stop.error_gain * stop.external_error * stop.external_error;
  return x * std::exp(-cs.alpha_x * dt / (cs.tau * slowdown));
}

BasisSet make_basis(const CanonicalSystem& cs, std::size_t n_bfs, double duration) {
  if (n_bfs == 0) {
    throw InvalidArgument("make_basis: need at least one basis function");
  }
  if (!(duration > 0.0)) {
    throw InvalidArgument("make_basis: duration must be positive");
  }
  if (!(cs.alpha_x > 0.0)) {
    throw InvalidArgument("make_basis: alpha_x must be positive");
  }

  BasisSet basis;
  basis.centers.resize(n_bfs);
  basis.widths.resize(n_bfs);
  const double n15 = std::pow(static_cast<double>(n_bfs), 1.5);
  for (std::size_t i = 0; i < n_bfs; ++i) {
    const double t = n_bfs == 1 ? 0.5 * duration
                                : static_cast<double>(i) * duration / static_cast<double>(n_bfs - 1);
    basis.centers[i] = phase_at(cs, t);
    basis.widths[i] = n15 / (cs.alpha_x * basis.centers[i]);
  }
  return basis;
}

Eigen::VectorXd eval_basis(const BasisSet& basis, double x) {
  Eigen::VectorXd psi(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double d = x - basis.centers[i];
    psi[static_cast<Eigen::Index>(i)] = std::exp(-basis.widths[i] * d * d);
  }
  return psi;
}

bool LwrFit::any_degenerate() const {
  return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end();
}

bool LwrFit::all_degenerate() const {
  return !degenerate.empty() && std::find(degenerate.begin(), degenerate.end(), false) == degenerate.end();
}

LwrFit lwr_fit(const LwrProblem& problem, const BasisSet& basis) {
  const std::size_t n = problem.phases.size();
  if (n < 2 || problem.scale_track.size() != n || problem.targets.size() != n) {
    throw InvalidArgument("lwr_fit: phases, scale_track and targets need equal length >= 2");
  }

  LwrFit fit;
  fit.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  fit.degenerate.assign(basis.size(), false);

  for (std::size_t i = 0; i < basis.size(); ++i) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = problem.phases[k] - basis.centers[i];
      const double psi = std::exp(-basis.widths[i] * d * d);
      num += problem.scale_track[k] * psi * problem.targets[k];
      den += problem.scale_track[k] * psi * problem.scale_track[k];
    }
    if (den <= kDegenerateDenominator) {
      fit.degenerate[i] = true;
    } else {
      fit.weights[static_cast<Eigen::Index>(i)] = num / den;
    }
  }
  return fit;
}

double forcing_from_weights(const BasisSet& basis, const Eigen::VectorXd& weights, double x,
                            double scale) {
  if (static_cast<std::size_t>(weights.size()) != basis.size()) {
    throw InvalidArgument("forcing_from_weights: weight count does not match basis");
  }
  // Shift exponents by their maximum so the normalized mixture survives underflow at small x.
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double d = x - basis.centers[i];
    top = std::max(top, -basis.widths[i] * d * d);
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double d = x - basis.centers[i];
    const double psi = std::exp(-basis.widths[i] * d * d - top);
    num += psi * weights[static_cast<Eigen::Index>(i)];
    den += psi;
  }
  return num / den * x * scale;
}

}  // namespace lfd
