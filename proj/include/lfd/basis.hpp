#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace lfd {

/// First-order phase system tau * dx/dt = -alpha_x * x, started at x(0) = 1.
struct CanonicalSystem {
  double alpha_x = 1.0;
  double tau = 1.0;
};

/// Closed-form phase exp(-alpha_x t / tau). Throws InvalidArgument for t < 0.
double phase_at(const CanonicalSystem& cs, double t);

/// Phase slow-down driven by an external tracking error: the phase rate is divided by
/// (1 + error_gain * external_error^2). The defaults leave the phase untouched.
struct PhaseStopState {
  double error_gain = 0.0;
  double external_error = 0.0;
};

/// Advances the phase by dt using the exact decay factor of the (possibly slowed) system.
double advance_phase(const CanonicalSystem& cs, double x, double dt, const PhaseStopState& stop = {});

/// Gaussian basis functions psi_i(x) = exp(-h_i (x - c_i)^2) over the phase.
struct BasisSet {
  std::vector<double> centers;
  std::vector<double> widths;

  std::size_t size() const { return centers.size(); }
};

/// Centers sit at the phase of uniformly spaced times over `duration` (c_1 = 1);
/// widths follow h_i = n_bfs^1.5 / (alpha_x c_i). A single basis is centered at
/// mid-duration.
BasisSet make_basis(const CanonicalSystem& cs, std::size_t n_bfs, double duration);

Eigen::VectorXd eval_basis(const BasisSet& basis, double x);

/// Weighted least-squares problem solved independently for every basis.
struct LwrProblem {
  std::vector<double> phases;       // x(t_k)
  std::vector<double> scale_track;  // s_k
  std::vector<double> targets;      // f_des(t_k)
};

struct LwrFit {
  Eigen::VectorXd weights;
  std::vector<bool> degenerate;  // basis whose denominator s^T Psi_i s vanished; weight forced to 0

  bool any_degenerate() const;
  bool all_degenerate() const;
};

/// w_i = s^T Psi_i F_d / s^T Psi_i s for every basis i.
LwrFit lwr_fit(const LwrProblem& problem, const BasisSet& basis);

/// (sum psi_i w_i / sum psi_i) * x * scale. Exactly 0 at x = 0.
double forcing_from_weights(const BasisSet& basis, const Eigen::VectorXd& weights, double x,
                            double scale);

}  // namespace lfd
