#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "emz/operators.hpp"

namespace emz {

/// Result of fitting |y(t)| ~ amplitude * exp(-rate * t).
struct DecayFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double rate_se = 0.0;   // standard error of the rate (weighted or OLS)
  double residual = 0.0;  // relative L2 mismatch on the fitted window
  int points_used = 0;
  bool ok = false;
  std::string message;
};

/// Log-linear least squares on the last tail_fraction of the grid. Values
/// with |y| <= 1e-13 are masked; fewer than 5 usable points is an error.
DecayFit decay_fit(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                   double tail_fraction = 0.5);

/// Same fit restricted to the local maxima of |y| (the oscillation envelope).
/// Optional per-point standard errors: peaks below significance * se are
/// dropped and the fit is inverse-variance weighted in log space.
DecayFit envelope_decay_fit(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                            double tail_fraction = 1.0,
                            const Eigen::VectorXd* se = nullptr,
                            double significance = 5.0);

/// Memory kernel series K_ij(t_k) on the uniform grid t_k = k dt_out.
///
/// Two equilibria are recorded. `equilibrium` is the explicit
/// products-of-means form E[QKu_i] (Ginv E[QK*u])_j. `equilibrium_limit` is
/// the actual t -> infinity limit, obtained by replacing the semigroup with
/// the spectral projector onto the numerical kernel of QKQ; the two disagree
/// exactly when that kernel contains w-vectors overlapping QKu_i (the
/// harmonic momentum chain being the canonical case), and the tail fits
/// subtract the limit form so that they measure the genuine relaxation rate.
///
/// fdt_difference records max_ij |K(t) + F(t) Ginv|_ij per grid point, where
/// F_ik(t) = <f_i(t), f_k(0)>; the identity K = -F Ginv holds for
/// anti-self-adjoint generators but is not asserted here: the stochastic
/// generator has a dissipative part, so only the measured difference is
/// reported.
struct KernelSeries {
  Eigen::VectorXd t;
  std::vector<Eigen::MatrixXd> values;
  Eigen::MatrixXd equilibrium;
  Eigen::MatrixXd equilibrium_limit;
  std::vector<std::vector<DecayFit>> fits;  // [i][j], against equilibrium_limit
  Eigen::VectorXd fdt_difference;
  // Filled by the data-driven extraction path only: relative reconstruction
  // residual of the projected evolution equation, and whether it exceeded the
  // caller's warning threshold.
  double volterra_residual = 0.0;
  bool residual_warning = false;
};

KernelSeries memory_kernel_series(const MoriProjection& mori, const OperatorSet& ops,
                                  const Eigen::MatrixXd& qkq, double t_max,
                                  double dt_out, double tail_fraction = 0.5);

/// Fluctuation force f_i(t) = e^{t QKQ} Q K u_i, tracked through its distance
/// to the equilibrium mean and its autocorrelation, with tail fits of
/// |<f_i(t), f_i(0)> - E^2[QKu_i]|.
struct ForceSeries {
  Eigen::VectorXd t;
  Eigen::MatrixXd force_norm;  // n_t x M: ||f_i(t) - E[QKu_i] 1||
  Eigen::MatrixXd force_acf;   // n_t x M: <f_i(t), f_i(0)>
  Eigen::VectorXd equilibrium;
  Eigen::VectorXd equilibrium_sq;
  std::vector<DecayFit> acf_fits;
};

ForceSeries fluctuation_force_series(const MoriProjection& mori, const OperatorSet& ops,
                                     const Eigen::MatrixXd& qkq, double t_max,
                                     double dt_out, double tail_fraction = 0.5);

/// Autocorrelation series C_ij(t) = <u_j, e^{tK} u_i> with the equilibrium
/// product of means subtracted inside the decay fits; envelope fits cover the
/// oscillatory (underdamped) regime.
struct AcfSeries {
  Eigen::VectorXd t;
  std::vector<Eigen::MatrixXd> values;
  Eigen::MatrixXd equilibrium;
  std::vector<std::vector<DecayFit>> fits;
  std::vector<std::vector<DecayFit>> envelope_fits;
};

AcfSeries acf_series(const MoriProjection& mori, const OperatorSet& ops, double t_max,
                     double dt_out, double tail_fraction = 0.5);

}  // namespace emz
