#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>

#include "emz/operators.hpp"

namespace emz {

/// Coercivity and boundedness constants of the dissipative splitting.
///
/// lambda_m: smallest eigenvalue of -D on Ran(I - Pi) (microscopic
/// coercivity). lambda_M: smallest eigenvalue of (L Pi)^T (L Pi) on
/// Ran(Pi) with constants removed (macroscopic coercivity). c1, c2: largest
/// singular values of A D and A L restricted to Ran(I - Pi); c3 = c1 + c2.
/// c4: tightest constant with <A P K g, g> + <A g, P K g> <= c4 ||(I-Pi)g||
/// ||g|| over the whole space; +infinity when the form is positive somewhere
/// on Ran(Pi), where the right side vanishes.
///
/// chain_excess records lambda_max(A A^T - (I - Pi)): the textbook chain
/// bounds ||A^T g|| by ||(I-Pi)g||, which fails on Ran(Pi) (A^T does not
/// vanish there), so the flag documents whether the shortcut holds on this
/// discretization; the numerical c4 never relies on it.
struct HypoConstants {
  double lambda_m = 0.0;
  double lambda_M = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double chain_excess = 0.0;
  bool chain_bound_holds = false;
};

/// mori is required only for c4 (it supplies P and K u); without it c4 = 0.
HypoConstants estimate_constants(const OperatorSet& ops, const Eigen::MatrixXd& a,
                                 const MoriProjection* mori = nullptr);

enum class CertTarget { K, QKQ };

std::string to_string(CertTarget target);

/// Modified-entropy certificate: the (delta, epsilon) point maximizing
///
///   kappa(delta, eps) = min{ lambda_m - eps (1+c)(1 + 1/(2 delta)),
///                            eps (lambda_M/(1+lambda_M) - (1+c) delta/2) }
///
/// with c = c3 for the full generator and c = c3 + c4 for the orthogonal one,
/// over a log-spaced grid with local refinement (ties resolved toward smaller
/// eps, then smaller delta). The certified decay is
/// ||g(t)|| <= C_cert e^{-lambda_cert t} ||g(0)|| with
/// lambda_cert = kappa/(1+eps) and C_cert = sqrt((1+eps)/(1-eps)).
///
/// success is false when kappa <= 0 everywhere on the grid (certificate
/// failure is reported, never thrown); kappa then holds the best value seen.
struct HypoCertificate {
  HypoConstants constants;
  CertTarget target = CertTarget::K;
  double delta = 0.0;
  double epsilon = 0.0;
  double kappa = 0.0;
  double lambda_cert = 0.0;
  double c_cert = 0.0;
  double comparison_gap = 0.0;  // measured spectral gap, if the caller has one
  bool success = false;
  std::string message;
};

HypoCertificate certify(const HypoConstants& constants, CertTarget target,
                        int n_delta = 200, int n_eps = 200,
                        double comparison_gap =
                            std::numeric_limits<double>::quiet_NaN());

/// Modified entropy H_eps[g] = 1/2 ||g||^2 + eps <A g, g> sampled along
/// e^{t M} g0 for the chosen target generator. g0 is projected onto the
/// invariant subspace first (zero mean for K; additionally Ran(Q) for QKQ).
/// equivalence_ok checks (1-eps)/2 ||g||^2 <= H_eps[g] <= (1+eps)/2 ||g||^2
/// at every output point.
struct EntropySeries {
  Eigen::VectorXd t;
  Eigen::VectorXd h;
  Eigen::VectorXd norm_sq;
  bool equivalence_ok = false;
  double worst_lower_margin = 0.0;  // min of H - (1-eps)/2 ||g||^2
  double worst_upper_margin = 0.0;  // min of (1+eps)/2 ||g||^2 - H
};

EntropySeries entropy_monitor(const OperatorSet& ops, const Eigen::MatrixXd& a,
                              double eps, Eigen::VectorXd g0, double t_max,
                              double dt_out, CertTarget target,
                              const MoriProjection* mori = nullptr);

}  // namespace emz
