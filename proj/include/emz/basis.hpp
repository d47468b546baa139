#pragma once

#include <Eigen/Dense>
#include <utility>

#include "emz/gibbs.hpp"

namespace emz {

/// Tensor-product orthonormal basis for L2 of the Gibbs measure:
/// phi_(i,j)(q, p) = g_i(q) * h_j(p), with
///  - g_i orthonormal polynomials for exp(-beta V(q)) dq / Zq, built by the
///    Stieltjes three-term recurrence on the quadrature grid,
///  - h_j = He_j(sqrt(beta) p) / sqrt(j!), orthonormal for N(0, 1/beta).
///
/// Flat index is iq * n_p + jp, so index 0 is the constant function.
class GalerkinBasis {
 public:
  GalerkinBasis(GibbsMeasure measure, int n_q, int n_p);

  const GibbsMeasure& measure() const { return measure_; }
  double beta() const { return measure_.beta(); }
  int n_q() const { return n_q_; }
  int n_p() const { return n_p_; }
  int size() const { return n_q_ * n_p_; }

  int flat(int iq, int jp) const { return iq * n_p_ + jp; }
  std::pair<int, int> unflat(int k) const { return {k / n_p_, k % n_p_}; }

  /// g_i(x_k) on the quadrature grid, one column per polynomial.
  const Eigen::MatrixXd& q_values() const { return q_values_; }
  /// g_i'(x_k) on the quadrature grid.
  const Eigen::MatrixXd& q_derivs() const { return q_derivs_; }

  /// Orthonormal recurrence x g_k = s_{k+1} g_{k+1} + a_k g_k + s_k g_{k-1}.
  const Eigen::VectorXd& q_alpha() const { return q_alpha_; }
  const Eigen::VectorXd& q_sqrt_beta() const { return q_sqrt_beta_; }

  /// Jacobi (multiplication-by-coordinate) matrices in coefficient space.
  Eigen::MatrixXd jacobi_q() const;
  Eigen::MatrixXd jacobi_p() const;

  /// Coefficient vector of the monomial q^qpow p^ppow. Requires
  /// qpow < n_q and ppow < n_p.
  Eigen::VectorXd expand_monomial(int qpow, int ppow) const;

  /// max_ij |<g_i, g_j> - delta_ij| under the quadrature measure.
  double gram_residual() const;

 private:
  GibbsMeasure measure_;
  int n_q_;
  int n_p_;
  Eigen::MatrixXd q_values_;
  Eigen::MatrixXd q_derivs_;
  Eigen::VectorXd q_alpha_;
  Eigen::VectorXd q_sqrt_beta_;  // s_1 .. s_{n_q-1}
};

}  // namespace emz
