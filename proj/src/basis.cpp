#include "emz/basis.hpp"

#include <cmath>

#include "emz/errors.hpp"

namespace emz {

GalerkinBasis::GalerkinBasis(GibbsMeasure measure, int n_q, int n_p)
    : measure_(std::move(measure)), n_q_(n_q), n_p_(n_p) {
  if (n_q_ < 1 || n_p_ < 1) throw DomainError("basis: n_q and n_p must be at least 1");
  const int n_nodes = static_cast<int>(measure_.nodes().size());
  const int min_nodes = 4 * std::max(n_q_, n_p_);
  if (n_nodes < min_nodes)
    throw DomainError("basis: " + std::to_string(n_nodes) + " quadrature nodes, need at least " +
                      std::to_string(min_nodes) + " for n_q/n_p = " + std::to_string(n_q_) + "/" +
                      std::to_string(n_p_));

  const Eigen::VectorXd& x = measure_.nodes();
  const Eigen::VectorXd& w = measure_.weights();

  q_values_.resize(n_nodes, n_q_);
  q_derivs_.setZero(n_nodes, n_q_);
  q_alpha_.resize(n_q_);
  q_sqrt_beta_.resize(n_q_ > 1 ? n_q_ - 1 : 0);

  // Stieltjes recurrence on the discrete measure; weights sum to 1 so g_0 = 1
  q_values_.col(0).setOnes();
  auto dot = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return (w.array() * u.array() * v.array()).sum();
  };
  for (int k = 0; k < n_q_; ++k) {
    const Eigen::VectorXd gk = q_values_.col(k);
    q_alpha_[k] = dot(x.cwiseProduct(gk), gk);
    if (k + 1 == n_q_) break;
    Eigen::VectorXd t = (x.array() - q_alpha_[k]) * gk.array();
    Eigen::VectorXd td = gk + ((x.array() - q_alpha_[k]) * q_derivs_.col(k).array()).matrix();
    if (k > 0) {
      t -= q_sqrt_beta_[k - 1] * q_values_.col(k - 1);
      td -= q_sqrt_beta_[k - 1] * q_derivs_.col(k - 1);
    }
    const double s = std::sqrt(dot(t, t));
    if (!(s > 1e-14))
      throw NumericsError("basis: Stieltjes recurrence broke down at degree " +
                          std::to_string(k + 1) + "; quadrature cannot support the basis");
    q_sqrt_beta_[k] = s;
    q_values_.col(k + 1) = t / s;
    q_derivs_.col(k + 1) = td / s;
  }

  const double resid = gram_residual();
  if (resid > 1e-8)
    throw NumericsError("basis: orthogonality loss " + std::to_string(resid) +
                        " exceeds 1e-8; increase quadrature nodes or shrink the basis");
}

Eigen::MatrixXd GalerkinBasis::jacobi_q() const {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n_q_, n_q_);
  for (int k = 0; k < n_q_; ++k) {
    j(k, k) = q_alpha_[k];
    if (k + 1 < n_q_) {
      j(k, k + 1) = q_sqrt_beta_[k];
      j(k + 1, k) = q_sqrt_beta_[k];
    }
  }
  return j;
}

Eigen::MatrixXd GalerkinBasis::jacobi_p() const {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n_p_, n_p_);
  const double beta = measure_.beta();
  for (int k = 0; k + 1 < n_p_; ++k) {
    const double s = std::sqrt((k + 1) / beta);
    j(k, k + 1) = s;
    j(k + 1, k) = s;
  }
  return j;
}

Eigen::VectorXd GalerkinBasis::expand_monomial(int qpow, int ppow) const {
  if (qpow < 0 || ppow < 0) throw DomainError("basis: monomial powers must be non-negative");
  if (qpow >= n_q_ || ppow >= n_p_)
    throw DomainError("basis: monomial q^" + std::to_string(qpow) + " p^" + std::to_string(ppow) +
                      " needs n_q > " + std::to_string(qpow) + " and n_p > " +
                      std::to_string(ppow));
  Eigen::VectorXd cq = Eigen::VectorXd::Unit(n_q_, 0);
  const Eigen::MatrixXd jq = jacobi_q();
  for (int a = 0; a < qpow; ++a) cq = jq * cq;
  Eigen::VectorXd cp = Eigen::VectorXd::Unit(n_p_, 0);
  const Eigen::MatrixXd jp = jacobi_p();
  for (int b = 0; b < ppow; ++b) cp = jp * cp;
  Eigen::VectorXd out(size());
  for (int i = 0; i < n_q_; ++i)
    for (int j = 0; j < n_p_; ++j) out[flat(i, j)] = cq[i] * cp[j];
  return out;
}

double GalerkinBasis::gram_residual() const {
  const Eigen::MatrixXd gram =
      q_values_.transpose() * measure_.weights().asDiagonal() * q_values_;
  return (gram - Eigen::MatrixXd::Identity(n_q_, n_q_)).cwiseAbs().maxCoeff();
}

}  // namespace emz
