#include "emz/quadrature.hpp"

#include <cmath>

#include "emz/errors.hpp"

namespace emz {

namespace {

// Nodes and weights from the symmetric tridiagonal Jacobi matrix: nodes are
// its eigenvalues, weights are mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& subdiag,
                            double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) jac(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    jac(i, i + 1) = subdiag[i];
    jac(i + 1, i) = subdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success) throw NumericsError("quadrature: Jacobi eigensolve failed");
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  if (!(b > a)) throw DomainError("gauss_legendre: empty interval");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  QuadratureRule rule = golub_welsch(diag, sub, 2.0);
  // map [-1,1] -> [a,b]
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

QuadratureRule gauss_hermite_prob(int n, double beta) {
  if (n < 1) throw DomainError("gauss_hermite_prob: need at least one node");
  if (!(beta > 0)) throw DomainError("gauss_hermite_prob: beta must be positive");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  // three-term recurrence for N(0, 1/beta): b_k = k/beta
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k) / beta);
  return golub_welsch(diag, sub, 1.0);
}

}  // namespace emz
