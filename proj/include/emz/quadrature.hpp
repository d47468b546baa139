#pragma once

#include <Eigen/Dense>

namespace emz {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule with n nodes on [a, b] (Golub-Welsch).
QuadratureRule gauss_legendre(int n, double a, double b);

/// Gauss rule with n nodes for the Gaussian weight N(0, 1/beta) on the real
/// line (probabilists' Hermite, scaled). Weights sum to 1.
QuadratureRule gauss_hermite_prob(int n, double beta);

}  // namespace emz
