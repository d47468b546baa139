#pragma once

#include <Eigen/Dense>
#include <functional>

#include "emz/potential.hpp"
#include "emz/quadrature.hpp"
#include "emz/rng.hpp"

namespace emz {

/// Position marginal of the Gibbs measure, exp(-beta V(q)) / Zq, truncated to
/// [-L, L] and discretized on a Gauss-Legendre grid.
///
/// The truncation must be benign: exp(-beta V(+-L)) < 1e-16 is required so
/// that every moment used downstream is unaffected at working precision.
class GibbsMeasure {
 public:
  GibbsMeasure(Potential potential, double beta, double halfwidth, int quad_nodes);

  const Potential& potential() const { return potential_; }
  double beta() const { return beta_; }
  double halfwidth() const { return halfwidth_; }
  double partition_q() const { return zq_; }

  const Eigen::VectorXd& nodes() const { return nodes_; }
  /// Normalized Gibbs weights at the nodes; they sum to 1 exactly.
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Average of f(q) against the measure.
  double average(const std::function<double(double)>& f) const;

  /// One equilibrium draw: q by inverse CDF on the grid, p ~ N(0, 1/beta).
  void sample(CounterRng& rng, double& q, double& p) const;

 private:
  Potential potential_;
  double beta_;
  double halfwidth_;
  double zq_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  // monotone CDF table (x, F) for inverse-CDF sampling
  Eigen::VectorXd cdf_x_;
  Eigen::VectorXd cdf_f_;
};

/// Halfwidth large enough that exp(-beta V(x)) x^(2 n_q) stays below 1e-20
/// outside [-L, L]. Polynomial-weighted integrals up to the basis degree are
/// then unaffected by the truncation, not just the bare measure.
double suggested_halfwidth(const Potential& potential, double beta, int n_q);

/// Node count that resolves the oscillations of degree n_q orthogonal
/// polynomials on the suggested domain with margin.
int suggested_quad_nodes(int n_q);

}  // namespace emz
