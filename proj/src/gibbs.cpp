#include "emz/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "emz/errors.hpp"

namespace emz {

GibbsMeasure::GibbsMeasure(Potential potential, double beta, double halfwidth, int quad_nodes)
    : potential_(std::move(potential)), beta_(beta), halfwidth_(halfwidth) {
  if (!(beta_ > 0)) throw DomainError("gibbs: beta must be positive");
  if (!(halfwidth_ > 0)) throw DomainError("gibbs: halfwidth must be positive");
  if (quad_nodes < 2) throw DomainError("gibbs: need at least two quadrature nodes");

  const double vmin = std::min(potential_.value(-halfwidth_), potential_.value(halfwidth_));
  if (!(std::exp(-beta_ * vmin) < 1e-16))
    throw DomainError("gibbs: exp(-beta V) at the domain boundary is " +
                      std::to_string(std::exp(-beta_ * vmin)) +
                      "; enlarge halfwidth so the truncation is below 1e-16");

  QuadratureRule gl = gauss_legendre(quad_nodes, -halfwidth_, halfwidth_);
  nodes_ = gl.nodes;
  weights_.resize(quad_nodes);
  for (int k = 0; k < quad_nodes; ++k)
    weights_[k] = gl.weights[k] * std::exp(-beta_ * potential_.value(nodes_[k]));
  zq_ = weights_.sum();
  if (!(zq_ > 0) || !std::isfinite(zq_)) throw NumericsError("gibbs: partition function not finite");
  weights_ /= zq_;

  // midpoint-convention CDF at the nodes, pinned to 0/1 at the boundary
  const int n = quad_nodes;
  cdf_x_.resize(n + 2);
  cdf_f_.resize(n + 2);
  cdf_x_[0] = -halfwidth_;
  cdf_f_[0] = 0.0;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    cdf_x_[k + 1] = nodes_[k];
    cdf_f_[k + 1] = acc + 0.5 * weights_[k];
    acc += weights_[k];
  }
  cdf_x_[n + 1] = halfwidth_;
  cdf_f_[n + 1] = 1.0;
}

double GibbsMeasure::average(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (int k = 0; k < nodes_.size(); ++k) s += weights_[k] * f(nodes_[k]);
  return s;
}

void GibbsMeasure::sample(CounterRng& rng, double& q, double& p) const {
  const double u = rng.uniform();
  // invert the piecewise-linear CDF
  const auto begin = cdf_f_.data();
  const auto end = begin + cdf_f_.size();
  const auto it = std::upper_bound(begin, end, u);
  long i = std::clamp<long>(it - begin, 1, cdf_f_.size() - 1);
  const double f0 = cdf_f_[i - 1], f1 = cdf_f_[i];
  const double x0 = cdf_x_[i - 1], x1 = cdf_x_[i];
  q = (f1 > f0) ? x0 + (x1 - x0) * (u - f0) / (f1 - f0) : x0;
  p = rng.gaussian() / std::sqrt(beta_);
}

double suggested_halfwidth(const Potential& potential, double beta, int n_q) {
  if (!(beta > 0)) throw DomainError("suggested_halfwidth: beta must be positive");
  if (n_q < 1) throw DomainError("suggested_halfwidth: n_q must be positive");
  const auto log_tail = [&](double x) {
    return -beta * std::min(potential.value(x), potential.value(-x)) +
           2.0 * n_q * std::log(std::max(std::abs(x), 1.0));
  };
  const double target = std::log(1e-20);
  double hi = 2.0;
  while (log_tail(hi) > target) {
    hi *= 2.0;
    if (hi > 1e6) throw NumericsError("suggested_halfwidth: potential tail grows too slowly");
  }
  // outermost crossing, scanned from the safe side so interior wells cannot
  // truncate the domain early
  const double step = hi / 4096.0;
  double crossing = 1.0;
  for (double x = hi; x >= 1.0; x -= step) {
    if (log_tail(x) > target) {
      crossing = x + step;
      break;
    }
  }
  return 1.05 * crossing;
}

int suggested_quad_nodes(int n_q) { return std::max(96, 16 * n_q); }

}  // namespace emz
