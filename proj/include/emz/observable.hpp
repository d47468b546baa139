#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "emz/basis.hpp"

namespace emz {

/// Polynomial observable in (q, p): sum of coef * q^qpow * p^ppow terms.
/// Carries both a pointwise evaluation (trajectory side) and a coefficient
/// expansion (Galerkin side).
struct Observable {
  struct Term {
    double coef;
    int qpow;
    int ppow;
  };

  std::string name;
  std::vector<Term> terms;

  static Observable momentum() { return {"p", {{1.0, 0, 1}}}; }
  static Observable position() { return {"q", {{1.0, 1, 0}}}; }

  double eval(double q, double p) const {
    double s = 0.0;
    for (const auto& t : terms) {
      double v = t.coef;
      for (int a = 0; a < t.qpow; ++a) v *= q;
      for (int b = 0; b < t.ppow; ++b) v *= p;
      s += v;
    }
    return s;
  }

  Eigen::VectorXd expand(const GalerkinBasis& basis) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    for (const auto& t : terms) c += t.coef * basis.expand_monomial(t.qpow, t.ppow);
    return c;
  }
};

}  // namespace emz
