#include "emz/hypo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "emz/errors.hpp"
#include "emz/spectral.hpp"

namespace emz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PiSplit {
  Eigen::MatrixXd range;       // orthonormal basis of Ran(Pi)
  Eigen::MatrixXd complement;  // orthonormal basis of Ran(I - Pi)
};

PiSplit split_projector(const Eigen::MatrixXd& pi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pi);
  const Eigen::Index n = pi.rows();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > 0.5) ++r;
  PiSplit out;
  out.complement = es.eigenvectors().leftCols(n - r);
  out.range = es.eigenvectors().rightCols(r);
  return out;
}

double smallest_eig(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double largest_eig(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double largest_singular(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// Orthonormal basis of the column span, columns below tol dropped.
Eigen::MatrixXd column_span(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), rank);
  return q;
}

// Tightest c with  g^T M g <= c ||S g|| ||g||  for the symmetric form M and
// orthogonal projector S, solved on the small invariant subspace w. Each
// fixed-ratio slice ||S g|| = mu ||g|| is bounded through its exact dual
//   max{g^T M g : ||g||=1, ||Sg||=mu} <= min_beta lambda_max(M - beta S) + beta mu^2,
// which is convex in beta and tight for this two-constraint problem; the
// ratio is then maximized over a dense mu grid with golden-section polish.
// Returns +infinity when the form is positive somewhere on ker(S), where the
// right side vanishes.
double tightest_mixed_bound(const Eigen::MatrixXd& m_small, const Eigen::MatrixXd& s_small) {
  const Eigen::Index w = m_small.rows();
  if (w == 0) return 0.0;
  const double scale = std::max(m_small.cwiseAbs().maxCoeff(), 1e-300);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s_small);
  Eigen::Index ns = 0;
  for (Eigen::Index i = 0; i < w; ++i)
    if (es.eigenvalues()(i) > 0.5) ++ns;
  const Eigen::MatrixXd x = es.eigenvectors().leftCols(w - ns);  // ker(S)
  const Eigen::MatrixXd y = es.eigenvectors().rightCols(ns);     // Ran(S)

  if (x.cols() > 0 && largest_eig(x.transpose() * m_small * x) > 1e-10 * scale)
    return kInf;
  if (y.cols() == 0) return 0.0;
  if (x.cols() == 0) return std::max(0.0, largest_eig(m_small));

  const auto slice_value = [&](double mu) {
    const double mu2 = mu * mu;
    const auto phi = [&](double beta) {
      return largest_eig(m_small - beta * s_small) + beta * mu2;
    };
    const double b = 16.0 * scale * (1.0 + 1.0 / std::max(mu2, 1e-16));
    double lo = -b, hi = b;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double p1 = hi - gr * (hi - lo), p2 = lo + gr * (hi - lo);
    double f1 = phi(p1), f2 = phi(p2);
    for (int it = 0; it < 220; ++it) {
      if (f1 < f2) {
        hi = p2; p2 = p1; f2 = f1;
        p1 = hi - gr * (hi - lo); f1 = phi(p1);
      } else {
        lo = p1; p1 = p2; f1 = f2;
        p2 = lo + gr * (hi - lo); f2 = phi(p2);
      }
    }
    return std::min(f1, f2);
  };
  const auto ratio = [&](double mu) { return slice_value(mu) / mu; };

  std::vector<double> grid;
  for (int i = 0; i < 160; ++i) grid.push_back(std::pow(10.0, -8.0 + 8.0 * i / 159.0));
  for (int i = 1; i <= 160; ++i) grid.push_back(i / 160.0);
  std::sort(grid.begin(), grid.end());

  double best = 0.0, best_mu = grid.front();
  for (double mu : grid) {
    const double r = ratio(mu);
    if (r > best) { best = r; best_mu = mu; }
  }
  double lo = std::max(grid.front(), best_mu * 0.5), hi = std::min(1.0, best_mu * 2.0);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double p1 = hi - gr * (hi - lo), p2 = lo + gr * (hi - lo);
  double f1 = ratio(p1), f2 = ratio(p2);
  for (int it = 0; it < 60; ++it) {
    if (f1 > f2) {
      hi = p2; p2 = p1; f2 = f1;
      p1 = hi - gr * (hi - lo); f1 = ratio(p1);
    } else {
      lo = p1; p1 = p2; f1 = f2;
      p2 = lo + gr * (hi - lo); f2 = ratio(p2);
    }
  }
  return std::max(best, std::max(f1, f2));
}

double mori_correction(const OperatorSet& ops, const Eigen::MatrixXd& a,
                       const MoriProjection& mori) {
  const Eigen::Index n = ops.K.rows();
  const Eigen::MatrixXd pk = mori.P * ops.K;
  Eigen::MatrixXd form = a * pk;
  form += a.transpose() * pk;
  Eigen::MatrixXd m = 0.5 * (form + form.transpose());

  const Eigen::MatrixXd ub = column_span(mori.U);
  Eigen::MatrixXd seed(n, 3 * ub.cols());
  seed << a * ub, a.transpose() * ub, ops.K.transpose() * ub;
  Eigen::MatrixXd w0(n, 2 * seed.cols());
  w0 << seed, ops.Pi * seed;
  const Eigen::MatrixXd w = column_span(w0);

  const Eigen::MatrixXd m_small = w.transpose() * m * w;
  const Eigen::MatrixXd s_small =
      Eigen::MatrixXd::Identity(w.cols(), w.cols()) - w.transpose() * ops.Pi * w;
  return tightest_mixed_bound(m_small, s_small);
}

}  // namespace

HypoConstants estimate_constants(const OperatorSet& ops, const Eigen::MatrixXd& a,
                                 const MoriProjection* mori) {
  const Eigen::Index n = ops.K.rows();
  if (a.rows() != n || a.cols() != n)
    throw DomainError("estimate_constants: auxiliary operator shape mismatch");

  const PiSplit split = split_projector(ops.Pi);
  if (split.complement.cols() == 0)
    throw ConfigError(
        "estimate_constants: Ran(I - Pi) is empty; the Hermite direction needs "
        "at least two modes");
  if (split.range.cols() < 2)
    throw ConfigError(
        "estimate_constants: Ran(Pi) holds only constants; the position "
        "direction needs at least two modes");

  HypoConstants out;
  const Eigen::MatrixXd& c = split.complement;
  out.lambda_m = smallest_eig(-(c.transpose() * ops.D * c));

  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
  e0(0) = 1.0;
  const Eigen::MatrixXd r_red =
      split.range - e0 * (e0.transpose() * split.range);
  const Eigen::MatrixXd r0 = column_span(r_red);
  const Eigen::MatrixXd b = ops.L * r0;
  out.lambda_M = smallest_eig(b.transpose() * b);

  out.c1 = largest_singular(a * (ops.D * c));
  out.c2 = largest_singular(a * (ops.L * c));
  out.c3 = out.c1 + out.c2;
  out.c4 = (mori != nullptr && mori->U.cols() > 0) ? mori_correction(ops, a, *mori) : 0.0;

  const Eigen::MatrixXd excess =
      a * a.transpose() - (Eigen::MatrixXd::Identity(n, n) - ops.Pi);
  out.chain_excess = largest_eig(excess);
  out.chain_bound_holds = out.chain_excess <= 1e-10;
  return out;
}

std::string to_string(CertTarget target) {
  return target == CertTarget::K ? "K" : "QKQ";
}

namespace {

double kappa_of(double delta, double eps, double lm, double lM, double c) {
  const double t1 = lm - eps * (1.0 + c) * (1.0 + 0.5 / delta);
  const double t2 = eps * (lM / (1.0 + lM) - 0.5 * (1.0 + c) * delta);
  return std::min(t1, t2);
}

struct GridBest {
  double kappa = -kInf;
  double delta = 0.0;
  double eps = 0.0;
};

void scan_grid(GridBest& best, double d_lo, double d_hi, int nd, double e_lo,
               double e_hi, int ne, double lm, double lM, double c) {
  const double ld = std::log(d_hi / d_lo), le = std::log(e_hi / e_lo);
  for (int j = 0; j < ne; ++j) {
    const double eps = e_lo * std::exp(le * j / (ne - 1));
    for (int i = 0; i < nd; ++i) {
      const double delta = d_lo * std::exp(ld * i / (nd - 1));
      const double k = kappa_of(delta, eps, lm, lM, c);
      if (k > best.kappa) best = {k, delta, eps};
    }
  }
}

}  // namespace

HypoCertificate certify(const HypoConstants& constants, CertTarget target,
                        int n_delta, int n_eps, double comparison_gap) {
  if (n_delta < 2 || n_eps < 2)
    throw DomainError("certify: grid sizes must be at least 2");

  HypoCertificate cert;
  cert.constants = constants;
  cert.target = target;
  cert.comparison_gap = comparison_gap;

  const double c = target == CertTarget::K ? constants.c3 : constants.c3 + constants.c4;
  const double lm = constants.lambda_m, lM = constants.lambda_M;
  if (!std::isfinite(c) || lm <= 0.0 || lM <= 0.0) {
    cert.kappa = -kInf;
    cert.message = std::isfinite(c)
                       ? "coercivity constants are not strictly positive"
                       : "c4 is infinite: the mixed bound fails on Ran(Pi)";
    return cert;
  }

  const double delta_max = 2.0 * lM / ((1.0 + lM) * (1.0 + c));
  const double eps_hi = 1.0 - 1e-9;
  GridBest best;
  scan_grid(best, delta_max * 1e-6, delta_max, n_delta, 1e-8, eps_hi, n_eps, lm, lM, c);

  double df = std::pow(1e6, 1.0 / (n_delta - 1));
  double ef = std::pow(eps_hi / 1e-8, 1.0 / (n_eps - 1));
  for (int round = 0; round < 10; ++round) {
    const double d_lo = std::max(best.delta / df, delta_max * 1e-12);
    const double d_hi = std::min(best.delta * df, delta_max);
    const double e_lo = std::max(best.eps / ef, 1e-12);
    const double e_hi = std::min(best.eps * ef, eps_hi);
    scan_grid(best, d_lo, d_hi, 33, e_lo, e_hi, 33, lm, lM, c);
    df = std::pow(df, 0.25);
    ef = std::pow(ef, 0.25);
  }

  cert.kappa = best.kappa;
  cert.delta = best.delta;
  cert.epsilon = best.eps;
  if (best.kappa > 0.0) {
    cert.success = true;
    cert.lambda_cert = best.kappa / (1.0 + best.eps);
    cert.c_cert = std::sqrt((1.0 + best.eps) / (1.0 - best.eps));
    cert.message = "certified";
  } else {
    std::ostringstream os;
    os << "certificate failure: kappa <= 0 over the whole grid (best "
       << best.kappa << ")";
    cert.message = os.str();
  }
  return cert;
}

EntropySeries entropy_monitor(const OperatorSet& ops, const Eigen::MatrixXd& a,
                              double eps, Eigen::VectorXd g0, double t_max,
                              double dt_out, CertTarget target,
                              const MoriProjection* mori) {
  const Eigen::Index n = ops.K.rows();
  if (eps >= 1.0)
    throw DomainError("entropy_monitor: eps must be below 1 for norm equivalence");
  if (eps < 0.0) throw DomainError("entropy_monitor: eps must be nonnegative");
  if (g0.size() != n) throw DomainError("entropy_monitor: state dimension mismatch");
  if (dt_out <= 0.0 || t_max < 0.0)
    throw DomainError("entropy_monitor: need dt_out > 0 and t_max >= 0");
  if (target == CertTarget::QKQ && mori == nullptr)
    throw ConfigError("entropy_monitor: the QKQ target needs Mori data");

  Eigen::VectorXd g = g0;
  g(0) = 0.0;
  if (target == CertTarget::QKQ) {
    for (int pass = 0; pass < 64; ++pass) {
      g = mori->Q * g;
      g(0) = 0.0;
      const double drift = std::max((mori->P * g).norm(), std::abs(g(0)));
      if (drift <= 1e-13 * std::max(1.0, g.norm())) break;
      if (pass == 63)
        throw NumericsError(
            "entropy_monitor: could not project onto Ran(Q) with zero mean");
    }
  }

  const Eigen::MatrixXd gen =
      target == CertTarget::K ? ops.K : build_qkq(ops, *mori);
  const auto n_out = static_cast<Eigen::Index>(std::floor(t_max / dt_out + 1e-9)) + 1;

  EntropySeries out;
  out.t.resize(n_out);
  out.h.resize(n_out);
  out.norm_sq.resize(n_out);
  out.worst_lower_margin = kInf;
  out.worst_upper_margin = kInf;

  Propagator prop(gen, dt_out);
  double tol = 0.0;
  for (Eigen::Index k = 0; k < n_out; ++k) {
    const double ns = g.squaredNorm();
    const double h = 0.5 * ns + eps * g.dot(a * g);
    out.t(k) = k * dt_out;
    out.h(k) = h;
    out.norm_sq(k) = ns;
    out.worst_lower_margin = std::min(out.worst_lower_margin, h - 0.5 * (1.0 - eps) * ns);
    out.worst_upper_margin = std::min(out.worst_upper_margin, 0.5 * (1.0 + eps) * ns - h);
    tol = std::max(tol, 1e-12 * (1.0 + ns));
    if (k + 1 < n_out) prop.advance(g);
  }
  out.equivalence_ok =
      out.worst_lower_margin >= -tol && out.worst_upper_margin >= -tol;
  return out;
}

}  // namespace emz
