#include "emz/mori.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "emz/errors.hpp"
#include "emz/spectral.hpp"

namespace emz {

namespace {

constexpr double kMaskFloor = 1e-13;

Eigen::VectorXd make_grid(double t_max, double dt_out) {
  if (!(t_max > 0) || !(dt_out > 0))
    throw ConfigError("series grid requires t_max > 0 and dt_out > 0");
  const auto n = static_cast<int>(std::llround(t_max / dt_out)) + 1;
  if (n < 2) throw ConfigError("series grid has fewer than two points");
  Eigen::VectorXd t(n);
  for (int k = 0; k < n; ++k) t(k) = k * dt_out;
  return t;
}

/// Weighted log-linear fit of y ~ amplitude e^{-rate x} on selected points.
DecayFit fit_points(const std::vector<double>& x, const std::vector<double>& ylin,
                    const std::vector<double>& w, int min_points) {
  const int m = static_cast<int>(x.size());
  if (m < min_points)
    throw NumericsError("decay fit: only " + std::to_string(m) + " usable points, need " +
                        std::to_string(min_points));
  double sw = 0, sx = 0, sy = 0;
  std::vector<double> ylog(m);
  for (int i = 0; i < m; ++i) {
    ylog[i] = std::log(ylin[i]);
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * ylog[i];
  }
  const double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (ylog[i] - ybar);
  }
  if (!(sxx > 0)) throw NumericsError("decay fit: degenerate abscissa spread");

  DecayFit fit;
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.amplitude = std::exp(ybar - slope * xbar);
  fit.points_used = m;

  double ss_res = 0, ss_tot = 0, ss_log = 0;
  for (int i = 0; i < m; ++i) {
    const double model = fit.amplitude * std::exp(-fit.rate * x[i]);
    ss_res += (model - ylin[i]) * (model - ylin[i]);
    ss_tot += ylin[i] * ylin[i];
    const double rl = ylog[i] - (std::log(fit.amplitude) - fit.rate * x[i]);
    ss_log += w[i] * rl * rl;
  }
  fit.residual = ss_tot > 0 ? std::sqrt(ss_res / ss_tot) : 0.0;

  bool weighted = false;
  for (int i = 0; i < m; ++i) weighted |= (w[i] != 1.0);
  if (weighted) {
    fit.rate_se = std::sqrt(1.0 / sxx);  // weights are inverse log-variances
  } else if (m > 2) {
    fit.rate_se = std::sqrt((ss_log / (m - 2)) / sxx);
  } else {
    fit.rate_se = 0.0;
  }
  fit.ok = true;
  return fit;
}

DecayFit safe_fit(const std::function<DecayFit()>& f) {
  try {
    return f();
  } catch (const NumericsError& e) {
    DecayFit fit;
    fit.ok = false;
    fit.message = e.what();
    return fit;
  }
}

void check_shapes(const MoriProjection& mori, const OperatorSet& ops) {
  if (mori.Q.rows() != ops.K.rows())
    throw DomainError("series: projection and generator dimensions disagree");
}

}  // namespace

DecayFit decay_fit(const Eigen::VectorXd& t, const Eigen::VectorXd& y, double tail_fraction) {
  if (t.size() != y.size()) throw DomainError("decay_fit: grid/value length mismatch");
  if (!(tail_fraction > 0) || tail_fraction > 1.0)
    throw ConfigError("decay_fit: tail_fraction must lie in (0, 1]");
  const int n = static_cast<int>(t.size());
  const int start = n - std::max(1, static_cast<int>(std::ceil(tail_fraction * n)));
  std::vector<double> x, v, w;
  for (int i = start; i < n; ++i) {
    const double a = std::abs(y(i));
    if (a > kMaskFloor) {
      x.push_back(t(i));
      v.push_back(a);
      w.push_back(1.0);
    }
  }
  return fit_points(x, v, w, 5);
}

DecayFit envelope_decay_fit(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                            double tail_fraction, const Eigen::VectorXd* se,
                            double significance) {
  if (t.size() != y.size()) throw DomainError("envelope fit: grid/value length mismatch");
  if (se && se->size() != y.size())
    throw DomainError("envelope fit: standard-error length mismatch");
  const int n = static_cast<int>(t.size());

  // interior maxima only: boundary points sit at an inconsistent phase of the
  // oscillation and would bias the envelope
  std::vector<int> peaks;
  for (int i = 1; i + 1 < n; ++i) {
    const double a = std::abs(y(i));
    if (a >= std::abs(y(i - 1)) && a > std::abs(y(i + 1))) peaks.push_back(i);
  }
  const int keep = std::max(1, static_cast<int>(std::ceil(tail_fraction * peaks.size())));
  if (static_cast<int>(peaks.size()) > keep)
    peaks.erase(peaks.begin(), peaks.end() - keep);

  std::vector<double> x, v, w;
  for (int i : peaks) {
    const double a = std::abs(y(i));
    if (a <= kMaskFloor) continue;
    if (se) {
      const double s = (*se)(i);
      if (!(a > significance * s)) continue;
      const double logsd = std::max(s / a, 1e-12);
      w.push_back(1.0 / (logsd * logsd));
    } else {
      w.push_back(1.0);
    }
    x.push_back(t(i));
    v.push_back(a);
  }
  return fit_points(x, v, w, se ? 2 : 3);
}

KernelSeries memory_kernel_series(const MoriProjection& mori, const OperatorSet& ops,
                                  const Eigen::MatrixXd& qkq, double t_max,
                                  double dt_out, double tail_fraction) {
  check_shapes(mori, ops);
  const int m = static_cast<int>(mori.U.cols());

  KernelSeries ks;
  ks.t = make_grid(t_max, dt_out);
  const int nt = static_cast<int>(ks.t.size());

  Eigen::MatrixXd v = mori.Q * (ops.K * mori.U);  // columns f_i(0) = QKu_i
  const Eigen::MatrixXd v0 = v;
  const Eigen::MatrixXd w = ops.K.transpose() * mori.U;
  const Eigen::MatrixXd wq = mori.Q * w;

  // equilibrium from products of means: K_inf,ij = E[QKu_i] (Ginv E[QK*u])_j
  const Eigen::VectorXd a = wq.row(0).transpose();
  const Eigen::VectorXd b = v0.row(0).transpose();
  ks.equilibrium = b * (mori.Ginv * a).transpose();

  // true limit: e^{t QKQ} -> spectral projector onto the kernel of QKQ
  const SpectralKernel sk = kernel_spectral_projector(qkq);
  const Eigen::MatrixXd inner_inf = w.transpose() * (sk.projector * v0);
  ks.equilibrium_limit = (mori.Ginv * inner_inf).transpose();

  Propagator prop(qkq, dt_out);
  ks.values.reserve(nt);
  ks.fdt_difference.resize(nt);
  for (int k = 0; k < nt; ++k) {
    if (k > 0) prop.advance(v);
    const Eigen::MatrixXd inner = w.transpose() * v;  // <u_k, K f_i(t)>
    Eigen::MatrixXd kmat = (mori.Ginv * inner).transpose();
    const Eigen::MatrixXd fcorr = v.transpose() * v0;  // <f_i(t), f_k(0)>
    ks.fdt_difference(k) = (kmat + fcorr * mori.Ginv).cwiseAbs().maxCoeff();
    ks.values.push_back(std::move(kmat));
  }

  ks.fits.assign(m, std::vector<DecayFit>(m));
  Eigen::VectorXd series(nt);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < nt; ++k)
        series(k) = ks.values[k](i, j) - ks.equilibrium_limit(i, j);
      ks.fits[i][j] = safe_fit([&] { return decay_fit(ks.t, series, tail_fraction); });
    }
  return ks;
}

ForceSeries fluctuation_force_series(const MoriProjection& mori, const OperatorSet& ops,
                                     const Eigen::MatrixXd& qkq, double t_max,
                                     double dt_out, double tail_fraction) {
  check_shapes(mori, ops);
  const int m = static_cast<int>(mori.U.cols());
  for (int i = 0; i < m; ++i)
    if (!(std::abs(mori.means(i)) <= 1e-10))
      throw DomainError("fluctuation force series requires zero-mean observables "
                        "(stationary autocorrelation hypothesis); observable '" +
                        mori.names[i] + "' has mean " + std::to_string(mori.means(i)));

  ForceSeries fs;
  fs.t = make_grid(t_max, dt_out);
  const int nt = static_cast<int>(fs.t.size());

  Eigen::MatrixXd v = mori.Q * (ops.K * mori.U);
  const Eigen::MatrixXd v0 = v;
  fs.equilibrium = v0.row(0).transpose();
  fs.equilibrium_sq = fs.equilibrium.cwiseProduct(fs.equilibrium);

  fs.force_norm.resize(nt, m);
  fs.force_acf.resize(nt, m);
  Propagator prop(qkq, dt_out);
  for (int k = 0; k < nt; ++k) {
    if (k > 0) prop.advance(v);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd centered = v.col(i);
      centered(0) -= fs.equilibrium(i);
      fs.force_norm(k, i) = centered.norm();
      fs.force_acf(k, i) = v.col(i).dot(v0.col(i));
    }
  }

  fs.acf_fits.resize(m);
  Eigen::VectorXd series(nt);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < nt; ++k) series(k) = fs.force_acf(k, i) - fs.equilibrium_sq(i);
    fs.acf_fits[i] = safe_fit([&] { return decay_fit(fs.t, series, tail_fraction); });
  }
  return fs;
}

AcfSeries acf_series(const MoriProjection& mori, const OperatorSet& ops, double t_max,
                     double dt_out, double tail_fraction) {
  check_shapes(mori, ops);
  const int m = static_cast<int>(mori.U.cols());

  AcfSeries as;
  as.t = make_grid(t_max, dt_out);
  const int nt = static_cast<int>(as.t.size());
  as.equilibrium = mori.means * mori.means.transpose();

  Eigen::MatrixXd v = mori.U;
  Propagator prop(ops.K, dt_out);
  as.values.reserve(nt);
  for (int k = 0; k < nt; ++k) {
    if (k > 0) prop.advance(v);
    as.values.push_back(v.transpose() * mori.U);  // C_ij = <u_j, e^{tK} u_i>
  }

  as.fits.assign(m, std::vector<DecayFit>(m));
  as.envelope_fits.assign(m, std::vector<DecayFit>(m));
  Eigen::VectorXd series(nt);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < nt; ++k) series(k) = as.values[k](i, j) - as.equilibrium(i, j);
      as.fits[i][j] = safe_fit([&] { return decay_fit(as.t, series, tail_fraction); });
      as.envelope_fits[i][j] = safe_fit([&] { return envelope_decay_fit(as.t, series); });
    }
  return as;
}

}  // namespace emz
