#include "emz/spectral.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "emz/errors.hpp"

namespace emz {

namespace {

std::string dump_matrix_csv(const Eigen::MatrixXd& m, const std::string& stem) {
  const auto path = std::filesystem::temp_directory_path() / (stem + ".csv");
  std::ofstream out(path);
  out << "i,j,value\n";
  char buf[128];
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g\n", static_cast<long long>(i),
                    static_cast<long long>(j), m(i, j));
      out << buf;
    }
  return path.string();
}

struct NullBases {
  Eigen::MatrixXd right;
  Eigen::MatrixXd left;
  double sigma_max = 0.0;
  double tol_abs = 0.0;
};

NullBases svd_null_bases(const Eigen::MatrixXd& m, double tol_rel) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  NullBases nb;
  nb.sigma_max = sv.size() ? sv(0) : 0.0;
  nb.tol_abs = tol_rel * std::max(nb.sigma_max, 1e-300);
  Eigen::Index k = 0;
  while (k < sv.size() && sv(sv.size() - 1 - k) <= nb.tol_abs) ++k;
  nb.right = svd.matrixV().rightCols(k);
  nb.left = svd.matrixU().rightCols(k);
  return nb;
}

}  // namespace

double operator_norm_estimate(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::Index n = m.cols();
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::cos(double(i) + 1.0);
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = std::sqrt(nw);
    v = w / nw;
    if (it > 4 && std::abs(next - est) <= 1e-9 * next) return next;
    est = next;
  }
  return est;
}

SpectrumReport compute_spectrum(const Eigen::MatrixXd& m, double tol_rel, bool with_vectors) {
  if (m.rows() != m.cols()) throw DomainError("spectrum: matrix must be square");
  SpectrumReport rep;
  rep.norm_estimate = operator_norm_estimate(m);
  rep.kernel_tol = tol_rel * rep.norm_estimate;

  Eigen::EigenSolver<Eigen::MatrixXd> es(m, with_vectors);
  if (es.info() != Eigen::Success) {
    const std::string path = dump_matrix_csv(m, "emz_spectrum_failure");
    throw NumericsError("spectrum: eigensolver failed to converge; matrix dumped to " + path);
  }

  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
    return ev(a).imag() > ev(b).imag();
  });

  rep.eigenvalues.resize(n);
  if (with_vectors) rep.right_vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rep.eigenvalues(i) = ev(order[i]);
    if (with_vectors) rep.right_vectors.col(i) = es.eigenvectors().col(order[i]);
  }

  rep.kernel_dim = 0;
  rep.gap_defined = false;
  rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(rep.eigenvalues(i)) <= rep.kernel_tol) {
      ++rep.kernel_dim;
    } else {
      rep.gap_defined = true;
      rep.spectral_abscissa = std::max(rep.spectral_abscissa, rep.eigenvalues(i).real());
    }
  }
  if (rep.gap_defined) {
    rep.gap = -rep.spectral_abscissa;
  } else {
    rep.spectral_abscissa = std::numeric_limits<double>::quiet_NaN();
    rep.gap = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

Eigen::VectorXd propagate(const Eigen::MatrixXd& m, const Eigen::VectorXd& v, double t) {
  if (m.rows() != m.cols() || m.cols() != v.size())
    throw DomainError("propagate: shape mismatch");
  if (t < 0) throw DomainError("propagate: negative time rejected");
  if (t == 0) return v;
  const Eigen::MatrixXd e = (t * m).exp();
  return e * v;
}

Propagator::Propagator(const Eigen::MatrixXd& m, double dt) {
  if (m.rows() != m.cols()) throw DomainError("propagator: matrix must be square");
  if (dt < 0) throw DomainError("propagator: negative time step rejected");
  step_ = (dt * m).exp();
}

SpectralKernel kernel_spectral_projector(const Eigen::MatrixXd& m, double tol_rel) {
  if (m.rows() != m.cols()) throw DomainError("kernel projector: matrix must be square");
  const Eigen::Index n = m.rows();
  SpectralKernel sk;
  const NullBases nb = svd_null_bases(m, tol_rel);
  sk.dim = static_cast<int>(nb.right.cols());
  if (sk.dim == 0) {
    sk.projector = Eigen::MatrixXd::Zero(n, n);
    return sk;
  }
  // pi = R (L^T R)^{-1} L^T from matched left/right kernel bases
  const Eigen::MatrixXd pairing = nb.left.transpose() * nb.right;
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(pairing);
  const double smin = psvd.singularValues().minCoeff();
  const double smax = psvd.singularValues().maxCoeff();
  if (!(smin > 1e-8))
    throw NumericsError(
        "kernel projector: left/right kernel pairing is numerically singular "
        "(defective kernel block); pairing minimum singular value " +
        std::to_string(smin));
  sk.pairing_condition = smax / smin;
  sk.projector = nb.right * pairing.partialPivLu().solve(nb.left.transpose());
  return sk;
}

double excited_abscissa(const Eigen::MatrixXd& m, const Eigen::VectorXd& v0,
                        const Eigen::VectorXd& w, double kernel_tol_rel,
                        double overlap_tol_rel) {
  if (m.rows() != m.cols() || m.cols() != v0.size() || v0.size() != w.size())
    throw DomainError("excited_abscissa: shape mismatch");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, true);
  if (es.info() != Eigen::Success)
    throw NumericsError("excited_abscissa: eigensolver failed to converge");
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  const Eigen::VectorXcd vals = es.eigenvalues();
  const Eigen::VectorXcd coef = vecs.partialPivLu().solve(v0.cast<std::complex<double>>());
  const Eigen::VectorXcd wproj = vecs.adjoint() * w.cast<std::complex<double>>();
  const double kernel_tol = kernel_tol_rel * std::max(operator_norm_estimate(m), 1e-300);

  Eigen::VectorXd contrib = Eigen::VectorXd::Zero(vals.size());
  double cmax = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (std::abs(vals(i)) <= kernel_tol) continue;
    contrib(i) = std::abs(coef(i)) * std::abs(wproj(i));
    cmax = std::max(cmax, contrib(i));
  }
  if (!(cmax > 1e-12 * v0.norm() * w.norm()))
    throw NumericsError(
        "excited_abscissa: no modes outside the numerical kernel are excited "
        "by the given data");
  double abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (std::abs(vals(i)) <= kernel_tol) continue;
    if (contrib(i) >= overlap_tol_rel * cmax)
      abscissa = std::max(abscissa, vals(i).real());
  }
  return abscissa;
}

KernelProjections kernel_projections(const Eigen::MatrixXd& k_mat,
                                     const Eigen::MatrixXd& qkq,
                                     const MoriProjection& mori,
                                     double tol_rel) {
  const Eigen::Index n = k_mat.rows();
  if (qkq.rows() != n || qkq.cols() != n)
    throw DomainError("kernel_projections: shape mismatch");

  KernelProjections kp;
  kp.pi0 = Eigen::MatrixXd::Zero(n, n);
  kp.pi0(0, 0) = 1.0;

  const SpectralKernel sk = kernel_spectral_projector(qkq, tol_rel);
  kp.kernel_dim_qkq = sk.dim;
  kp.pairing_condition = sk.pairing_condition;
  kp.pi0_q = sk.projector;

  // orthonormal basis of Ran(Q) = span(observables)^perp via full QR
  const Eigen::Index m_obs = mori.U.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mori.U);
  const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd ran_q = full_q.rightCols(n - m_obs);

  const Eigen::MatrixXd diff = (kp.pi0_q - kp.pi0) * ran_q;
  kp.discrepancy = 0.0;
  for (Eigen::Index j = 0; j < diff.cols(); ++j)
    kp.discrepancy = std::max(kp.discrepancy, diff.col(j).norm());
  return kp;
}

KernelClassification classify_kernel(const Eigen::MatrixXd& qkq,
                                     const Eigen::MatrixXd& k_mat,
                                     const MoriProjection& mori,
                                     double kernel_tol_rel,
                                     double class_tol) {
  KernelClassification kc;
  const NullBases nb = svd_null_bases(qkq, kernel_tol_rel);
  Eigen::MatrixXd s = nb.right;
  kc.kernel_dim = static_cast<int>(s.cols());
  if (kc.kernel_dim == 0) return kc;

  // Stage 1: rotate the kernel basis so that directions annihilated by K
  // separate out (they are the small right singular vectors of K|_S).
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(k_mat * s, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::MatrixXd rot = s * svd.matrixV();
    int hits = 0;
    for (Eigen::Index j = sv.size(); j-- > 0;) {
      if (sv(j) <= class_tol) {
        ++hits;
        kc.residuals.push_back(sv(j));
      } else {
        break;
      }
    }
    kc.ker_k = hits;
    s = rot.leftCols(s.cols() - hits);
  }

  // Stage 2: same deflation against (I - P) isolates Ran(P) directions.
  if (s.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mori.Q * s, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::MatrixXd rot = s * svd.matrixV();
    int hits = 0;
    for (Eigen::Index j = sv.size(); j-- > 0;) {
      if (sv(j) <= class_tol) {
        ++hits;
        kc.residuals.push_back(sv(j));
      } else {
        break;
      }
    }
    kc.ran_p = hits;
    s = rot.leftCols(s.cols() - hits);
  }

  // Stage 3: remaining vectors must be w-type: Q-invariant, mapped by K into
  // the observable span, and orthogonal to every observable.
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    const Eigen::VectorXd v = s.col(j);
    const double r_qinv = (mori.Q * v - v).norm();
    const Eigen::VectorXd kv = k_mat * v;
    const double r_span = (kv - mori.P * kv).norm();
    double r_orth = 0.0;
    for (Eigen::Index i = 0; i < mori.U.cols(); ++i)
      r_orth = std::max(r_orth, std::abs(v.dot(mori.U.col(i))) / mori.U.col(i).norm());
    const double rmax = std::max({r_qinv, r_span, r_orth});
    kc.residuals.push_back(rmax);
    if (rmax <= class_tol)
      ++kc.w_type;
    else
      ++kc.unclassified;
  }
  return kc;
}

}  // namespace emz
