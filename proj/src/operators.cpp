#include "emz/operators.hpp"

#include <cmath>
#include <string>

#include "emz/errors.hpp"

namespace emz {

OperatorSet assemble_operators(const GalerkinBasis& basis, double gamma) {
  if (!(gamma > 0))
    throw ConfigError("friction gamma must be positive, got " + std::to_string(gamma));
  const int nq = basis.n_q();
  const int np = basis.n_p();
  const int n = basis.size();
  const double beta = basis.beta();
  const double sqb = std::sqrt(beta);

  OperatorSet ops;
  ops.gamma = gamma;
  ops.beta = beta;

  ops.D = Eigen::MatrixXd::Zero(n, n);
  ops.Pi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < np; ++j) ops.D(basis.flat(i, j), basis.flat(i, j)) = -gamma * j;
    ops.Pi(basis.flat(i, 0), basis.flat(i, 0)) = 1.0;
  }

  // q-side quadrature matrices: Dq_ab = <g_a, g_b'>, Vq_ab = <g_a, V' g_b>
  const auto& x = basis.measure().nodes();
  const auto& w = basis.measure().weights();
  const auto& val = basis.q_values();
  const auto& der = basis.q_derivs();
  Eigen::VectorXd vprime(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k)
    vprime(k) = basis.measure().potential().grad(x(k));

  const Eigen::MatrixXd Dq = val.transpose() * w.asDiagonal() * der;
  const Eigen::MatrixXd Vq =
      val.transpose() * (w.array() * vprime.array()).matrix().asDiagonal() * val;

  // Transport p d_q - V' d_p. The Hermite direction only couples adjacent
  // degrees:  p h_b = (sqrt(b+1) h_{b+1} + sqrt(b) h_{b-1}) / sqrt(beta),
  //           d_p h_b = sqrt(beta) sqrt(b) h_{b-1}.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < np; ++b) {
    if (b + 1 < np) {
      const double raise = std::sqrt(double(b + 1)) / sqb;
      for (int ia = 0; ia < nq; ++ia)
        for (int ib = 0; ib < nq; ++ib)
          T(basis.flat(ia, b + 1), basis.flat(ib, b)) += raise * Dq(ia, ib);
    }
    if (b >= 1) {
      const double lower = std::sqrt(double(b)) / sqb;
      const double dlower = sqb * std::sqrt(double(b));
      for (int ia = 0; ia < nq; ++ia)
        for (int ib = 0; ib < nq; ++ib)
          T(basis.flat(ia, b - 1), basis.flat(ib, b)) +=
              lower * Dq(ia, ib) - dlower * Vq(ia, ib);
    }
  }

  // The continuum transport is exactly antisymmetric in L2 of the Gibbs
  // measure; the assembled matrix picks up a symmetric residual from the
  // quadrature. Keep the skew part so the algebraic identities (Gibbs state
  // in the kernel, sym(K) = D <= 0) hold at machine precision, and record
  // the discarded residual.
  ops.skew_residual = 0.5 * (T + T.transpose()).cwiseAbs().maxCoeff();
  Eigen::MatrixXd Lmat = -0.5 * (T - T.transpose());
  // the transport annihilates constants on both sides; pin that exactly
  Lmat.row(0).setZero();
  Lmat.col(0).setZero();
  ops.L = std::move(Lmat);
  ops.K = ops.D - ops.L;
  return ops;
}

MoriProjection build_mori(const OperatorSet& ops,
                          const GalerkinBasis& basis,
                          const std::vector<Observable>& observables) {
  if (observables.empty()) throw ConfigError("at least one observable is required");
  const int n = basis.size();
  const int m = static_cast<int>(observables.size());

  MoriProjection mp;
  mp.U.resize(n, m);
  mp.means.resize(m);
  for (int i = 0; i < m; ++i) {
    mp.U.col(i) = observables[i].expand(basis);
    mp.means(i) = mp.U(0, i);
    mp.names.push_back(observables[i].name);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mp.U, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (!(sv(m - 1) > 1e-10 * sv(0)))
    throw NumericsError("observables are numerically linearly dependent");

  mp.G = mp.U.transpose() * mp.U;
  mp.Ginv = mp.G.llt().solve(Eigen::MatrixXd::Identity(m, m));
  const Eigen::MatrixXd V = svd.matrixU();
  mp.P = V * V.transpose();
  mp.P = 0.5 * (mp.P + mp.P.transpose());
  mp.Q = Eigen::MatrixXd::Identity(n, n) - mp.P;

  // Omega_ij = sum_k Ginv_jk <u_k, K u_i>, so P K u_i = sum_j Omega_ij u_j
  const Eigen::MatrixXd inner = mp.U.transpose() * ops.K * mp.U;
  mp.Omega = (mp.Ginv * inner).transpose();
  return mp;
}

Eigen::MatrixXd build_qkq(const OperatorSet& ops, const MoriProjection& mori) {
  return mori.Q * ops.K * mori.Q;
}

Eigen::MatrixXd build_aux_a(const OperatorSet& ops) {
  const Eigen::Index n = ops.L.rows();
  const Eigen::MatrixXd B = ops.L * ops.Pi;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + B.transpose() * B;
  return M.llt().solve(B.transpose());
}

}  // namespace emz
