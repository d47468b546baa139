#include "emz/volterra.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "emz/errors.hpp"

namespace emz {

KernelSeries volterra_extract(const AcfEstimate& acf, const Eigen::MatrixXd& omega,
                              double dt, double warn_threshold) {
  const std::int64_t n = acf.t.size();
  if (n < 5)
    throw DomainError("volterra: need at least 5 lag points for the stencils");
  if (static_cast<std::int64_t>(acf.values.size()) != n)
    throw DomainError("volterra: lag grid and value list disagree");
  const int m = static_cast<int>(omega.rows());
  if (omega.cols() != m || acf.values[0].rows() != m || acf.values[0].cols() != m)
    throw DomainError("volterra: observable dimensions disagree");
  if (!(dt > 0)) throw DomainError("volterra: dt must be positive");
  if (std::abs((acf.t(1) - acf.t(0)) - dt) > 1e-9 * std::max(1.0, dt))
    throw DomainError("volterra: dt disagrees with the lag grid spacing");

  const std::vector<Eigen::MatrixXd>& c = acf.values;

  // Conditioning gate on the lag-zero Gram block.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c[0]);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  if (!(smin > 1e-10 * smax))
    throw NumericsError(
        "volterra: lag-zero correlation block is numerically singular "
        "(condition " +
        std::to_string(smax / std::max(smin, 1e-300)) + ")");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(c[0]);
  auto solve_right = [&](const Eigen::MatrixXd& rhs) {
    // X = rhs * C0^{-1} via the transposed system
    return lu.solve(rhs.transpose()).transpose().eval();
  };

  // dC/dt: centered in the interior, one-sided at the ends, all one order
  // above the quadrature. The forward solve amplifies per-node data error by
  // 2/dt, so second-order stencils would excite an alternating O(dt) parasite
  // in the kernel; fourth-order stencils keep it below the O(dt^2)
  // product-integration error.
  const double d12 = 12.0 * dt;
  std::vector<Eigen::MatrixXd> cdot(n);
  cdot[0] = (-25.0 * c[0] + 48.0 * c[1] - 36.0 * c[2] + 16.0 * c[3] - 3.0 * c[4]) / d12;
  cdot[1] = (-3.0 * c[0] - 10.0 * c[1] + 18.0 * c[2] - 6.0 * c[3] + c[4]) / d12;
  for (std::int64_t k = 2; k < n - 2; ++k)
    cdot[k] = (c[k - 2] - 8.0 * c[k - 1] + 8.0 * c[k + 1] - c[k + 2]) / d12;
  cdot[n - 2] = (3.0 * c[n - 1] + 10.0 * c[n - 2] - 18.0 * c[n - 3] + 6.0 * c[n - 4] -
                 c[n - 5]) /
                d12;
  cdot[n - 1] = (25.0 * c[n - 1] - 48.0 * c[n - 2] + 36.0 * c[n - 3] -
                 16.0 * c[n - 4] + 3.0 * c[n - 5]) /
                d12;

  KernelSeries ks;
  ks.t = acf.t;
  ks.values.resize(n);
  ks.equilibrium = Eigen::MatrixXd::Zero(m, m);
  ks.equilibrium_limit = Eigen::MatrixXd::Zero(m, m);

  // K(0) from the once-differentiated equation at t = 0.
  const Eigen::MatrixXd cddot0 = (2.0 * c[0] - 5.0 * c[1] + 4.0 * c[2] - c[3]) / (dt * dt);
  ks.values[0] = solve_right(cddot0 - omega * cdot[0]);

  // Forward substitution through the trapezoidal convolution.
  for (std::int64_t k = 1; k < n; ++k) {
    Eigen::MatrixXd rhs = cdot[k] - omega * c[k] - 0.5 * dt * ks.values[0] * c[k];
    for (std::int64_t j = 1; j < k; ++j) rhs -= dt * ks.values[k - j] * c[j];
    ks.values[k] = solve_right(2.0 / dt * rhs);
  }

  // Reconstruction residual of the discrete equation, all rows.
  double num = 0.0, den = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    Eigen::MatrixXd conv = Eigen::MatrixXd::Zero(m, m);
    if (k > 0) {
      conv = 0.5 * dt * (ks.values[k] * c[0] + ks.values[0] * c[k]);
      for (std::int64_t j = 1; j < k; ++j) conv += dt * ks.values[k - j] * c[j];
    }
    num += (cdot[k] - omega * c[k] - conv).squaredNorm();
    den += cdot[k].squaredNorm();
  }
  ks.volterra_residual = std::sqrt(num / std::max(den, 1e-300));
  ks.residual_warning = ks.volterra_residual > warn_threshold;
  return ks;
}

}  // namespace emz
