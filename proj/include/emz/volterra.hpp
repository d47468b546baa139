#pragma once

#include <Eigen/Dense>

#include "emz/langevin.hpp"
#include "emz/mori.hpp"

namespace emz {

/// Recover the memory kernel from a measured autocorrelation by inverting the
/// projected evolution equation
///
///   dC/dt (t) = Omega C(t) + integral_0^t K(t - s) C(s) ds,
///
/// discretized with fourth-order centered differences for dC/dt (one-sided
/// at the ends) and trapezoidal product integration, then solved forward for
/// K(t_k); K(0) comes from the differentiated equation at t = 0. The lag grid
/// spacing must equal dt.
///
/// The returned series reports the relative reconstruction residual of the
/// discrete equation (the solve makes rows k >= 1 exact, so the residual is
/// dominated by the t = 0 row, which measures how consistent the data are
/// with Omega); residual_warning is set when it exceeds warn_threshold. Fits
/// and equilibria are left empty: they are properties of the generator-side
/// series, not of the data.
KernelSeries volterra_extract(const AcfEstimate& acf, const Eigen::MatrixXd& omega,
                              double dt, double warn_threshold = 1e-2);

}  // namespace emz
