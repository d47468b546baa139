#pragma once

#include <Eigen/Dense>
#include <vector>

#include "emz/operators.hpp"

namespace emz {

/// Full nonsymmetric eigendecomposition with numerical-kernel bookkeeping.
/// Eigenvalues are sorted by descending real part (ties by imaginary part).
/// The kernel is the set {|lambda| <= tol_rel * ||M||_2}; the gap is the
/// negated spectral abscissa of the remaining eigenvalues and is undefined
/// when everything falls in the kernel.
struct SpectrumReport {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right_vectors;  // empty unless requested
  double norm_estimate = 0.0;
  double kernel_tol = 0.0;  // absolute threshold actually applied
  int kernel_dim = 0;
  bool gap_defined = false;
  double spectral_abscissa = 0.0;  // max Re over non-kernel eigenvalues
  double gap = 0.0;                // -spectral_abscissa
};

SpectrumReport compute_spectrum(const Eigen::MatrixXd& m, double tol_rel = 1e-8,
                                bool with_vectors = false);

/// Power-iteration estimate of the operator 2-norm (deterministic start).
double operator_norm_estimate(const Eigen::MatrixXd& m);

/// e^{t m} v for t >= 0 via the dense scaling-and-squaring exponential.
Eigen::VectorXd propagate(const Eigen::MatrixXd& m, const Eigen::VectorXd& v, double t);

/// Repeated propagation on a uniform grid: precomputes E = exp(dt m) once and
/// walks v_{k+1} = E v_k, so grid values are exact semigroup samples.
class Propagator {
 public:
  Propagator(const Eigen::MatrixXd& m, double dt);
  const Eigen::MatrixXd& step_matrix() const { return step_; }
  void advance(Eigen::VectorXd& v) const { v = step_ * v; }
  void advance(Eigen::MatrixXd& v) const { v = step_ * v; }

 private:
  Eigen::MatrixXd step_;
};

/// Spectral projector onto the numerical kernel of a (generally non-normal)
/// matrix, built from matched left/right singular null bases; oblique unless
/// the two null spaces coincide. pairing_condition diagnoses near-defective
/// kernel blocks.
struct SpectralKernel {
  Eigen::MatrixXd projector;
  int dim = 0;
  double pairing_condition = 1.0;
};

SpectralKernel kernel_spectral_projector(const Eigen::MatrixXd& m, double tol_rel = 1e-8);

/// Largest real part among eigenvalues of m outside its numerical kernel
/// whose modes are both excited by the initial data v0 and visible to the
/// weight w, i.e. modes i with |c_i| |<w, v_i>| above overlap_tol_rel times
/// the largest such product, where v0 = sum_i c_i v_i. This is the rate that
/// governs the tail of t -> <w, e^{tm} v0> when symmetry or degeneracy makes
/// the global non-kernel abscissa invisible to the data. Throws NumericsError
/// if no non-kernel mode is excited.
double excited_abscissa(const Eigen::MatrixXd& m, const Eigen::VectorXd& v0,
                        const Eigen::VectorXd& w, double kernel_tol_rel = 1e-8,
                        double overlap_tol_rel = 1e-8);

/// Kernel spectral projectors of K and QKQ and their mismatch on Ran(Q).
///
/// pi0 is the rank-one projector onto constants (the ergodic kernel of K).
/// pi0_q is the spectral projector of QKQ onto its numerical kernel, built
/// from matched left/right kernel bases; it is an oblique projector in
/// general. The discrepancy field is max_g ||pi0_q g - pi0 g|| over an
/// orthonormal basis g of Ran(Q).
struct KernelProjections {
  Eigen::MatrixXd pi0;
  Eigen::MatrixXd pi0_q;
  int kernel_dim_qkq = 0;
  double pairing_condition = 0.0;  // condition number of the left/right pairing
  double discrepancy = 0.0;
};

KernelProjections kernel_projections(const Eigen::MatrixXd& k_mat,
                                     const Eigen::MatrixXd& qkq,
                                     const MoriProjection& mori,
                                     double tol_rel = 1e-8);

/// Classification of the numerical kernel of QKQ into the three admissible
/// families: kernel of K, range of P, and w-vectors (Q-invariant vectors
/// that K maps into span{u_i}).
struct KernelClassification {
  int kernel_dim = 0;
  int ker_k = 0;
  int ran_p = 0;
  int w_type = 0;
  int unclassified = 0;
  std::vector<double> residuals;  // residual of the accepting test, per vector
};

KernelClassification classify_kernel(const Eigen::MatrixXd& qkq,
                                     const Eigen::MatrixXd& k_mat,
                                     const MoriProjection& mori,
                                     double kernel_tol_rel = 1e-8,
                                     double class_tol = 1e-6);

}  // namespace emz
