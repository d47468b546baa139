#pragma once

#include <Eigen/Dense>
#include <vector>

#include "emz/basis.hpp"
#include "emz/observable.hpp"

namespace emz {

/// Galerkin matrices of the Langevin generator on the tensor basis.
///
/// K = D - L where D is the symmetric (dissipative) part, diagonal in the
/// Hermite direction with entries -gamma*j, and L is antisymmetric transport.
/// L is produced by explicitly skew-symmetrizing the assembled transport
/// matrix; `skew_residual` records the symmetric contamination that was
/// removed (pure quadrature noise, reported as a diagnostic).
struct OperatorSet {
  Eigen::MatrixXd K;
  Eigen::MatrixXd D;
  Eigen::MatrixXd L;
  Eigen::MatrixXd Pi;  // orthogonal projector onto Hermite degree 0
  double gamma = 0.0;
  double beta = 0.0;
  double skew_residual = 0.0;
};

OperatorSet assemble_operators(const GalerkinBasis& basis, double gamma);

/// Mori projection data for a finite set of observables.
///
/// U stacks the observable coefficient vectors as columns, G is their Gram
/// matrix, P the orthogonal projector onto span(U), Q = I - P, and Omega the
/// streaming matrix:  Omega_ij = sum_k Ginv_jk <u_k, K u_i>, so that
/// (P K u_i) = sum_j Omega_ij u_j.
struct MoriProjection {
  Eigen::MatrixXd U;
  Eigen::MatrixXd G;
  Eigen::MatrixXd Ginv;
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd Omega;
  Eigen::VectorXd means;  // equilibrium mean of each observable
  std::vector<std::string> names;
};

MoriProjection build_mori(const OperatorSet& ops,
                          const GalerkinBasis& basis,
                          const std::vector<Observable>& observables);

/// Q K Q, the generator of orthogonal dynamics.
Eigen::MatrixXd build_qkq(const OperatorSet& ops, const MoriProjection& mori);

/// Auxiliary operator A = (I + B^T B)^{-1} B^T with B = L Pi.
/// Maps into Ran(Pi), kills constants, and has singular values
/// sigma/(1+sigma^2) <= 1/2.
Eigen::MatrixXd build_aux_a(const OperatorSet& ops);

}  // namespace emz
