#pragma once

#include <Eigen/Dense>

namespace twoway::linalg {

/// Selected eigenpairs of a symmetric matrix (ascending order). Backed by LAPACK
/// dsyevr; `first`/`last` are zero-based inclusive indices into the sorted spectrum.
struct SymmetricEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
SymmetricEigen symmetric_eigen_range(const Eigen::MatrixXd& m, int first, int last);
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m);

/// Eigenpairs of the pencil K x = λ H x with K symmetric positive definite on
/// the subspace {x : Cᵀx = 0} and H symmetric indefinite. Returns the n_pos
/// smallest positive and the n_neg negative eigenvalues closest to zero, in
/// ascending order of λ, with eigenvectors normalized to xᵀKx = 1.
struct PencilModes {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd vectors;
};
PencilModes pencil_modes_near_zero(const Eigen::MatrixXd& K, const Eigen::MatrixXd& H,
                                   const Eigen::MatrixXd& constraints, int n_pos, int n_neg);

/// Largest eigenvalue of S u = μ A u with A symmetric positive definite.
/// Throws Error when A is not positive definite.
double largest_generalized_eigenvalue(const Eigen::MatrixXd& S, const Eigen::MatrixXd& A,
                                      Eigen::VectorXd* argmax = nullptr);

}  // namespace twoway::linalg
