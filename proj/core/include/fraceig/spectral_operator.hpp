#pragma once

#include <Eigen/Core>

#include "fraceig/grid.hpp"

namespace fraceig {

/// Dense discrete Dirichlet Laplacian (3-point / 5-point stencil scaled by
/// 1/h^2) together with its full orthonormal eigendecomposition and the
/// square-root power A^{1/2} = Q diag(sqrt(lambda_k)) Q^T.
///
/// Eigenvectors are orthonormal in the plain Euclidean inner product;
/// phi1 is the eigenvector of the smallest eigenvalue, flipped entrywise
/// positive. Immutable after construction.
struct SpectralOperator {
    Grid grid;
    Eigen::MatrixXd a;           // -Delta_h
    Eigen::MatrixXd eigvecs;     // columns Q, ascending eigenvalue order
    Eigen::VectorXd eigvals;     // all > 0
    Eigen::MatrixXd a_half;      // Q diag(sqrt) Q^T
    Eigen::MatrixXd a_half_inv;  // Q diag(1/sqrt) Q^T
    double lambda1 = 0.0;
    Eigen::VectorXd phi1;

    double sqrt_lambda1() const;
};

SpectralOperator build_operator(const Grid& grid);

/// A^{1/2} u.
Eigen::VectorXd half_apply(const SpectralOperator& op, const Eigen::VectorXd& u);

/// A^{-1/2} rhs. Inverse positivity: a nonnegative rhs yields a
/// nonnegative result up to round-off (the M-matrix carrier of the
/// discrete maximum principle).
Eigen::VectorXd half_solve(const SpectralOperator& op, const Eigen::VectorXd& rhs);

}  // namespace fraceig
