#include "fraceig/spectral_operator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace fraceig {

namespace {

Eigen::MatrixXd assemble_laplacian(const Grid& grid) {
    const int n = grid.n_per_axis;
    const double w = 1.0 / (grid.h * grid.h);
    const int nodes = grid.num_nodes();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nodes, nodes);
    if (grid.dim == 1) {
        for (int i = 0; i < n; ++i) {
            a(i, i) = 2.0 * w;
            if (i > 0) a(i, i - 1) = -w;
            if (i + 1 < n) a(i, i + 1) = -w;
        }
        return a;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int idx = grid.flat_index(i, j);
            a(idx, idx) = 4.0 * w;
            if (i > 0) a(idx, grid.flat_index(i - 1, j)) = -w;
            if (i + 1 < n) a(idx, grid.flat_index(i + 1, j)) = -w;
            if (j > 0) a(idx, grid.flat_index(i, j - 1)) = -w;
            if (j + 1 < n) a(idx, grid.flat_index(i, j + 1)) = -w;
        }
    }
    return a;
}

}  // namespace

double SpectralOperator::sqrt_lambda1() const { return std::sqrt(lambda1); }

SpectralOperator build_operator(const Grid& grid) {
    SpectralOperator op;
    op.grid = grid;
    op.a = assemble_laplacian(grid);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.a);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("build_operator: eigendecomposition failed");
    op.eigvals = solver.eigenvalues();
    op.eigvecs = solver.eigenvectors();
    if (op.eigvals[0] <= 0.0)
        throw std::runtime_error("build_operator: nonpositive eigenvalue");

    const Eigen::VectorXd sqrt_vals = op.eigvals.array().sqrt();
    op.a_half = op.eigvecs * sqrt_vals.asDiagonal() * op.eigvecs.transpose();
    op.a_half_inv =
        op.eigvecs * sqrt_vals.cwiseInverse().asDiagonal() * op.eigvecs.transpose();
    op.lambda1 = op.eigvals[0];
    op.phi1 = op.eigvecs.col(0);
    if (op.phi1.sum() < 0.0) op.phi1 = -op.phi1;
    if (op.phi1.minCoeff() <= 0.0)
        throw std::runtime_error("build_operator: first eigenvector not entrywise positive");
    return op;
}

Eigen::VectorXd half_apply(const SpectralOperator& op, const Eigen::VectorXd& u) {
    if (u.size() != op.a_half.rows())
        throw std::invalid_argument("half_apply: size mismatch");
    return op.a_half * u;
}

Eigen::VectorXd half_solve(const SpectralOperator& op, const Eigen::VectorXd& rhs) {
    if (rhs.size() != op.a_half_inv.rows())
        throw std::invalid_argument("half_solve: size mismatch");
    return op.a_half_inv * rhs;
}

}  // namespace fraceig
