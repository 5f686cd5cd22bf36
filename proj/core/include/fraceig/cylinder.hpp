#pragma once

#include <Eigen/Core>

#include "fraceig/grid.hpp"

namespace fraceig {

/// Discrete harmonic field on the truncated cylinder Omega x (0, R):
/// layer j holds the values at height y_j = j * hy, j = 0..layers.
/// Layer 0 carries the given bottom data, layer `layers` is zero (top
/// truncation), and the lateral trace is identically zero.
struct CylinderField {
    Grid grid;
    double height = 0.0;   // R
    int layers = 0;        // m; (m+1) stored layers including both ends
    double hy = 0.0;       // R / m
    Eigen::MatrixXd values;      // (layers+1) x num_nodes
    double residual = 0.0;       // achieved max-norm Laplacian residual
    double residual_bound = 0.0; // tolerance the solve was required to meet

    Eigen::VectorXd layer(int j) const { return values.row(j).transpose(); }
    double y_of(int j) const { return j * hy; }
};

/// Solves the 5/7-point discrete Laplace equation on the truncated
/// cylinder with bottom data u, zero lateral and top data. Conjugate
/// gradients on the SPD system; the achieved residual is recorded and
/// must satisfy residual <= residual_bound (scaled by the stencil norm),
/// otherwise the solver reports non-convergence.
CylinderField extend_harmonic(const Grid& grid, const Eigen::VectorXd& u,
                              double height, int layers);

/// -d/dy of the field at y = 0 by the one-sided second-order stencil.
/// This is the Neumann-trace realization of A^{1/2} u. Requires m >= 3.
Eigen::VectorXd neumann_trace(const CylinderField& field);

/// Trapezoid-in-y quadrature of the squared-gradient energy over
/// Omega x (0, R) using edge differences in x (zero boundary ghosts).
double cylinder_dirichlet_energy(const CylinderField& field);

}  // namespace fraceig
