#include "fraceig/cylinder.hpp"

#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fraceig {

namespace {

/// Sparse -Delta_h on the interior nodes of the cross-section.
Eigen::SparseMatrix<double> cross_section_laplacian(const Grid& grid) {
    const int n = grid.n_per_axis;
    const double w = 1.0 / (grid.h * grid.h);
    const int nodes = grid.num_nodes();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nodes * 5);
    if (grid.dim == 1) {
        for (int i = 0; i < n; ++i) {
            trip.emplace_back(i, i, 2.0 * w);
            if (i > 0) trip.emplace_back(i, i - 1, -w);
            if (i + 1 < n) trip.emplace_back(i, i + 1, -w);
        }
    } else {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int idx = grid.flat_index(i, j);
                trip.emplace_back(idx, idx, 4.0 * w);
                if (i > 0) trip.emplace_back(idx, grid.flat_index(i - 1, j), -w);
                if (i + 1 < n) trip.emplace_back(idx, grid.flat_index(i + 1, j), -w);
                if (j > 0) trip.emplace_back(idx, grid.flat_index(i, j - 1), -w);
                if (j + 1 < n) trip.emplace_back(idx, grid.flat_index(i, j + 1), -w);
            }
        }
    }
    Eigen::SparseMatrix<double> a(nodes, nodes);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

}  // namespace

CylinderField extend_harmonic(const Grid& grid, const Eigen::VectorXd& u,
                              double height, int layers) {
    if (!(height > 0.0))
        throw std::invalid_argument("extend_harmonic: height must be positive");
    if (layers < 8)
        throw std::invalid_argument("extend_harmonic: need at least 8 layers");
    const int nodes = grid.num_nodes();
    if (u.size() != nodes)
        throw std::invalid_argument("extend_harmonic: bottom data size mismatch");

    CylinderField field;
    field.grid = grid;
    field.height = height;
    field.layers = layers;
    field.hy = height / layers;
    field.values = Eigen::MatrixXd::Zero(layers + 1, nodes);
    field.values.row(0) = u.transpose();

    const double wy = 1.0 / (field.hy * field.hy);
    const auto ax = cross_section_laplacian(grid);

    // Unknowns: layers j = 1..m-1, flat index (j-1)*nodes + node.
    const int unknowns = (layers - 1) * nodes;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(unknowns) * 7);
    for (int j = 1; j < layers; ++j) {
        const int base = (j - 1) * nodes;
        for (int k = 0; k < ax.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(ax, k); it; ++it)
                trip.emplace_back(base + it.row(), base + it.col(), it.value());
        }
        for (int i = 0; i < nodes; ++i) {
            trip.emplace_back(base + i, base + i, 2.0 * wy);
            if (j > 1) trip.emplace_back(base + i, base - nodes + i, -wy);
            if (j + 1 < layers) trip.emplace_back(base + i, base + nodes + i, -wy);
        }
    }
    Eigen::SparseMatrix<double> m(unknowns, unknowns);
    m.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    rhs.head(nodes) = wy * u;

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg;
    cg.setMaxIterations(50000);
    cg.setTolerance(1e-14);
    cg.compute(m);
    const Eigen::VectorXd v = cg.solve(rhs);

    const double stencil_scale =
        2.0 * grid.dim / (grid.h * grid.h) + 2.0 * wy;
    const double data_scale = std::max(1.0, u.cwiseAbs().maxCoeff());
    field.residual_bound = 1e-10 * stencil_scale * data_scale;
    field.residual = (m * v - rhs).cwiseAbs().maxCoeff();
    if (field.residual > field.residual_bound)
        throw std::runtime_error("extend_harmonic: solver did not reach the residual bound");

    for (int j = 1; j < layers; ++j)
        field.values.row(j) = v.segment((j - 1) * nodes, nodes).transpose();
    return field;
}

Eigen::VectorXd neumann_trace(const CylinderField& field) {
    if (field.layers < 3)
        throw std::invalid_argument("neumann_trace: need at least 3 layers");
    const Eigen::VectorXd v0 = field.layer(0);
    const Eigen::VectorXd v1 = field.layer(1);
    const Eigen::VectorXd v2 = field.layer(2);
    return (3.0 * v0 - 4.0 * v1 + v2) / (2.0 * field.hy);
}

double cylinder_dirichlet_energy(const CylinderField& field) {
    const Grid& grid = field.grid;
    const int n = grid.n_per_axis;
    const double h = grid.h;
    const double cell = std::pow(h, grid.dim);

    // In-plane part per layer: edge differences with zero ghosts equal
    // h^dim * v^T (-Delta_h) v; evaluate directly from differences.
    const auto plane_energy = [&](const Eigen::VectorXd& v) {
        double e = 0.0;
        if (grid.dim == 1) {
            for (int i = 0; i <= n; ++i) {
                const double a = (i > 0) ? v[i - 1] : 0.0;
                const double b = (i < n) ? v[i] : 0.0;
                const double d = (b - a) / h;
                e += d * d * h;
            }
            return e;
        }
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i <= n; ++i) {
                const double a = (i > 0) ? v[grid.flat_index(i - 1, j)] : 0.0;
                const double b = (i < n) ? v[grid.flat_index(i, j)] : 0.0;
                const double d = (b - a) / h;
                e += d * d * cell;
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= n; ++j) {
                const double a = (j > 0) ? v[grid.flat_index(i, j - 1)] : 0.0;
                const double b = (j < n) ? v[grid.flat_index(i, j)] : 0.0;
                const double d = (b - a) / h;
                e += d * d * cell;
            }
        }
        return e;
    };

    double energy = 0.0;
    for (int j = 0; j <= field.layers; ++j) {
        const double weight = (j == 0 || j == field.layers) ? 0.5 : 1.0;
        energy += weight * field.hy * plane_energy(field.layer(j));
    }
    for (int j = 0; j < field.layers; ++j) {
        const Eigen::VectorXd d = (field.layer(j + 1) - field.layer(j)) / field.hy;
        energy += cell * field.hy * d.squaredNorm();
    }
    return energy;
}

}  // namespace fraceig
