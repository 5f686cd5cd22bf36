#pragma once

#include <array>
#include <stdexcept>

namespace fraceig {

/// Uniform interior grid on the centered interval (-1/2, 1/2) (dim 1) or
/// the centered square (-1/2, 1/2)^2 (dim 2). Dirichlet zero boundary
/// values are implicit. Node indexing is lexicographic: in 2D the node
/// (i, j) (i along x1, j along x2) has flat index j * n + i.
struct Grid {
    int dim = 1;
    int n_per_axis = 0;
    double h = 0.0;

    int num_nodes() const {
        return dim == 1 ? n_per_axis : n_per_axis * n_per_axis;
    }

    double axis_coord(int i) const { return -0.5 + (i + 1) * h; }

    /// Coordinates of a flat node index; x[1] is 0 in 1D.
    std::array<double, 2> coord(int idx) const {
        if (dim == 1) return {axis_coord(idx), 0.0};
        return {axis_coord(idx % n_per_axis), axis_coord(idx / n_per_axis)};
    }

    int flat_index(int i, int j) const { return j * n_per_axis + i; }
};

/// n >= 2 interior nodes per axis, spacing h = 1/(n+1).
Grid build_grid(int dim, int n);

}  // namespace fraceig
