#include "fraceig/grid.hpp"

namespace fraceig {

Grid build_grid(int dim, int n) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("build_grid: dim must be 1 or 2");
    if (n < 2)
        throw std::invalid_argument("build_grid: need at least 2 interior nodes per axis");
    Grid g;
    g.dim = dim;
    g.n_per_axis = n;
    g.h = 1.0 / (n + 1);
    return g;
}

}  // namespace fraceig
