#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "fraceig/grid.hpp"

namespace fraceig {

/// Positive weight g on the interior nodes, its central-difference
/// gradient, and gamma = max over interior nodes of (x . grad g) / g.
struct WeightField {
    Grid grid;
    Eigen::VectorXd values;        // g_i > 0
    Eigen::MatrixXd gradient;      // num_nodes x dim
    double gamma = 0.0;

    double max_value() const { return values.maxCoeff(); }
};

/// Builds a named weight:
///   one      g = 1                       (gamma = 0)
///   cospi    g = prod_j cos(pi x_j)      (vanishes on the boundary)
///   bump(c)  g = 1 + c |x|^2
WeightField build_weight(const std::string& spec, const Grid& grid);

/// Weight from an arbitrary positive function of the coordinates; the
/// gradient is taken by central differences using boundary-extended
/// evaluations of the function.
WeightField weight_from_function(
    const Grid& grid, const std::function<double(double, double)>& g);

}  // namespace fraceig
