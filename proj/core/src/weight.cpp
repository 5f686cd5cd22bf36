#include "fraceig/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace fraceig {

WeightField weight_from_function(
    const Grid& grid, const std::function<double(double, double)>& g) {
    const int nodes = grid.num_nodes();
    WeightField w;
    w.grid = grid;
    w.values.resize(nodes);
    w.gradient.resize(nodes, grid.dim);

    const double h = grid.h;
    double gamma = -std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < nodes; ++idx) {
        const auto x = grid.coord(idx);
        const double gi = g(x[0], x[1]);
        if (!(gi > 0.0))
            throw std::invalid_argument("weight must be positive at interior nodes");
        w.values[idx] = gi;
        double dot = 0.0;
        for (int d = 0; d < grid.dim; ++d) {
            double xp0 = x[0], xp1 = x[1], xm0 = x[0], xm1 = x[1];
            if (d == 0) { xp0 += h; xm0 -= h; } else { xp1 += h; xm1 -= h; }
            const double gd = (g(xp0, xp1) - g(xm0, xm1)) / (2.0 * h);
            w.gradient(idx, d) = gd;
            dot += x[d] * gd;
        }
        gamma = std::max(gamma, dot / gi);
    }
    w.gamma = gamma;
    if (!std::isfinite(w.gamma))
        throw std::runtime_error("weight gamma is not finite");
    return w;
}

WeightField build_weight(const std::string& spec, const Grid& grid) {
    if (spec == "one")
        return weight_from_function(grid, [](double, double) { return 1.0; });
    if (spec == "cospi") {
        if (grid.dim == 1)
            return weight_from_function(
                grid, [](double x, double) { return std::cos(M_PI * x); });
        return weight_from_function(grid, [](double x, double y) {
            return std::cos(M_PI * x) * std::cos(M_PI * y);
        });
    }
    if (spec.rfind("bump(", 0) == 0 && spec.back() == ')') {
        const std::string arg = spec.substr(5, spec.size() - 6);
        size_t pos = 0;
        double c = 0.0;
        try {
            c = std::stod(arg, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad bump weight argument: " + arg);
        }
        if (pos != arg.size())
            throw std::invalid_argument("bad bump weight argument: " + arg);
        return weight_from_function(grid, [c](double x, double y) {
            return 1.0 + c * (x * x + y * y);
        });
    }
    throw std::invalid_argument("unknown weight spec: " + spec);
}

}  // namespace fraceig
