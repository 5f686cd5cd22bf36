#pragma once

#include <string>
#include <vector>

namespace fraceig {

/// Minimal SVG 1.1 single-polyline plot with axis frame and labels.
void write_svg_polyline(const std::string& path,
                        const std::vector<double>& xs,
                        const std::vector<double>& ys,
                        const std::string& x_label,
                        const std::string& y_label);

}  // namespace fraceig
