#include "fraceig/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fraceig {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_svg_polyline(const std::string& path, const std::vector<double>& xs,
                        const std::vector<double>& ys,
                        const std::string& x_label,
                        const std::string& y_label) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("svg: coordinate lists differ in length");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);

    const double width = 640, height = 480, margin = 56;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (!xs.empty()) {
        x_lo = *std::min_element(xs.begin(), xs.end());
        x_hi = *std::max_element(xs.begin(), xs.end());
        y_lo = *std::min_element(ys.begin(), ys.end());
        y_hi = *std::max_element(ys.begin(), ys.end());
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;
    if (y_hi <= y_lo) y_hi = y_lo + 1;

    const auto px = [&](double x) {
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    };
    const auto py = [&](double y) {
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        << "width=\"" << width << "\" height=\"" << height << "\">\n"
        << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
        << width - 2 * margin << "\" height=\"" << height - 2 * margin
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    if (!xs.empty()) {
        out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < xs.size(); ++i) {
            if (i) out << ' ';
            out << fmt(px(xs[i])) << ',' << fmt(py(ys[i]));
        }
        out << "\"/>\n";
    }

    out << "  <text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n"
        << "  <text x=\"16\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
        << height / 2 << ")\">" << y_label << "</text>\n"
        << "  <text x=\"" << margin << "\" y=\"" << height - margin + 16
        << "\" font-size=\"11\">" << fmt(x_lo) << "</text>\n"
        << "  <text x=\"" << width - margin << "\" y=\"" << height - margin + 16
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(x_hi) << "</text>\n"
        << "  <text x=\"" << margin - 4 << "\" y=\"" << height - margin
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y_lo) << "</text>\n"
        << "  <text x=\"" << margin - 4 << "\" y=\"" << margin + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y_hi) << "</text>\n"
        << "</svg>\n";
}

}  // namespace fraceig
