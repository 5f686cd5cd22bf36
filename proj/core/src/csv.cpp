#include "fraceig/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace fraceig {

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_)
        throw std::runtime_error("cannot open output file: " + path);
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw std::logic_error("csv row width does not match the header");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

std::string CsvWriter::num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

}  // namespace fraceig
