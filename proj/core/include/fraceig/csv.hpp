#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fraceig {

/// RFC-4180-style CSV: comma separated, "\n" line ends, a fixed header
/// row, floats rendered with 17 significant digits so identical runs
/// produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);

    static std::string num(double v);
    static std::string num(int v);

private:
    std::ofstream out_;
    size_t columns_ = 0;
};

}  // namespace fraceig
