#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fraceig {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the acceptance suite: nine numerical criteria plus a determinism
/// criterion that re-runs the CSV-producing pipeline with the same seed
/// and byte-compares every CSV. Artifacts are written under out_dir.
std::vector<CriterionResult> run_selftest(const std::string& out_dir,
                                          std::uint64_t seed);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace fraceig
