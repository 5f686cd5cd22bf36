// Acceptance suite runner: one pass/fail line per criterion, nonzero exit
// on any failure. Usage: fraceig_acceptance [out_dir] [seed]
#include <cstdio>
#include <cstdlib>
#include <string>

#include "fraceig/selftest.hpp"

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "acceptance_out";
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0;

    const auto results = fraceig::run_selftest(out_dir, seed);
    double total = 0.0;
    for (const auto& r : results) {
        std::printf("%s criterion %d (%s): %s [%.1f s]\n",
                    r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str(), r.seconds);
        total += r.seconds;
    }
    std::printf("total %.1f s\n", total);
    return fraceig::all_passed(results) ? 0 : 1;
}
