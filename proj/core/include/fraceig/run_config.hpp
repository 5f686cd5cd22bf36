#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fraceig {

/// Malformed configuration; carries the 1-based line number when the
/// problem is tied to a specific line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                      : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

/// Batch run parameters. Parsed from a plain-text file of `key = value`
/// lines with `#` comments; every key has a default.
struct RunConfig {
    int dim = 1;
    int n = 31;                      // interior nodes per axis
    int m = 64;                      // cylinder layers
    double height = 0.0;             // cylinder height R; 0 = 8/sqrt(lambda1)
    std::string preset = "exp";      // nonlinearity id
    std::string weight = "one";      // weight id
    double tol = 1e-10;
    int max_iter = 10000;
    std::string lambda_policy = "grid";  // grid | adaptive
    int lambda_points = 20;
    double lambda_lo_frac = 1e-3;    // sweep range as fractions of lambda*
    double lambda_hi_frac = 0.95;
    double lambda_frac = 0.01;       // uniqueness-certificate lambda / lambda*
    double bracket_tol = 1e-3;       // lambda* bisection width
    std::uint64_t seed = 0;
    bool svg = false;

    void validate() const;
};

/// Parses a config file; throws ConfigError with the offending line number
/// for malformed or unknown keys.
RunConfig parse_config_file(const std::string& path);

/// Parses config text (exposed for tests).
RunConfig parse_config_text(const std::string& text);

}  // namespace fraceig
