#include "fraceig/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fraceig {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& v, int line) {
    size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'", line);
    }
    if (pos != v.size())
        throw ConfigError("trailing characters after number '" + v + "'", line);
    return x;
}

int parse_int(const std::string& v, int line) {
    const double x = parse_double(v, line);
    const int i = static_cast<int>(x);
    if (double(i) != x)
        throw ConfigError("expected an integer, got '" + v + "'", line);
    return i;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected a boolean, got '" + v + "'", line);
}

}  // namespace

void RunConfig::validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
    if (n < 2) throw ConfigError("n must be at least 2");
    if (m < 8) throw ConfigError("m must be at least 8");
    if (height < 0.0) throw ConfigError("R must be nonnegative (0 = auto)");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iter <= 0) throw ConfigError("max_iter must be positive");
    if (lambda_policy != "grid" && lambda_policy != "adaptive")
        throw ConfigError("lambda_policy must be 'grid' or 'adaptive'");
    if (lambda_points < 0) throw ConfigError("lambda_points must be nonnegative");
    if (!(lambda_lo_frac > 0.0) || !(lambda_hi_frac > 0.0) ||
        lambda_lo_frac > lambda_hi_frac || lambda_hi_frac >= 1.0)
        throw ConfigError("lambda fractions must satisfy 0 < lo <= hi < 1");
    if (!(lambda_frac > 0.0 && lambda_frac < 1.0))
        throw ConfigError("lambda_frac must lie in (0,1)");
    if (!(bracket_tol > 0.0)) throw ConfigError("bracket_tol must be positive");
    // Preset and weight ids are validated on construction by make_preset
    // and build_weight; here we only reject the obviously empty.
    if (preset.empty()) throw ConfigError("preset must be set");
    if (weight.empty()) throw ConfigError("weight must be set");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);

        if (key == "dim") cfg.dim = parse_int(value, line_no);
        else if (key == "n") cfg.n = parse_int(value, line_no);
        else if (key == "m") cfg.m = parse_int(value, line_no);
        else if (key == "R") cfg.height = parse_double(value, line_no);
        else if (key == "preset") cfg.preset = value;
        else if (key == "weight") cfg.weight = value;
        else if (key == "tol") cfg.tol = parse_double(value, line_no);
        else if (key == "max_iter") cfg.max_iter = parse_int(value, line_no);
        else if (key == "lambda_policy") cfg.lambda_policy = value;
        else if (key == "lambda_points") cfg.lambda_points = parse_int(value, line_no);
        else if (key == "lambda_lo_frac") cfg.lambda_lo_frac = parse_double(value, line_no);
        else if (key == "lambda_hi_frac") cfg.lambda_hi_frac = parse_double(value, line_no);
        else if (key == "lambda_frac") cfg.lambda_frac = parse_double(value, line_no);
        else if (key == "bracket_tol") cfg.bracket_tol = parse_double(value, line_no);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_double(value, line_no));
        else if (key == "svg") cfg.svg = parse_bool(value, line_no);
        else throw ConfigError("unknown key '" + key + "'", line_no);
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace fraceig
