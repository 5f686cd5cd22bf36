#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "fraceig/commands.hpp"
#include "fraceig/run_config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fraceig: minimal branches, extremal parameters, and"
                 " uniqueness certificates for (-Delta)^{1/2} u = lambda g f(u)"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    long long seed = -1;

    const std::vector<std::pair<std::string, std::string>> names = {
        {"branch", "sweep the minimal branch, write branch.csv (+ optional svg)"},
        {"lambda-star", "bracket the extremal parameter, append summary.csv"},
        {"extremal", "extremal solution estimate, write u_star.csv"},
        {"uniqueness", "small-lambda uniqueness certificate, write report.csv"},
        {"identities", "cylinder identity, trace constant, E(R) decay tables"},
        {"props", "scalar inequality verification table (props.csv)"},
        {"selftest", "run the acceptance suite (nonzero exit on failure)"},
    };
    for (const auto& [name, description] : names) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "path to a key = value config file");
        sub->add_option("--out", out_dir, "output directory (default .)");
        sub->add_option("--seed", seed, "seed override for randomized searches");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string subcommand = app.get_subcommands().front()->get_name();

    fraceig::RunConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = fraceig::parse_config_file(config_path);
        } catch (const fraceig::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return fraceig::kExitConfigError;
        }
    }
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

    return fraceig::run_command(subcommand, cfg, out_dir, std::cout);
}
