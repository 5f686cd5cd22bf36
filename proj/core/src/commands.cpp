#include "fraceig/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "fraceig/csv.hpp"
#include "fraceig/cylinder.hpp"
#include "fraceig/selftest.hpp"
#include "fraceig/solve.hpp"
#include "fraceig/svg.hpp"
#include "fraceig/verify.hpp"

namespace fraceig {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& file) {
    return (fs::path(dir) / file).string();
}

struct Problem {
    Grid grid;
    SpectralOperator op;
    WeightField w;
    Nonlinearity nl;
    double height = 0.0;  // resolved cylinder height
};

Problem make_problem(const RunConfig& cfg) {
    Problem p;
    p.grid = build_grid(cfg.dim, cfg.n);
    p.op = build_operator(p.grid);
    p.w = build_weight(cfg.weight, p.grid);
    p.nl = make_preset(cfg.preset);
    p.height = cfg.height > 0.0 ? cfg.height : 8.0 / p.op.sqrt_lambda1();
    return p;
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions o;
    o.tol = cfg.tol;
    o.max_iter = cfg.max_iter;
    return o;
}

void append_row(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::string>& cells) {
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    const auto write = [&out](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    };
    if (fresh) write(header);
    write(cells);
}

int cmd_branch(const RunConfig& cfg, const std::string& out_dir,
               std::ostream& log) {
    const std::vector<std::string> header = {"lambda", "sup_u", "mu1",
                                             "iterations", "residual"};
    if (cfg.lambda_policy == "grid" && cfg.lambda_points == 0) {
        CsvWriter csv(join_path(out_dir, "branch.csv"), header);
        log << "branch: empty lambda grid, header-only csv written\n";
        return kExitOk;
    }

    const Problem p = make_problem(cfg);
    BranchPolicy policy;
    policy.spacing = cfg.lambda_policy == "grid" ? BranchPolicy::Spacing::grid
                                                 : BranchPolicy::Spacing::adaptive;
    policy.points = cfg.lambda_points;
    policy.lo_frac = cfg.lambda_lo_frac;
    policy.hi_frac = cfg.lambda_hi_frac;
    policy.bracket_tol = cfg.bracket_tol;
    const Branch branch = continue_branch(p.op, p.w, p.nl, policy, solve_options(cfg));

    CsvWriter csv(join_path(out_dir, "branch.csv"), header);
    std::vector<double> xs, ys;
    for (const auto& pt : branch.points) {
        csv.row({CsvWriter::num(pt.lambda), CsvWriter::num(pt.sup_u),
                 CsvWriter::num(pt.mu1), CsvWriter::num(pt.iterations),
                 CsvWriter::num(pt.residual)});
        xs.push_back(pt.lambda);
        ys.push_back(pt.sup_u);
    }
    if (cfg.svg)
        write_svg_polyline(join_path(out_dir, "branch.svg"), xs, ys, "lambda",
                           "sup u");
    log << "branch: " << branch.points.size() << " points, lambda* bracket ["
        << branch.lambda_lo << ", " << branch.lambda_hi << "]\n";
    return kExitOk;
}

int cmd_lambda_star(const RunConfig& cfg, const std::string& out_dir,
                    std::ostream& log) {
    const Problem p = make_problem(cfg);
    const LambdaStarEstimate est =
        estimate_lambda_star(p.op, p.w, p.nl, cfg.bracket_tol, solve_options(cfg));
    log << "lambda* bracket [" << est.lambda_lo << ", " << est.lambda_hi
        << "], width " << est.lambda_hi - est.lambda_lo << "\n"
        << "upper bound "
        << (est.upper_bound.finite ? std::to_string(est.upper_bound.value)
                                   : std::string("unavailable (C_f = inf)"))
        << ", lower bound " << est.lower_bound << "\n";
    append_row(join_path(out_dir, "summary.csv"),
               {"preset", "weight", "dim", "n", "lambda_lo", "lambda_hi",
                "upper_bound", "lower_bound"},
               {cfg.preset, cfg.weight, CsvWriter::num(cfg.dim),
                CsvWriter::num(cfg.n), CsvWriter::num(est.lambda_lo),
                CsvWriter::num(est.lambda_hi),
                est.upper_bound.finite ? CsvWriter::num(est.upper_bound.value)
                                       : "inf",
                CsvWriter::num(est.lower_bound)});
    return kExitOk;
}

int cmd_extremal(const RunConfig& cfg, const std::string& out_dir,
                 std::ostream& log) {
    const Problem p = make_problem(cfg);
    BranchPolicy policy;
    policy.spacing = BranchPolicy::Spacing::grid;
    policy.points = std::max(cfg.lambda_points, 1);
    policy.lo_frac = cfg.lambda_lo_frac;
    policy.hi_frac = cfg.lambda_hi_frac;
    policy.bracket_tol = cfg.bracket_tol;
    const Branch branch = continue_branch(p.op, p.w, p.nl, policy, solve_options(cfg));
    const ExtremalEstimate ext = extremal_estimate(branch, p.nl, p.w);

    const bool two_d = cfg.dim == 2;
    std::vector<std::string> header =
        two_d ? std::vector<std::string>{"x1", "x2", "u_star", "integrand"}
              : std::vector<std::string>{"x", "u_star", "integrand"};
    CsvWriter csv(join_path(out_dir, "u_star.csv"), header);
    for (int i = 0; i < p.grid.num_nodes(); ++i) {
        const auto x = p.grid.coord(i);
        const double integrand =
            p.w.values[i] * p.nl.f1(ext.u_star[i]) * p.nl.f(ext.u_star[i]);
        if (two_d)
            csv.row({CsvWriter::num(x[0]), CsvWriter::num(x[1]),
                     CsvWriter::num(ext.u_star[i]), CsvWriter::num(integrand)});
        else
            csv.row({CsvWriter::num(x[0]), CsvWriter::num(ext.u_star[i]),
                     CsvWriter::num(integrand)});
    }
    log << "extremal: lambda* bracket [" << branch.lambda_lo << ", "
        << branch.lambda_hi << "], sup u* " << ext.u_star.maxCoeff()
        << ", extremal_integral " << ext.extremal_integral << "\n";
    return kExitOk;
}

int cmd_uniqueness(const RunConfig& cfg, const std::string& out_dir,
                   std::ostream& log) {
    const Problem p = make_problem(cfg);
    const SolveOptions opts = solve_options(cfg);
    const LambdaStarEstimate est =
        estimate_lambda_star(p.op, p.w, p.nl, cfg.bracket_tol, opts);
    const double lambda = cfg.lambda_frac * est.lambda_lo;
    const SolveResult r = monotone_solve(p.op, p.w, p.nl, lambda, opts);
    if (!r.ok()) throw std::runtime_error("uniqueness: minimal solve failed");
    BranchPoint point = r.point;
    point.mu1 = stability_eigenvalue(p.op, p.w, p.nl, point);

    CertificateOptions copts;
    copts.seed = cfg.seed;
    copts.solve_tol = cfg.tol;
    const UniquenessReport rep =
        uniqueness_certificate(point, p.nl, p.w, p.op, copts);

    // Human-readable key = value block.
    log << "lambda = " << rep.lambda << "\n"
        << "gamma = " << rep.gamma << "\n"
        << "alpha = " << rep.alpha << "\n"
        << "theta = " << rep.theta << "\n"
        << "trace_c = " << rep.trace_c << "\n"
        << "big_c = " << rep.big_c << "\n"
        << "eps_lambda = " << rep.eps_lambda << "\n"
        << "tau0 = " << rep.tau0 << "\n"
        << "tau1 = " << rep.tau1 << "\n"
        << "min_s = " << rep.min_s << "\n"
        << "min_t = " << rep.min_t << "\n"
        << "condition_ok = " << (rep.condition_ok ? "true" : "false") << "\n"
        << "certified = " << (rep.certified ? "true" : "false") << "\n"
        << "reason = " << (rep.reason.empty() ? "-" : rep.reason) << "\n"
        << "deflated_found = " << rep.deflated_found << "\n"
        << "deflated_max_dev = " << rep.deflated_max_dev << "\n"
        << "deflated_agrees = " << (rep.deflated_agrees ? "true" : "false")
        << "\n";

    CsvWriter csv(join_path(out_dir, "report.csv"),
                  {"lambda", "gamma", "alpha", "theta", "trace_c", "big_c",
                   "eps_lambda", "tau0", "tau1", "min_s", "min_t",
                   "condition_ok", "certified", "reason", "deflated_found",
                   "deflated_max_dev"});
    csv.row({CsvWriter::num(rep.lambda), CsvWriter::num(rep.gamma),
             CsvWriter::num(rep.alpha), CsvWriter::num(rep.theta),
             CsvWriter::num(rep.trace_c), CsvWriter::num(rep.big_c),
             CsvWriter::num(rep.eps_lambda), CsvWriter::num(rep.tau0),
             CsvWriter::num(rep.tau1), CsvWriter::num(rep.min_s),
             CsvWriter::num(rep.min_t), rep.condition_ok ? "1" : "0",
             rep.certified ? "1" : "0", rep.reason,
             CsvWriter::num(rep.deflated_found),
             CsvWriter::num(rep.deflated_max_dev)});
    return kExitOk;
}

int cmd_identities(const RunConfig& cfg, const std::string& out_dir,
                   std::ostream& log) {
    if (cfg.dim != 2)
        throw ConfigError("identities requires dim = 2");
    const Problem p = make_problem(cfg);

    CsvWriter pcsv(join_path(out_dir, "pohozaev.csv"),
                   {"level", "n", "m", "R", "lateral", "bottom", "bulk", "top",
                    "residual", "max_abs_term"});
    const int levels[2][2] = {{cfg.n, cfg.m}, {2 * cfg.n + 1, 2 * cfg.m}};
    for (int s = 0; s < 2; ++s) {
        const Grid grid = build_grid(2, levels[s][0]);
        const SpectralOperator op = s == 0 ? p.op : build_operator(grid);
        const double height = cfg.height > 0.0 ? cfg.height : 6.0 / op.sqrt_lambda1();
        const CylinderField field =
            extend_harmonic(grid, op.phi1, height, levels[s][1]);
        const PohozaevTerms terms = pohozaev_residual(grid, field, height);
        pcsv.row({CsvWriter::num(s), CsvWriter::num(levels[s][0]),
                  CsvWriter::num(levels[s][1]), CsvWriter::num(height),
                  CsvWriter::num(terms.lateral), CsvWriter::num(terms.bottom),
                  CsvWriter::num(terms.bulk), CsvWriter::num(terms.top),
                  CsvWriter::num(terms.residual),
                  CsvWriter::num(terms.max_abs_term)});
        log << "pohozaev level " << s << ": residual " << terms.residual
            << " (max term " << terms.max_abs_term << ")\n";
    }

    // Trace constant vs cylinder energy, and E(R) decay.
    const double sq = p.op.sqrt_lambda1();
    const double total_height = 8.0 / sq;
    const CylinderField tall =
        extend_harmonic(p.grid, p.op.phi1, total_height, std::max(cfg.m, 128));
    CsvWriter tcsv(join_path(out_dir, "trace.csv"),
                   {"n", "trace_c", "cylinder_energy", "l2_sq", "ratio"});
    const double energy = cylinder_dirichlet_energy(tall);
    const double l2_sq =
        std::pow(p.grid.h, p.grid.dim) * p.op.phi1.squaredNorm();
    tcsv.row({CsvWriter::num(cfg.n), CsvWriter::num(trace_constant(p.op)),
              CsvWriter::num(energy), CsvWriter::num(l2_sq),
              CsvWriter::num(energy / l2_sq)});

    CsvWriter ecsv(join_path(out_dir, "er_decay.csv"), {"R", "E"});
    for (int j = 0; j <= 8; ++j) {
        const double target = (2.0 + 0.5 * j) / sq;
        const int layer = static_cast<int>(std::llround(target / tall.hy));
        ecsv.row({CsvWriter::num(layer * tall.hy),
                  CsvWriter::num(boundary_energy(tall, layer * tall.hy))});
    }
    return kExitOk;
}

int cmd_props(const RunConfig& cfg, const std::string& out_dir,
              std::ostream& log) {
    const Nonlinearity nl = make_preset(cfg.preset);
    CsvWriter csv(join_path(out_dir, "props.csv"),
                  {"check", "preset", "result", "min_residual", "status"});

    const auto gated = [&](const std::string& name, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            const std::string status = nl.is_r() && !nl.log_convex
                                           ? "refused: not log-convex"
                                           : std::string("refused: ") + e.what();
            csv.row({name, cfg.preset, "", "", status});
            log << name << ": " << status << "\n";
        }
    };

    gated("shift_k(lam=0.5,delta=1)", [&] {
        const double k = find_shift_k(nl, 0.5, 1.0);
        double min_res = 1e300;
        for (int i = 0; i <= 10000; ++i) {
            const double t = i == 0 ? 0.0 : 1e-6 * std::pow(40.0 / 1e-6, (i - 1) / 9999.0);
            min_res = std::min(min_res, nl.f(t / 0.5) + k - 2.0 * nl.f(t));
        }
        csv.row({"shift_k(lam=0.5,delta=1)", cfg.preset, CsvWriter::num(k),
                 CsvWriter::num(min_res), "ok"});
        log << "shift_k(0.5,1) = " << k << "\n";
    });
    gated("shift_k(lam=0.5,delta=3)", [&] {
        const double k = find_shift_k(nl, 0.5, 3.0);
        csv.row({"shift_k(lam=0.5,delta=3)", cfg.preset, CsvWriter::num(k), "",
                 "ok"});
        log << "shift_k(0.5,3) = " << k << "\n";
    });
    gated("scaling_mu(eps=0.5)", [&] {
        const double mu = find_scaling_mu(nl, 0.5);
        const double scale = nl.is_s() ? mu : mu * mu;
        double min_res = 1e300;
        if (nl.is_s()) {
            for (int i = 0; i <= 10000; ++i) {
                const double t = mu * double(i) / 10000.0;
                min_res = std::min(min_res,
                                   scale * (nl.f(std::min(t / mu, 1.0 - 1e-15)) + 0.5) -
                                       nl.f(t) - 0.25);
            }
        } else {
            for (int i = 0; i <= 10000; ++i) {
                const double t = i == 0 ? 0.0 : 1e-6 * std::pow(40.0 / 1e-6, (i - 1) / 9999.0);
                min_res = std::min(min_res, scale * (nl.f(t / mu) + 0.5) - nl.f(t) - 0.25);
            }
        }
        csv.row({"scaling_mu(eps=0.5)", cfg.preset, CsvWriter::num(mu),
                 CsvWriter::num(min_res), "ok"});
        log << "scaling_mu(0.5) = " << mu << "\n";
    });

    {
        const CriticalityResult crit = criticality_ratio(nl, 1e4, 10000);
        const char* trend = crit.tail_trend == TailTrend::decreasing ? "decreasing"
                            : crit.tail_trend == TailTrend::increasing ? "increasing"
                                                                        : "flat";
        csv.row({"criticality_ratio", cfg.preset, CsvWriter::num(crit.alpha_est),
                 "", trend});
        log << "criticality alpha_est = " << crit.alpha_est << " (" << trend
            << ")\n";
    }
    {
        const ExtendedReal cf = cf_constant(nl);
        csv.row({"cf_constant", cfg.preset,
                 cf.finite ? CsvWriter::num(cf.value) : "inf", "", "ok"});
        log << "C_f = " << (cf.finite ? std::to_string(cf.value) : "inf") << "\n";
    }
    return kExitOk;
}

int cmd_selftest(const RunConfig& cfg, const std::string& out_dir,
                 std::ostream& log) {
    const auto results = run_selftest(out_dir, cfg.seed);
    for (const auto& r : results)
        log << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " ("
            << r.name << "): " << r.detail << " [" << r.seconds << " s]\n";
    return all_passed(results) ? kExitOk : kExitSelftestFailure;
}

}  // namespace

int run_command(const std::string& subcommand, const RunConfig& cfg,
                const std::string& out_dir, std::ostream& log) {
    try {
        cfg.validate();
        std::filesystem::create_directories(out_dir);
        if (subcommand == "branch") return cmd_branch(cfg, out_dir, log);
        if (subcommand == "lambda-star") return cmd_lambda_star(cfg, out_dir, log);
        if (subcommand == "extremal") return cmd_extremal(cfg, out_dir, log);
        if (subcommand == "uniqueness") return cmd_uniqueness(cfg, out_dir, log);
        if (subcommand == "identities") return cmd_identities(cfg, out_dir, log);
        if (subcommand == "props") return cmd_props(cfg, out_dir, log);
        if (subcommand == "selftest") return cmd_selftest(cfg, out_dir, log);
        log << "unknown subcommand: " << subcommand << "\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    }
}

}  // namespace fraceig
