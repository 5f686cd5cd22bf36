#include "fraceig/solve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fraceig {

namespace {

constexpr double kSClassGuard = 1.0 - 1e-8;

Eigen::VectorXd apply_f(const Nonlinearity& nl, const Eigen::VectorXd& u) {
    return u.unaryExpr([&nl](double t) { return nl.f(t); });
}

Eigen::VectorXd apply_f1(const Nonlinearity& nl, const Eigen::VectorXd& u) {
    return u.unaryExpr([&nl](double t) { return nl.f1(t); });
}

double cell_volume(const Grid& grid) { return std::pow(grid.h, grid.dim); }

/// Core monotone loop for u_{k+1} = A^{-1/2}(lambda g (f(u_k) + shift)).
/// The free residual lambda ||g (f(u_{k+1}) - f(u_k))||_inf is exactly the
/// equation residual of u_{k+1}. An optional entrywise cap (a verified
/// supersolution) is enforced when supplied.
SolveResult monotone_fixed_point(const SpectralOperator& op, const WeightField& w,
                                 const Nonlinearity& nl, double lambda,
                                 double shift, const SolveOptions& opts,
                                 const Eigen::VectorXd* start,
                                 const Eigen::VectorXd* cap) {
    const int nodes = op.grid.num_nodes();
    Eigen::VectorXd u = start ? *start : Eigen::VectorXd::Zero(nodes);
    if (u.size() != nodes)
        throw std::invalid_argument("monotone solve: start vector size mismatch");

    SolveResult out;
    if (nl.is_s() && u.maxCoeff() >= kSClassGuard) {
        out.status = SolveStatus::blow_up;
        return out;
    }

    Eigen::VectorXd fu = (apply_f(nl, u).array() + shift).matrix();
    std::vector<double> res_history;
    res_history.reserve(opts.max_iter);

    for (int k = 1; k <= opts.max_iter; ++k) {
        const Eigen::VectorXd rhs = lambda * w.values.cwiseProduct(fu);
        const Eigen::VectorXd u_next = op.a_half_inv * rhs;

        const double increase = (u_next - u).minCoeff();
        if (increase < -1e-9 * std::max(1.0, u.cwiseAbs().maxCoeff()))
            throw std::logic_error("monotone solve: iterates decreased");
        if (cap && (u_next - *cap).maxCoeff() > 1e-9)
            throw std::logic_error("monotone solve: iterate escaped the supersolution cap");

        const double sup = u_next.maxCoeff();
        if (nl.is_s() && sup >= kSClassGuard) {
            out.status = SolveStatus::blow_up;
            return out;
        }
        if (nl.is_r() && sup > opts.blow_up_sup) {
            out.status = SolveStatus::blow_up;
            return out;
        }

        const Eigen::VectorXd fu_next = (apply_f(nl, u_next).array() + shift).matrix();
        const double res =
            lambda * (w.values.cwiseProduct(fu_next - fu)).cwiseAbs().maxCoeff();
        u = u_next;
        fu = fu_next;

        if (res <= opts.tol) {
            out.status = SolveStatus::converged;
            out.point.lambda = lambda;
            out.point.u = u;
            out.point.residual = res;
            out.point.iterations = k;
            out.point.sup_u = u.size() ? u.maxCoeff() : 0.0;
            return out;
        }

        res_history.push_back(res);
        const int win = opts.stall_window;
        if (static_cast<int>(res_history.size()) > win &&
            res >= res_history[res_history.size() - 1 - win]) {
            out.status = SolveStatus::diverged;
            return out;
        }
    }
    out.status = SolveStatus::max_iterations;
    return out;
}

}  // namespace

SolveResult monotone_solve(const SpectralOperator& op, const WeightField& w,
                           const Nonlinearity& nl, double lambda,
                           const SolveOptions& opts,
                           const Eigen::VectorXd* warm_start) {
    if (lambda < 0.0)
        throw std::invalid_argument("monotone_solve: lambda must be nonnegative");
    return monotone_fixed_point(op, w, nl, lambda, 0.0, opts, warm_start, nullptr);
}

SolveResult newton_solve(const SpectralOperator& op, const WeightField& w,
                         const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u0, double tol, int max_iter) {
    const int nodes = op.grid.num_nodes();
    if (u0.size() != nodes)
        throw std::invalid_argument("newton_solve: start vector size mismatch");

    Eigen::VectorXd u = u0;
    SolveResult out;
    for (int k = 1; k <= max_iter; ++k) {
        if (nl.is_s() && u.maxCoeff() >= kSClassGuard) {
            out.status = SolveStatus::diverged;
            return out;
        }
        if (nl.is_r() && u.cwiseAbs().maxCoeff() > 2.0 * SolveOptions{}.blow_up_sup) {
            out.status = SolveStatus::diverged;
            return out;
        }

        const Eigen::VectorXd gf = w.values.cwiseProduct(apply_f(nl, u));
        const Eigen::VectorXd r = op.a_half * u - lambda * gf;
        if (r.cwiseAbs().maxCoeff() <= tol) {
            out.status = SolveStatus::converged;
            out.point.lambda = lambda;
            out.point.u = u;
            out.point.residual = r.cwiseAbs().maxCoeff();
            out.point.iterations = k - 1;
            out.point.sup_u = u.maxCoeff();
            return out;
        }

        Eigen::MatrixXd jac = op.a_half;
        jac.diagonal() -= lambda * w.values.cwiseProduct(apply_f1(nl, u));
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        const Eigen::VectorXd delta = lu.solve(-r);
        const double backward =
            (jac * delta + r).cwiseAbs().maxCoeff() /
            std::max(r.cwiseAbs().maxCoeff(), 1e-300);
        if (!delta.allFinite() || backward > 1e-6) {
            out.status = SolveStatus::singular_jacobian;
            return out;
        }
        u += delta;
    }
    out.status = SolveStatus::max_iterations;
    return out;
}

std::vector<BranchPoint> deflated_search(const SpectralOperator& op,
                                         const WeightField& w,
                                         const Nonlinearity& nl, double lambda,
                                         const std::vector<Eigen::VectorXd>& known,
                                         const DeflationOptions& opts) {
    const int nodes = op.grid.num_nodes();
    const double cell = cell_volume(op.grid);
    std::vector<Eigen::VectorXd> roots = known;
    std::vector<BranchPoint> found;

    const auto weighted_sq = [cell](const Eigen::VectorXd& d) {
        return cell * d.squaredNorm();
    };

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double amp_hi = nl.is_s() ? std::min(opts.amp_max, 0.98) : opts.amp_max;

    for (int s = 0; s < opts.starts; ++s) {
        Eigen::VectorXd u;
        if (s == 0) {
            u = Eigen::VectorXd::Zero(nodes);
        } else {
            Eigen::VectorXd shape = op.phi1 / op.phi1.maxCoeff();
            const int modes = std::min<int>(5, nodes);
            for (int k = 1; k < modes; ++k) {
                const Eigen::VectorXd phik = op.eigvecs.col(k);
                shape += 0.25 * unif(rng) * phik / phik.cwiseAbs().maxCoeff();
            }
            shape = shape.cwiseMax(0.0);
            const double sup = shape.maxCoeff();
            if (sup > 0.0) shape /= sup;
            const double amp =
                opts.amp_min * std::pow(amp_hi / opts.amp_min, unit(rng));
            u = amp * shape;
        }

        bool aborted = false;
        int iters = 0;
        for (; iters < opts.newton_max_iter; ++iters) {
            if (nl.is_s() && u.maxCoeff() >= kSClassGuard) { aborted = true; break; }
            if (nl.is_r() && u.cwiseAbs().maxCoeff() > 2.0 * SolveOptions{}.blow_up_sup) {
                aborted = true;
                break;
            }

            const Eigen::VectorXd r =
                op.a_half * u - lambda * w.values.cwiseProduct(apply_f(nl, u));
            if (r.cwiseAbs().maxCoeff() <= opts.tol) break;

            // Multiplicative shifted deflation: m = prod (1/||u-v||^2 + 1).
            double m = 1.0;
            Eigen::VectorXd grad_log_m = Eigen::VectorXd::Zero(nodes);
            bool too_close = false;
            for (const auto& v : roots) {
                const Eigen::VectorXd d = u - v;
                const double q = weighted_sq(d);
                if (q < 1e-24) { too_close = true; break; }
                const double sigma = 1.0 + 1.0 / q;
                m *= sigma;
                grad_log_m += (-2.0 * cell / (q * q)) / sigma * d;
            }
            if (too_close || !std::isfinite(m)) { aborted = true; break; }

            Eigen::MatrixXd jac = op.a_half;
            jac.diagonal() -= lambda * w.values.cwiseProduct(apply_f1(nl, u));
            Eigen::MatrixXd jac_defl = m * jac;
            jac_defl.noalias() += (m * r) * grad_log_m.transpose();

            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac_defl);
            Eigen::VectorXd delta = lu.solve(-m * r);
            if (!delta.allFinite()) { aborted = true; break; }
            const double step_cap = 5.0 * std::max(1.0, u.cwiseAbs().maxCoeff());
            const double step = delta.cwiseAbs().maxCoeff();
            if (step > step_cap) delta *= step_cap / step;
            u += delta;
        }
        if (aborted || iters >= opts.newton_max_iter) continue;

        const Eigen::VectorXd r =
            op.a_half * u - lambda * w.values.cwiseProduct(apply_f(nl, u));
        if (r.cwiseAbs().maxCoeff() > opts.tol) continue;

        bool distinct = true;
        for (const auto& v : roots) {
            if ((u - v).cwiseAbs().maxCoeff() <= opts.distinct_factor * opts.tol) {
                distinct = false;
                break;
            }
        }
        if (!distinct) continue;

        roots.push_back(u);
        BranchPoint p;
        p.lambda = lambda;
        p.u = u;
        p.residual = r.cwiseAbs().maxCoeff();
        p.iterations = iters;
        p.sup_u = u.maxCoeff();
        found.push_back(std::move(p));
    }

    std::sort(found.begin(), found.end(),
              [](const BranchPoint& a, const BranchPoint& b) {
                  return a.sup_u < b.sup_u;
              });
    return found;
}

double stability_eigenvalue(const SpectralOperator& op, const WeightField& w,
                            const Nonlinearity& nl, const BranchPoint& point) {
    Eigen::MatrixXd m = op.a_half;
    m.diagonal() -= point.lambda * w.values.cwiseProduct(apply_f1(nl, point.u));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("stability_eigenvalue: eigensolver failed");
    return solver.eigenvalues()[0];
}

LambdaStarEstimate estimate_lambda_star(const SpectralOperator& op,
                                        const WeightField& w,
                                        const Nonlinearity& nl, double tol,
                                        const SolveOptions& opts) {
    if (!(tol > 0.0))
        throw std::invalid_argument("estimate_lambda_star: tol must be positive");
    LambdaStarEstimate est;

    // Constructive lower bound: u_t = t A^{-1/2} g is a supersolution as
    // soon as t >= lambda sup f(u_t); maximize t / f(t ||psi||_inf).
    const Eigen::VectorXd psi = op.a_half_inv * w.values;
    const double psi_sup = psi.maxCoeff();
    const double cap = nl.is_s() ? (1.0 - 1e-9) / psi_sup
                                 : opts.blow_up_sup / psi_sup;
    double best_lb = 0.0;
    const int t_samples = 64;
    for (int i = 0; i < t_samples; ++i) {
        const double t =
            cap * std::pow(1e-4, 1.0 - double(i + 1) / t_samples);
        best_lb = std::max(best_lb, t / nl.f(t * psi_sup));
    }
    est.lower_bound = best_lb;

    // Closed-form style upper bound from pairing with phi1.
    if (nl.c_f.finite) {
        const double num = op.phi1.sum();
        const double den = w.values.cwiseProduct(op.phi1).sum();
        est.upper_bound =
            ExtendedReal::of(op.sqrt_lambda1() * nl.c_f.value * num / den);
    } else {
        est.upper_bound = ExtendedReal::infinity();
    }

    // Bisection on monotone-solve convergence.
    double lo = best_lb;
    SolveResult lo_result = monotone_solve(op, w, nl, lo, opts);
    while (!lo_result.ok() && lo > 1e-14) {
        lo *= 0.5;
        lo_result = monotone_solve(op, w, nl, lo, opts);
    }
    if (!lo_result.ok())
        throw std::runtime_error("estimate_lambda_star: no convergent lambda found");

    double hi = est.upper_bound.finite ? est.upper_bound.value * (1.0 + 1e-12)
                                       : std::max(2.0 * lo, 1.0);
    {
        int guard = 0;
        while (monotone_solve(op, w, nl, hi, opts).ok()) {
            hi *= 2.0;
            if (++guard > 60)
                throw std::runtime_error("estimate_lambda_star: no failing lambda found");
        }
    }

    Eigen::VectorXd warm = lo_result.point.u;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const SolveResult r = monotone_solve(op, w, nl, mid, opts, &warm);
        if (r.ok()) {
            lo = mid;
            warm = r.point.u;
        } else {
            hi = mid;
        }
    }
    est.lambda_lo = lo;
    est.lambda_hi = hi;
    return est;
}

Branch continue_branch(const SpectralOperator& op, const WeightField& w,
                       const Nonlinearity& nl, const BranchPolicy& policy,
                       const SolveOptions& opts) {
    Branch branch;

    if (policy.spacing == BranchPolicy::Spacing::grid) {
        const LambdaStarEstimate est =
            estimate_lambda_star(op, w, nl, policy.bracket_tol, opts);
        branch.lambda_lo = est.lambda_lo;
        branch.lambda_hi = est.lambda_hi;

        Eigen::VectorXd warm = Eigen::VectorXd::Zero(op.grid.num_nodes());
        for (int i = 0; i < policy.points; ++i) {
            const double frac =
                policy.points == 1
                    ? policy.hi_frac
                    : policy.lo_frac * std::pow(policy.hi_frac / policy.lo_frac,
                                                double(i) / (policy.points - 1));
            const double lambda = frac * est.lambda_lo;
            const SolveResult r = monotone_solve(op, w, nl, lambda, opts, &warm);
            if (!r.ok())
                throw std::runtime_error("continue_branch: sweep point failed below lambda*");
            BranchPoint p = r.point;
            p.mu1 = stability_eigenvalue(op, w, nl, p);
            warm = p.u;
            branch.points.push_back(std::move(p));
        }
        const SolveResult star =
            monotone_solve(op, w, nl, est.lambda_lo, opts, &warm);
        if (!star.ok())
            throw std::runtime_error("continue_branch: solve at bracket lambda_lo failed");
        branch.u_star_est = star.point.u;
    } else {
        // Adaptive march: advance while converged, halve the step on
        // failure, stop once the known-failing lambda is within tolerance.
        const Eigen::VectorXd psi = op.a_half_inv * w.values;
        double step = std::max(policy.bracket_tol * 8.0,
                               0.25 / (psi.maxCoeff() * nl.f1(0.0)));
        double lo = 0.0;
        double fail = std::numeric_limits<double>::infinity();
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(op.grid.num_nodes());
        int guard = 0;
        while (true) {
            if (++guard > 10000)
                throw std::runtime_error("continue_branch: adaptive march stalled");
            if (std::isfinite(fail) && fail - lo <= policy.bracket_tol) break;
            double trial = lo + step;
            if (trial >= fail) {
                step *= 0.5;
                continue;
            }
            const SolveResult r = monotone_solve(op, w, nl, trial, opts,
                                                 lo > 0.0 ? &warm : nullptr);
            if (r.ok()) {
                BranchPoint p = r.point;
                p.mu1 = stability_eigenvalue(op, w, nl, p);
                warm = p.u;
                lo = trial;
                branch.points.push_back(std::move(p));
                step *= 1.4;
            } else {
                fail = trial;
                step *= 0.5;
            }
        }
        branch.lambda_lo = lo;
        branch.lambda_hi = fail;
        if (branch.points.empty())
            throw std::runtime_error("continue_branch: no convergent points");
        branch.u_star_est = branch.points.back().u;
    }

    const ExtremalEstimate ext = [&] {
        ExtremalEstimate e;
        e.u_star = branch.u_star_est;
        const Eigen::VectorXd fu = apply_f(nl, e.u_star);
        const Eigen::VectorXd f1u = apply_f1(nl, e.u_star);
        e.extremal_integral = cell_volume(op.grid) *
                              w.values.cwiseProduct(fu.cwiseProduct(f1u)).sum();
        return e;
    }();
    branch.extremal_integral = ext.extremal_integral;
    return branch;
}

ExtremalEstimate extremal_estimate(const Branch& branch, const Nonlinearity& nl,
                                   const WeightField& w) {
    if (branch.points.empty() || branch.u_star_est.size() == 0)
        throw std::invalid_argument("extremal_estimate: empty branch");
    ExtremalEstimate e;
    e.u_star = branch.u_star_est;
    const Eigen::VectorXd fu = apply_f(nl, e.u_star);
    const Eigen::VectorXd f1u = apply_f1(nl, e.u_star);
    e.extremal_integral = cell_volume(w.grid) *
                          w.values.cwiseProduct(fu.cwiseProduct(f1u)).sum();
    return e;
}

EpsHalfConstruction construct_eps_half_solution(const SpectralOperator& op,
                                        const WeightField& w,
                                        const Nonlinearity& nl,
                                        const Eigen::VectorXd& tau, double eps,
                                        const SolveOptions& opts) {
    if (eps <= 0.0)
        throw std::invalid_argument("construct_eps_half_solution: eps must be positive");
    const int nodes = op.grid.num_nodes();
    if (tau.size() != nodes)
        throw std::invalid_argument("construct_eps_half_solution: tau size mismatch");
    if (tau.minCoeff() < -1e-12)
        throw std::invalid_argument("construct_eps_half_solution: tau must be nonnegative");

    const Eigen::VectorXd l = op.a_half * tau;
    const Eigen::VectorXd hyp =
        l - w.values.cwiseProduct((apply_f(nl, tau).array() + eps).matrix());
    const double hyp_slack =
        std::max(opts.tol, 1e-10) * std::max(1.0, l.cwiseAbs().maxCoeff());
    if (hyp.minCoeff() < -hyp_slack)
        throw std::invalid_argument(
            "construct_eps_half_solution: tau does not satisfy A^{1/2} tau >= g (f(tau) + eps)");

    EpsHalfConstruction out;
    const double super_slack = 1e-9 * std::max(1.0, l.cwiseAbs().maxCoeff());

    if (nl.is_s()) {
        out.mu = find_scaling_mu(nl, eps);
        const Eigen::VectorXd super = out.mu * tau;
        const Eigen::VectorXd check =
            out.mu * l -
            w.values.cwiseProduct((apply_f(nl, super).array() + 0.5 * eps).matrix());
        if (check.minCoeff() < -super_slack)
            throw std::runtime_error(
                "construct_eps_half_solution: scaled supersolution check failed");
        SolveResult r = monotone_fixed_point(op, w, nl, 1.0, 0.5 * eps, opts,
                                             nullptr, &super);
        if (!r.ok())
            throw std::runtime_error(
                "construct_eps_half_solution: monotone iteration did not converge");
        out.solution = r.point;
        return out;
    }

    if (!nl.log_convex)
        throw std::invalid_argument(
            "construct_eps_half_solution: R-class path requires a log-convex nonlinearity");

    out.mu = find_scaling_mu(nl, eps);
    const double mu = out.mu;
    const auto lift = [&](const Eigen::VectorXd& v) {
        return (op.a_half_inv *
                (mu * w.values.cwiseProduct(
                          (apply_f(nl, v).array() + eps).matrix())))
            .eval();
    };
    out.u1 = lift(tau);
    out.u2 = lift(out.u1);
    out.u3 = lift(out.u2);

    const double chain_slack = 1e-10 * std::max(1.0, tau.maxCoeff());
    if ((out.u1 - mu * tau).maxCoeff() > chain_slack)
        throw std::runtime_error("construct_eps_half_solution: chain u1 <= mu u0 failed");
    if ((out.u2 - out.u1).maxCoeff() > chain_slack)
        throw std::runtime_error("construct_eps_half_solution: chain u2 <= u1 failed");

    // Solve A^{1/2} u = mu g (f(u) + eps) below the supersolution u2.
    SolveResult inner = monotone_fixed_point(op, w, nl, mu, eps, opts,
                                             nullptr, &out.u2);
    if (!inner.ok())
        throw std::runtime_error(
            "construct_eps_half_solution: eps-problem iteration did not converge");

    const Eigen::VectorXd xi = mu * inner.point.u;
    const Eigen::VectorXd xi_check =
        op.a_half * xi -
        w.values.cwiseProduct((apply_f(nl, xi).array() + 0.5 * eps).matrix());
    if (xi_check.minCoeff() < -super_slack)
        throw std::runtime_error(
            "construct_eps_half_solution: scaled solution is not a supersolution");

    SolveResult final_result = monotone_fixed_point(op, w, nl, 1.0, 0.5 * eps,
                                                    opts, nullptr, &xi);
    if (!final_result.ok())
        throw std::runtime_error(
            "construct_eps_half_solution: final monotone iteration did not converge");
    out.solution = final_result.point;
    return out;
}

EnergyEstimate energy_estimate_check(const BranchPoint& point,
                                     const Nonlinearity& nl,
                                     const WeightField& w) {
    EnergyEstimate e;
    const double cell = cell_volume(w.grid);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < point.u.size(); ++i) {
        const double u = point.u[i];
        const double g = w.values[i];
        const double fu = nl.f(u);
        lhs += g * fu * big_h(nl, u);
        rhs += g * fu * nl.f1(u);
    }
    e.lhs = cell * lhs;
    e.rhs = cell * rhs;
    e.holds = e.lhs <= e.rhs * (1.0 + 1e-6);
    return e;
}

}  // namespace fraceig
