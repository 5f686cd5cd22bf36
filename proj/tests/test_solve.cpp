#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fraceig/solve.hpp"

using namespace fraceig;

namespace {

struct Setup {
    Grid grid;
    SpectralOperator op;
    WeightField w;
};

const Setup& exp_setup() {
    static const Setup s = [] {
        Setup t{build_grid(1, 31), {}, {}};
        t.op = build_operator(t.grid);
        t.w = build_weight("one", t.grid);
        return t;
    }();
    return s;
}

BranchPolicy sweep_policy() {
    BranchPolicy p;
    p.points = 20;
    p.lo_frac = 1e-3;
    p.hi_frac = 0.95;
    p.bracket_tol = 1e-3;
    return p;
}

}  // namespace

TEST_CASE("monotone_solve: lambda = 0 finishes immediately at zero") {
    const auto& s = exp_setup();
    const SolveResult r = monotone_solve(s.op, s.w, make_preset("exp"), 0.0);
    REQUIRE(r.ok());
    CHECK(r.point.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.point.iterations == 1);
    CHECK_THROWS_AS(monotone_solve(s.op, s.w, make_preset("exp"), -0.1),
                    std::invalid_argument);
}

TEST_CASE("monotone_solve: iterates are nondecreasing and converge") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");
    const double ub = s.op.sqrt_lambda1();  // C_f = 1, g = 1
    const double lambda = 0.1 * ub;

    const SolveResult r = monotone_solve(s.op, s.w, nl, lambda);
    REQUIRE(r.ok());
    CHECK(r.point.residual <= 1e-10);
    const Eigen::VectorXd residual =
        s.op.a_half * r.point.u -
        lambda * r.point.u.unaryExpr([&](double t) { return nl.f(t); });
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9);

    // Re-run the iteration by hand and check entrywise monotonicity.
    Eigen::VectorXd u = Eigen::VectorXd::Zero(31);
    for (int k = 0; k < 60; ++k) {
        const Eigen::VectorXd next = half_solve(
            s.op, lambda * u.unaryExpr([&](double t) { return nl.f(t); }));
        CHECK((next - u).minCoeff() >= -1e-14);
        u = next;
    }
    CHECK((r.point.u - u).minCoeff() >= -1e-9);
}

TEST_CASE("monotone_solve: no convergence beyond the phi1 pairing bound") {
    const auto& s = exp_setup();
    // lambda sum(g phi) <= sqrt(lambda1) C_f sum(phi): with g = 1, exp the
    // bound is sqrt(lambda1) itself.
    const SolveResult r =
        monotone_solve(s.op, s.w, make_preset("exp"), 1.05 * s.op.sqrt_lambda1());
    CHECK_FALSE(r.ok());
}

TEST_CASE("newton_solve: polishing and the linear case") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");
    const double lambda = 0.5;

    const SolveResult m = monotone_solve(s.op, s.w, nl, lambda, {.tol = 1e-6});
    REQUIRE(m.ok());
    const SolveResult n = newton_solve(s.op, s.w, nl, lambda, m.point.u, 1e-12);
    REQUIRE(n.ok());
    CHECK(n.point.iterations <= 3);
    CHECK(n.point.residual <= 1e-12);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd u0(31);
    for (int i = 0; i < 31; ++i) u0[i] = normal(rng);
    const SolveResult lin = newton_solve(s.op, s.w, nl, 0.0, u0, 1e-12);
    REQUIRE(lin.ok());
    CHECK(lin.point.u.cwiseAbs().maxCoeff() <= 1e-10);

    CHECK_THROWS_AS(newton_solve(s.op, s.w, nl, 0.5, Eigen::VectorXd::Zero(4), 1e-10),
                    std::invalid_argument);
}

TEST_CASE("stability_eigenvalue: small-lambda limit is sqrt(lambda1)") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");
    const SolveResult r = monotone_solve(s.op, s.w, nl, 1e-3);
    REQUIRE(r.ok());
    const double mu1 = stability_eigenvalue(s.op, s.w, nl, r.point);
    CHECK(std::abs(mu1 - s.op.sqrt_lambda1()) <= 0.02 * s.op.sqrt_lambda1());
}

TEST_CASE("estimate_lambda_star: bracket, bounds, and the exact exp/one bound") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");
    const LambdaStarEstimate est = estimate_lambda_star(s.op, s.w, nl, 1e-3);
    CHECK(est.lambda_lo > 0.0);
    CHECK(est.lambda_hi - est.lambda_lo <= 1e-3 * (1.0 + 1e-9));
    REQUIRE(est.upper_bound.finite);
    // g = 1 and C_f = 1 make the phi-sums cancel exactly.
    CHECK(est.upper_bound.value ==
          doctest::Approx(s.op.sqrt_lambda1()).epsilon(1e-12));
    CHECK(est.lambda_hi <= est.upper_bound.value + 1e-3);
    CHECK(est.lower_bound > 0.0);
    CHECK(est.lower_bound <= est.lambda_lo * (1.0 + 1e-9));
    // The lower bound admits a converged minimal solution.
    CHECK(monotone_solve(s.op, s.w, nl, est.lower_bound).ok());
}

TEST_CASE("estimate_lambda_star: infinite C_f still brackets (loglin)") {
    const Grid grid = build_grid(1, 15);
    const SpectralOperator op = build_operator(grid);
    const WeightField w = build_weight("one", grid);
    SolveOptions opts;
    opts.max_iter = 4000;
    const LambdaStarEstimate est =
        estimate_lambda_star(op, w, make_preset("loglin"), 1e-2, opts);
    CHECK_FALSE(est.upper_bound.finite);
    CHECK(est.lambda_lo > 0.0);
    CHECK(est.lambda_hi - est.lambda_lo <= 1e-2 * (1.0 + 1e-9));
}

TEST_CASE("continue_branch: monotone, semi-stable, small-lambda limits") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");
    const Branch branch = continue_branch(s.op, s.w, nl, sweep_policy());
    REQUIRE(branch.points.size() == 20);

    for (size_t i = 0; i + 1 < branch.points.size(); ++i) {
        CHECK(branch.points[i].lambda < branch.points[i + 1].lambda);
        CHECK((branch.points[i + 1].u - branch.points[i].u).minCoeff() >= -1e-12);
        CHECK(branch.points[i + 1].mu1 <= branch.points[i].mu1 + 1e-10);
    }
    for (const auto& p : branch.points) CHECK(p.mu1 >= -1e-8);

    // First point: sup u <= lambda f(sup u) max(A^{-1/2} g).
    const BranchPoint& first = branch.points.front();
    const double psi_sup = (s.op.a_half_inv * s.w.values).maxCoeff();
    CHECK(first.sup_u <=
          first.lambda * nl.f(first.sup_u) * psi_sup * (1.0 + 1e-9));

    // u* dominates every branch point.
    for (const auto& p : branch.points)
        CHECK((branch.u_star_est - p.u).minCoeff() >= -1e-12);
}

TEST_CASE("continue_branch: adaptive march reaches a tight bracket") {
    const auto& s = exp_setup();
    BranchPolicy policy;
    policy.spacing = BranchPolicy::Spacing::adaptive;
    policy.bracket_tol = 1e-3;
    const Branch branch = continue_branch(s.op, s.w, make_preset("exp"), policy);
    CHECK(branch.lambda_hi - branch.lambda_lo <= 1e-3 * (1.0 + 1e-9));
    CHECK(branch.points.size() >= 5);
    CHECK(branch.points.back().lambda == doctest::Approx(branch.lambda_lo));
}

TEST_CASE("continue_branch: S-class sup grows toward the endpoint") {
    const auto& s = exp_setup();
    const Branch branch = continue_branch(s.op, s.w, make_preset("mems2"), sweep_policy());
    for (size_t i = 0; i + 1 < branch.points.size(); ++i)
        CHECK(branch.points[i].sup_u <= branch.points[i + 1].sup_u);
    CHECK(branch.points.back().sup_u < 1.0);
    CHECK(branch.u_star_est.maxCoeff() < 1.0);
}

TEST_CASE("extremal_estimate: refinement stability of the integral") {
    const Nonlinearity nl = make_preset("exp");
    const auto run = [&](int n) {
        const Grid grid = build_grid(1, n);
        const SpectralOperator op = build_operator(grid);
        const WeightField w = build_weight("one", grid);
        const Branch b = continue_branch(op, w, nl, sweep_policy());
        return extremal_estimate(b, nl, w).extremal_integral;
    };
    const double i31 = run(31), i63 = run(63);
    CHECK(std::abs(i63 - i31) <= 0.2 * std::abs(i31));

    Branch empty;
    CHECK_THROWS_AS(extremal_estimate(empty, nl, exp_setup().w),
                    std::invalid_argument);
}

TEST_CASE("deflated_search: finds the minimal solution; extras sit above it") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");
    const LambdaStarEstimate est = estimate_lambda_star(s.op, s.w, nl, 1e-3);
    const double lambda = 0.05 * est.lambda_lo;
    const SolveResult minimal = monotone_solve(s.op, s.w, nl, lambda);
    REQUIRE(minimal.ok());

    DeflationOptions opts;
    opts.seed = 42;
    const auto found = deflated_search(s.op, s.w, nl, lambda, {}, opts);
    REQUIRE(!found.empty());
    // The first (smallest-sup) solution is the minimal one.
    CHECK((found.front().u - minimal.point.u).cwiseAbs().maxCoeff() <= 1e-8);
    for (const auto& p : found) {
        CHECK(p.residual <= opts.tol);
        CHECK((p.u - minimal.point.u).minCoeff() >= -1e-10);
    }

    // Above the bracket nothing converges.
    const auto none = deflated_search(s.op, s.w, nl, 1.2 * est.lambda_hi, {}, opts);
    CHECK(none.empty());
}

TEST_CASE("deflated_search: known solutions are excluded by deflation") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");
    const double lambda = 0.05;
    const SolveResult minimal = monotone_solve(s.op, s.w, nl, lambda);
    REQUIRE(minimal.ok());
    DeflationOptions opts;
    opts.seed = 5;
    opts.starts = 10;
    const auto found =
        deflated_search(s.op, s.w, nl, lambda, {minimal.point.u}, opts);
    for (const auto& p : found)
        CHECK((p.u - minimal.point.u).cwiseAbs().maxCoeff() > 10.0 * opts.tol);
}

TEST_CASE("construct_eps_half_solution: S-class and R-class paths") {
    const Grid grid = build_grid(1, 31);
    const SpectralOperator op = build_operator(grid);
    const WeightField w =
        weight_from_function(grid, [](double, double) { return 0.1; });
    const Eigen::VectorXd psi = op.a_half_inv * w.values;
    const double psi_sup = psi.maxCoeff();
    SolveOptions opts;
    opts.tol = 1e-9;

    SUBCASE("S-class (mems2)") {
        const Nonlinearity nl = make_preset("mems2");
        const double eps = 1.0;
        double t = 0.0;
        for (t = 0.05; t < 5.0; t *= 1.05)
            if (t >= nl.f(t * psi_sup) + eps + 1e-9) break;
        const Eigen::VectorXd tau = t * psi;
        const EpsHalfConstruction lc = construct_eps_half_solution(op, w, nl, tau, eps, opts);
        CHECK(lc.solution.residual <= 1e-8);
        CHECK((lc.solution.u - tau).maxCoeff() <= 1e-10);
        CHECK(lc.solution.u.minCoeff() >= 0.0);
        CHECK(lc.u1.size() == 0);  // no chain on the S path
        // Verify the solved equation directly.
        const Eigen::VectorXd res =
            op.a_half * lc.solution.u -
            w.values.cwiseProduct(
                (lc.solution.u.unaryExpr([&](double v) { return nl.f(v); }).array() +
                 0.5 * eps)
                    .matrix());
        CHECK(res.cwiseAbs().maxCoeff() <= 1e-8);
    }

    SUBCASE("R-class (exp) with the three-lift chain") {
        const Nonlinearity nl = make_preset("exp");
        const double eps = 0.5;
        double t = 0.0;
        for (t = 0.05; t < 5.0; t *= 1.05)
            if (t >= nl.f(t * psi_sup) + eps + 1e-9) break;
        const Eigen::VectorXd tau = t * psi;
        const EpsHalfConstruction lc = construct_eps_half_solution(op, w, nl, tau, eps, opts);
        CHECK(lc.solution.residual <= 1e-8);
        CHECK((lc.solution.u - tau).maxCoeff() <= 1e-10);
        REQUIRE(lc.u1.size() == 31);
        CHECK((lc.u1 - lc.mu * tau).maxCoeff() <= 1e-10);
        CHECK((lc.u2 - lc.u1).maxCoeff() <= 1e-10);
    }

    SUBCASE("gates") {
        const Nonlinearity nl = make_preset("exp");
        CHECK_THROWS_AS(
            construct_eps_half_solution(op, w, nl, Eigen::VectorXd::Zero(31), 0.0, opts),
            std::invalid_argument);
        // tau = 0 violates the hypothesis for eps > 0.
        CHECK_THROWS_AS(
            construct_eps_half_solution(op, w, nl, Eigen::VectorXd::Zero(31), 0.5, opts),
            std::invalid_argument);
        CHECK_THROWS_AS(
            construct_eps_half_solution(op, w, make_preset("power(3)"),
                                  Eigen::VectorXd::Zero(31), 0.5, opts),
            std::invalid_argument);
    }
}

TEST_CASE("energy_estimate_check: zero point and branch sweeps") {
    const auto& s = exp_setup();
    const Nonlinearity nl = make_preset("exp");

    BranchPoint zero;
    zero.lambda = 0.0;
    zero.u = Eigen::VectorXd::Zero(31);
    const EnergyEstimate e0 = energy_estimate_check(zero, nl, s.w);
    CHECK(e0.lhs == 0.0);
    // rhs = h sum g f(0) f'(0) = h sum g for exp.
    CHECK(e0.rhs == doctest::Approx(s.grid.h * s.w.values.sum()).epsilon(1e-12));
    CHECK(e0.holds);

    for (const char* id : {"exp", "mems2"}) {
        const Nonlinearity pre = make_preset(id);
        const Branch branch = continue_branch(s.op, s.w, pre, sweep_policy());
        for (const auto& p : branch.points)
            CHECK(energy_estimate_check(p, pre, s.w).holds);
    }
}
