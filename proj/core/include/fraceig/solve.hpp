#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fraceig/nonlinearity.hpp"
#include "fraceig/spectral_operator.hpp"
#include "fraceig/weight.hpp"

namespace fraceig {

/// One converged solution of A^{1/2} u = lambda g f(u).
struct BranchPoint {
    double lambda = 0.0;
    Eigen::VectorXd u;
    double residual = 0.0;  // max-norm of A^{1/2} u - lambda g f(u)
    int iterations = 0;
    double mu1 = std::numeric_limits<double>::quiet_NaN();  // smallest
    // eigenvalue of A^{1/2} - lambda diag(g f'(u)); NaN until computed
    double sup_u = 0.0;
};

enum class SolveStatus {
    converged,
    max_iterations,
    blow_up,            // R-class guard or S-class sup u -> 1
    singular_jacobian,
    diverged,
};

struct SolveResult {
    SolveStatus status = SolveStatus::diverged;
    BranchPoint point;  // valid iff status == converged

    bool ok() const { return status == SolveStatus::converged; }
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    double blow_up_sup = 50.0;   // R-class divergence guard on sup u
    int stall_window = 50;       // iterations without decrease => diverging
};

/// Monotone fixed-point iteration u_{k+1} = A^{-1/2}(lambda g f(u_k))
/// from u_0 = 0 (or a supplied subsolution start). Iterates are entrywise
/// nondecreasing by inverse positivity; the limit is the minimal discrete
/// solution above the start. Converged when the free residual
/// lambda ||g (f(u_{k+1}) - f(u_k))||_inf drops below tol.
SolveResult monotone_solve(const SpectralOperator& op, const WeightField& w,
                           const Nonlinearity& nl, double lambda,
                           const SolveOptions& opts = {},
                           const Eigen::VectorXd* warm_start = nullptr);

/// Newton iteration on r(u) = A^{1/2} u - lambda g f(u).
SolveResult newton_solve(const SpectralOperator& op, const WeightField& w,
                         const Nonlinearity& nl, double lambda,
                         const Eigen::VectorXd& u0, double tol,
                         int max_iter = 50);

struct DeflationOptions {
    int starts = 20;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    double distinct_factor = 10.0;  // pairwise max-norm > factor * tol
    double amp_min = 0.01;          // start amplitudes, log-uniform
    double amp_max = 8.0;           // (S-class caps at sup < 1 internally)
    int newton_max_iter = 30;       // quadratic basins converge well within
                                    // this; long wandering paths are cut
};

/// Newton with multiplicative shifted deflation (exponent 2, shift 1)
/// against all known and newly found solutions, run from `starts`
/// seeded random initial guesses. Returns the distinct solutions found.
std::vector<BranchPoint> deflated_search(const SpectralOperator& op,
                                         const WeightField& w,
                                         const Nonlinearity& nl, double lambda,
                                         const std::vector<Eigen::VectorXd>& known,
                                         const DeflationOptions& opts);

/// Smallest eigenvalue of the symmetric stability matrix
/// A^{1/2} - lambda diag(g f'(u)).
double stability_eigenvalue(const SpectralOperator& op, const WeightField& w,
                            const Nonlinearity& nl, const BranchPoint& point);

/// Minimal-solution branch: points at increasing lambda, the bisection
/// bracket around the extremal parameter, and the extremal-solution data.
struct Branch {
    std::vector<BranchPoint> points;
    double lambda_lo = 0.0;   // largest lambda with a converged solve
    double lambda_hi = 0.0;   // smallest lambda observed to fail
    Eigen::VectorXd u_star_est;       // solution at lambda_lo
    double extremal_integral = 0.0;   // h^dim sum g f'(u*) f(u*)
};

struct BranchPolicy {
    enum class Spacing { grid, adaptive };
    Spacing spacing = Spacing::grid;
    int points = 20;          // sweep length for grid spacing
    double lo_frac = 1e-3;    // sweep start as a fraction of lambda*
    double hi_frac = 0.95;    // sweep end as a fraction of lambda*
    double bracket_tol = 1e-3;
};

/// Sweeps lambda upward with warm-started monotone solves, halving the
/// step on non-convergence, and finishes with a lambda* bracket of width
/// <= policy.bracket_tol. Stability eigenvalues are filled in along the way.
Branch continue_branch(const SpectralOperator& op, const WeightField& w,
                       const Nonlinearity& nl, const BranchPolicy& policy,
                       const SolveOptions& opts = {});

struct LambdaStarEstimate {
    double lambda_lo = 0.0;       // admits a converged minimal solution
    double lambda_hi = 0.0;       // fails to converge
    ExtendedReal upper_bound;     // sqrt(lambda1) C_f (sum phi1)/(sum g phi1)
    double lower_bound = 0.0;     // best t / sup f(u_t) over a small t-grid
};

/// Bisection on monotone-solve convergence plus the two closed-form style
/// bounds. The upper bound is reported unavailable when C_f = +inf.
LambdaStarEstimate estimate_lambda_star(const SpectralOperator& op,
                                        const WeightField& w,
                                        const Nonlinearity& nl, double tol,
                                        const SolveOptions& opts = {});

struct ExtremalEstimate {
    Eigen::VectorXd u_star;
    double extremal_integral = 0.0;
};

ExtremalEstimate extremal_estimate(const Branch& branch, const Nonlinearity& nl,
                                   const WeightField& w);

/// Constructive solution of A^{1/2} u = g (f(u) + eps/2) from a vector tau
/// satisfying A^{1/2} tau >= g (f(tau) + eps) entrywise (within tol).
/// S-class: supersolution mu * tau then monotone iteration. R-class
/// (log-convex): the three-lift chain u2 <= u1 <= mu u0, monotone
/// iteration for the eps-problem, scaling by mu, and a final monotone
/// iteration. The chain vectors are exposed for inspection.
struct EpsHalfConstruction {
    BranchPoint solution;       // solves the eps/2-problem (lambda = 1)
    double mu = 0.0;
    Eigen::VectorXd u1, u2, u3; // R-class chain; empty for S-class
};

EpsHalfConstruction construct_eps_half_solution(const SpectralOperator& op,
                                        const WeightField& w,
                                        const Nonlinearity& nl,
                                        const Eigen::VectorXd& tau, double eps,
                                        const SolveOptions& opts = {});

struct EnergyEstimate {
    double lhs = 0.0;   // h^dim sum g f(u) H(u)
    double rhs = 0.0;   // h^dim sum g f(u) f'(u)
    bool holds = false; // lhs <= rhs (1 + 1e-6)
};

EnergyEstimate energy_estimate_check(const BranchPoint& point,
                                     const Nonlinearity& nl,
                                     const WeightField& w);

}  // namespace fraceig
