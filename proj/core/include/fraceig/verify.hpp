#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "fraceig/cylinder.hpp"
#include "fraceig/nonlinearity.hpp"
#include "fraceig/solve.hpp"
#include "fraceig/spectral_operator.hpp"
#include "fraceig/weight.hpp"

namespace fraceig {

/// Sharp discrete constant of the trace inequality
/// int_C |grad w|^2 >= C~ int_Omega w^2: equals sqrt(lambda1) because the
/// minimizing extension energy is <A^{1/2} u, u>.
double trace_constant(const SpectralOperator& op);

/// The four terms of the truncated-cylinder integration-by-parts identity
///   1/2 int_{lateral} |grad v|^2 x.nu + int_{bottom} (x.grad_x v) dnu v
///   + (N-1)/2 int_{bulk} |grad v|^2 + E(R) = 0
/// for a discrete harmonic field, together with their sum (the residual).
/// Defined for 2-d cross sections only.
struct PohozaevTerms {
    double lateral = 0.0;
    double bottom = 0.0;
    double bulk = 0.0;
    double top = 0.0;      // E at the evaluation height
    double residual = 0.0;
    double max_abs_term = 0.0;
};

PohozaevTerms pohozaev_residual(const Grid& grid, const CylinderField& field,
                                double height);

/// E(R) = int_{Omega x {y=R}} (x.grad_x v + R dy v) dy v - (R/2) |grad v|^2
/// evaluated at the stored layer nearest to R (central differences for
/// interior layers, one-sided at the top).
double boundary_energy(const CylinderField& field, double r);

struct SLambdaParams {
    double theta = 0.95;
    double big_c = 0.0;       // the C of the C/lambda tau^2 term
    double gamma = 0.0;
    double eps_lambda = 0.0;  // max |x . grad u_lambda|
    double tau1 = 1.0;        // R-class grid upper threshold (pre guard decade)
    int tau_samples = 400;
};

struct SLambdaMin {
    double min_s = 0.0;
    int argmin_node = -1;
    double argmin_tau = 0.0;
    double min_t = 0.0;     // nodewise variant with per-node x.grad g / g
                            // and x.grad u_lambda in place of gamma, eps
};

/// Minimum of the scalar certificate function
///   S(x,tau) = theta (N-1)/2 {f(u+tau)-f(u)} tau + (C/lambda) tau^2
///              - (N+gamma) {F(u+tau)-F(u)-f(u) tau}
///              - eps_lambda {f(u+tau)-f(u)-f'(u) tau}
/// over interior nodes x and a tau grid: geometric up to 10 * tau1 for
/// R-class, uniform plus a geometric cluster toward 1 - u(x) for S-class.
/// tau = 0 is excluded (S vanishes there identically).
SLambdaMin s_lambda_min(const BranchPoint& point, const Nonlinearity& nl,
                        const WeightField& w, const SLambdaParams& params);

/// Max over nodes of |x . grad u| with central differences and zero
/// boundary ghosts.
double sup_radial_derivative(const Grid& grid, const Eigen::VectorXd& u);

struct UniquenessReport {
    double lambda = 0.0;
    double gamma = 0.0;
    double alpha = 0.0;        // criticality ratio estimate
    double theta = 0.0;
    double trace_c = 0.0;      // C~
    double big_c = 0.0;        // (N-1)(1-theta) C~ / (2 max g)
    double eps_lambda = 0.0;
    double tau0 = 0.0;
    double tau1 = 0.0;
    double min_s = 0.0;
    double min_t = 0.0;
    int argmin_node = -1;
    double argmin_tau = 0.0;
    bool condition_ok = false;   // (3.1)-type margin check (R-class)
    bool certified = false;
    std::string reason;
    int deflated_found = 0;          // count from the empirical probe
    double deflated_max_dev = 0.0;   // max-norm gap of probe results to u_lambda
    bool deflated_agrees = false;
};

struct CertificateOptions {
    double ratio_t_max = 1e4;   // criticality scan endpoint (R-class)
    int ratio_samples = 10000;
    int tau_samples = 400;
    int deflation_starts = 20;
    std::uint64_t seed = 0;
    double solve_tol = 1e-10;
};

/// Assembles the full small-lambda uniqueness certificate at the given
/// minimal-branch point: criticality ratio alpha, weight statistic gamma,
/// theta maximizing the margin theta (N-1)/2 - alpha (N+gamma) (capped at
/// 0.95), trace constant, C, eps_lambda, tau thresholds, and the sampled
/// minimum of S. R-class requires the strict criticality margin; S-class
/// rests on the sampled positivity alone. A deflated search runs as an
/// independent empirical probe and its agreement is recorded.
UniquenessReport uniqueness_certificate(const BranchPoint& point,
                                        const Nonlinearity& nl,
                                        const WeightField& w,
                                        const SpectralOperator& op,
                                        const CertificateOptions& opts = {});

}  // namespace fraceig
