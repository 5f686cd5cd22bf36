#pragma once

#include <functional>
#include <optional>
#include <string>

namespace fraceig {

/// A real value extended with a +infinity flag, used for integrals that
/// may diverge (C_f in particular).
struct ExtendedReal {
    double value = 0.0;
    bool finite = true;

    static ExtendedReal infinity() { return {0.0, false}; }
    static ExtendedReal of(double v) { return {v, true}; }
};

enum class NonlinearityKind { R, S };

/// Scalar nonlinearity of class (R) or (S): smooth, increasing, convex,
/// f(0) = 1, superlinear at infinity (R) or blowing up at t = 1 (S).
///
/// All callables are pure. Values are immutable after construction and
/// safe to share across threads.
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::R;
    std::string name;

    std::function<double(double)> f;   // value
    std::function<double(double)> f1;  // first derivative
    std::function<double(double)> f2;  // second derivative
    std::function<double(double)> F;   // antiderivative, F(0) = 0; closed form
                                       // when available, quadrature otherwise

    /// Closed form of H(t) = int_0^t f''(s)(f(s)-1) ds, when available.
    std::function<double(double)> H_closed;

    /// log f and log F, for ratio evaluations past the overflow threshold.
    std::function<double(double)> log_f;
    std::function<double(double)> log_F;

    /// beta with f = exp(beta), beta(0) = 0; set iff log_convex.
    std::function<double(double)> beta;

    double a_f = 0.0;       // upper endpoint of the domain: +inf (R) or 1 (S)
    ExtendedReal c_f;       // int_0^{a_f} 1/f, closed form
    bool log_convex = false;

    bool is_r() const { return kind == NonlinearityKind::R; }
    bool is_s() const { return kind == NonlinearityKind::S; }
};

/// Builds one of the preset nonlinearities:
///   exp        f = e^t                 (R, log-convex, C_f = 1)
///   mems2      f = (1-t)^-2            (S, C_f = 1/3)
///   mems1      f = (1-t)^-1            (S, C_f = 1/2)
///   loglin     f = (t+1)log(t+1)+1     (R, C_f = +inf)
///   power(p)   f = (1+t)^p, p > 1      (R, not log-convex)
/// Throws std::invalid_argument for unknown ids or power with p <= 1.
Nonlinearity make_preset(const std::string& id);

/// Numeric evaluation of C_f = int_0^{a_f} f(t)^-1 dt with divergence
/// detection for the R-class tail (decade integrals that stop shrinking
/// geometrically are declared +inf).
ExtendedReal cf_constant(const Nonlinearity& nl);

/// Smallest k >= 0 with f(t/lam) + k >= (1+delta) f(t) for all t >= 0,
/// located by grid search plus golden-section refinement and verified on
/// the grid together with an asymptotic dominance check.
/// Requires an R-class log-convex nonlinearity.
double find_shift_k(const Nonlinearity& nl, double lam, double delta,
                    double t_max = 40.0, int grid_points = 10000);

/// mu in (0,1) such that
///   R (log-convex):  mu^2 (f(t/mu) + eps) >= f(t) + eps/2  for all t >= 0
///   S:               mu   (f(t/mu) + eps) >= f(t) + eps/2  on [0, mu]
/// found by bisection on mu in (0.5, 1); the returned value is the upper
/// (verified) end of the final bracket.
double find_scaling_mu(const Nonlinearity& nl, double eps,
                       double t_max = 40.0, int grid_points = 10000);

enum class TailTrend { decreasing, increasing, flat };

struct CriticalityResult {
    double alpha_est = 0.0;   // max of the ratio over the tail samples
    TailTrend tail_trend = TailTrend::flat;
    double tail_start = 0.0;  // first abscissa of the tail window
};

/// R-class: F(t)/(t f(t)) on a geometric grid up to t_max, tail = last
/// ten samples. S-class: f(t)/F(t) at t = 1 - 10^-k. Ratios are formed
/// in log space when direct evaluation overflows.
CriticalityResult criticality_ratio(const Nonlinearity& nl, double t_max,
                                    int samples);

/// H(t) = int_0^t f''(s)(f(s)-1) ds; closed form when the preset carries
/// one, adaptive quadrature otherwise. H(0) = 0, H nondecreasing.
double big_h(const Nonlinearity& nl, double t);

/// Antiderivative by adaptive quadrature (the fallback used when a preset
/// has no closed-form F; exposed for cross-checking).
double antiderivative_quadrature(const Nonlinearity& nl, double t);

}  // namespace fraceig
