#include "fraceig/nonlinearity.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fraceig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_in_domain(const Nonlinearity& nl, double t) {
    if (t < 0.0)
        throw std::invalid_argument("nonlinearity argument must be >= 0");
    if (nl.is_s() && t >= 1.0)
        throw std::invalid_argument("S-class nonlinearity undefined for t >= 1");
    return t;
}

/// Geometric grid on [lo, hi] with an explicit 0 prepended.
std::vector<double> geometric_grid_with_zero(double lo, double hi, int points) {
    std::vector<double> g;
    g.reserve(points + 1);
    g.push_back(0.0);
    const double ratio = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g.push_back(lo * std::exp(ratio * i));
    return g;
}

Nonlinearity make_exp() {
    Nonlinearity nl;
    nl.kind = NonlinearityKind::R;
    nl.name = "exp";
    nl.f = [](double t) { return std::exp(t); };
    nl.f1 = nl.f;
    nl.f2 = nl.f;
    nl.F = [](double t) { return std::expm1(t); };
    // H = (e^t - 1)^2 / 2
    nl.H_closed = [](double t) { double e = std::expm1(t); return 0.5 * e * e; };
    nl.log_f = [](double t) { return t; };
    nl.log_F = [](double t) { return t + std::log1p(-std::exp(-t)); };
    nl.beta = [](double t) { return t; };
    nl.a_f = kInf;
    nl.c_f = ExtendedReal::of(1.0);
    nl.log_convex = true;
    return nl;
}

Nonlinearity make_mems(int order) {
    Nonlinearity nl;
    nl.kind = NonlinearityKind::S;
    nl.name = order == 2 ? "mems2" : "mems1";
    const double p = order;
    nl.f = [p](double t) { return std::pow(1.0 - t, -p); };
    nl.f1 = [p](double t) { return p * std::pow(1.0 - t, -p - 1.0); };
    nl.f2 = [p](double t) { return p * (p + 1.0) * std::pow(1.0 - t, -p - 2.0); };
    if (order == 2) {
        nl.F = [](double t) { return 1.0 / (1.0 - t) - 1.0; };
        // H = 6/5 [(1-t)^-5 - 1] - 2 [(1-t)^-3 - 1]
        nl.H_closed = [](double t) {
            const double s = 1.0 - t;
            return 1.2 * (std::pow(s, -5.0) - 1.0) - 2.0 * (std::pow(s, -3.0) - 1.0);
        };
        nl.c_f = ExtendedReal::of(1.0 / 3.0);
    } else {
        nl.F = [](double t) { return -std::log1p(-t); };
        // H = 2/3 (1-t)^-3 - (1-t)^-2 + 1/3
        nl.H_closed = [](double t) {
            const double s = 1.0 - t;
            return (2.0 / 3.0) * std::pow(s, -3.0) - std::pow(s, -2.0) + 1.0 / 3.0;
        };
        nl.c_f = ExtendedReal::of(0.5);
    }
    nl.log_f = [p](double t) { return -p * std::log1p(-t); };
    nl.beta = nl.log_f;  // log f is convex for both mems orders
    nl.a_f = 1.0;
    nl.log_convex = true;
    return nl;
}

Nonlinearity make_loglin() {
    Nonlinearity nl;
    nl.kind = NonlinearityKind::R;
    nl.name = "loglin";
    nl.f = [](double t) { return (t + 1.0) * std::log1p(t) + 1.0; };
    nl.f1 = [](double t) { return std::log1p(t) + 1.0; };
    nl.f2 = [](double t) { return 1.0 / (t + 1.0); };
    nl.F = [](double t) {
        const double s = t + 1.0;
        return 0.5 * s * s * std::log(s) - 0.25 * s * s + t + 0.25;
    };
    // H = (1+t) log(1+t) - t
    nl.H_closed = [](double t) { return (1.0 + t) * std::log1p(t) - t; };
    nl.log_f = [](double t) { return std::log((t + 1.0) * std::log1p(t) + 1.0); };
    nl.a_f = kInf;
    nl.c_f = ExtendedReal::infinity();
    nl.log_convex = false;  // (log f)'' < 0 for t > 0
    return nl;
}

Nonlinearity make_power(double p) {
    if (p <= 1.0)
        throw std::invalid_argument("power preset requires p > 1");
    Nonlinearity nl;
    nl.kind = NonlinearityKind::R;
    nl.name = "power(" + std::to_string(p) + ")";
    nl.f = [p](double t) { return std::pow(1.0 + t, p); };
    nl.f1 = [p](double t) { return p * std::pow(1.0 + t, p - 1.0); };
    nl.f2 = [p](double t) { return p * (p - 1.0) * std::pow(1.0 + t, p - 2.0); };
    nl.F = [p](double t) { return (std::pow(1.0 + t, p + 1.0) - 1.0) / (p + 1.0); };
    nl.H_closed = [p](double t) {
        const double s = 1.0 + t;
        return p * (p - 1.0) * (std::pow(s, 2.0 * p - 1.0) - 1.0) / (2.0 * p - 1.0) -
               p * (std::pow(s, p - 1.0) - 1.0);
    };
    nl.log_f = [p](double t) { return p * std::log1p(t); };
    nl.log_F = [p](double t) {
        return (p + 1.0) * std::log1p(t) +
               std::log1p(-std::pow(1.0 + t, -(p + 1.0))) - std::log(p + 1.0);
    };
    nl.a_f = kInf;
    nl.c_f = ExtendedReal::of(1.0 / (p - 1.0));
    nl.log_convex = false;  // log f = p log(1+t) is concave
    return nl;
}

}  // namespace

Nonlinearity make_preset(const std::string& id) {
    if (id == "exp") return make_exp();
    if (id == "mems2") return make_mems(2);
    if (id == "mems1") return make_mems(1);
    if (id == "loglin") return make_loglin();
    if (id.rfind("power(", 0) == 0 && id.back() == ')') {
        const std::string arg = id.substr(6, id.size() - 7);
        size_t pos = 0;
        double p = 0.0;
        try {
            p = std::stod(arg, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad power preset argument: " + arg);
        }
        if (pos != arg.size())
            throw std::invalid_argument("bad power preset argument: " + arg);
        return make_power(p);
    }
    throw std::invalid_argument("unknown nonlinearity preset: " + id);
}

double antiderivative_quadrature(const Nonlinearity& nl, double t) {
    require_in_domain(nl, t);
    if (t == 0.0) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    return gauss_kronrod<double, 15>::integrate(nl.f, 0.0, t, 12, 1e-12, &err);
}

ExtendedReal cf_constant(const Nonlinearity& nl) {
    using boost::math::quadrature::gauss_kronrod;
    const auto inv_f = [&nl](double t) { return 1.0 / nl.f(t); };

    if (nl.is_s()) {
        // 1/f is bounded by 1 and tends to 0 at the endpoint.
        boost::math::quadrature::tanh_sinh<double> integrator;
        const double v = integrator.integrate(inv_f, 0.0, 1.0);
        if (!std::isfinite(v))
            throw std::runtime_error("cf_constant: quadrature failed for " + nl.name);
        return ExtendedReal::of(v);
    }

    // R-class: integrate decade by decade and watch the tail ratios.
    double total = 0.0;
    std::vector<double> decades;
    double lo = 0.0, hi = 1.0;
    const int max_decades = 18;
    for (int k = 0; k < max_decades; ++k) {
        double err = 0.0;
        const double piece =
            gauss_kronrod<double, 15>::integrate(inv_f, lo, hi, 12, 1e-12, &err);
        if (!std::isfinite(piece))
            throw std::runtime_error("cf_constant: quadrature failed for " + nl.name);
        decades.push_back(piece);
        total += piece;
        if (piece < 1e-14 * std::max(total, 1e-30))
            return ExtendedReal::of(total);
        lo = hi;
        hi *= 10.0;
    }

    const size_t n = decades.size();
    const double r_last = decades[n - 1] / decades[n - 2];
    bool ratios_increasing = true;
    for (size_t k = n - 4; k + 1 < n; ++k) {
        if (decades[k + 1] / decades[k] <= decades[k] / decades[k - 1])
            ratios_increasing = false;
    }
    if (r_last >= 0.9 || (ratios_increasing && r_last >= 0.85))
        return ExtendedReal::infinity();

    // Geometric tail extrapolation.
    return ExtendedReal::of(total + decades[n - 1] * r_last / (1.0 - r_last));
}

namespace {

void require_r_log_convex(const Nonlinearity& nl, const char* op) {
    if (!nl.is_r())
        throw std::invalid_argument(std::string(op) + " requires an R-class nonlinearity");
    if (!nl.log_convex)
        throw std::invalid_argument(std::string(op) + " requires a log-convex nonlinearity");
}

/// Asymptotic dominance certificate for increasing log-convex f: the gap
/// log f(t/q) - log f(t) is nondecreasing in t for q < 1, so a factor
/// dominance established at t_max persists for every larger t.
bool dominates_at_tail(const Nonlinearity& nl, double q, double factor, double t_max) {
    const double ft = nl.f(t_max);
    const double fq = nl.f(t_max / q);
    if (std::isinf(fq)) return true;
    return fq >= factor * ft;
}

}  // namespace

double find_shift_k(const Nonlinearity& nl, double lam, double delta,
                    double t_max, int grid_points) {
    require_r_log_convex(nl, "find_shift_k");
    if (!(lam > 0.0 && lam < 1.0))
        throw std::invalid_argument("find_shift_k: lam must lie in (0,1)");
    if (delta <= 0.0)
        throw std::invalid_argument("find_shift_k: delta must be positive");

    const auto gap = [&](double t) { return (1.0 + delta) * nl.f(t) - nl.f(t / lam); };

    const auto grid = geometric_grid_with_zero(1e-6, t_max, grid_points);
    double best = -kInf, best_t = 0.0;
    for (double t : grid) {
        const double v = gap(t);
        if (v > best) { best = v; best_t = t; }
    }

    // Golden-section refinement around the grid maximum.
    double a = std::max(0.0, best_t / 1.01 - 1e-6);
    double b = std::min(t_max, best_t * 1.01 + 1e-6);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int i = 0; i < 120; ++i) {
        if (gap(c) > gap(d)) b = d; else a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    best = std::max(best, gap(0.5 * (a + b)));

    const double k = std::max(0.0, best);

    if (!dominates_at_tail(nl, lam, 1.0 + delta, t_max))
        throw std::runtime_error("find_shift_k: no asymptotic dominance by t_max");
    for (double t : grid) {
        if (gap(t) - k > 1e-12 * (1.0 + std::abs(nl.f(t))))
            throw std::runtime_error("find_shift_k: verification failed on grid");
    }
    return k;
}

double find_scaling_mu(const Nonlinearity& nl, double eps,
                       double t_max, int grid_points) {
    if (eps <= 0.0)
        throw std::invalid_argument("find_scaling_mu: eps must be positive");
    if (nl.is_r())
        require_r_log_convex(nl, "find_scaling_mu");

    const bool s_class = nl.is_s();

    const auto residual = [&](double mu, double t) {
        const double scale = s_class ? mu : mu * mu;
        return scale * (nl.f(t / mu) + eps) - nl.f(t) - 0.5 * eps;
    };

    const auto passes = [&](double mu) {
        if (s_class) {
            // Uniform grid on [0, mu]; the domain cap keeps t/mu <= 1.
            const int pts = grid_points;
            for (int i = 0; i <= pts; ++i) {
                const double t = mu * (double(i) / pts);
                const double arg = std::min(t / mu, 1.0 - 1e-15);
                const double r = mu * (nl.f(arg) + eps) - nl.f(std::min(t, 1.0 - 1e-15)) - 0.5 * eps;
                if (!(r >= 0.0)) return false;
            }
            return true;
        }
        const auto grid = geometric_grid_with_zero(1e-6, t_max, grid_points);
        for (double t : grid)
            if (!(residual(mu, t) >= 0.0)) return false;
        // mu^2 f(t/mu) >= f(t) at t_max persists beyond it (monotone
        // log-gap), and mu^2 eps - eps/2 > 0 covers the constant part.
        return mu * mu > 0.5 && dominates_at_tail(nl, mu, 1.0 / (mu * mu), t_max);
    };

    double lo = 0.5, hi = 1.0 - 1e-9;
    if (!passes(hi))
        throw std::runtime_error(
            "find_scaling_mu: no passing mu below 1 (eps too small for grid resolution)");
    if (passes(lo)) return lo;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid)) hi = mid; else lo = mid;
    }
    if (hi <= 0.5)
        throw std::runtime_error("find_scaling_mu: no mu found above floor 0.5");
    return hi;  // verified passing endpoint of the bracket
}

CriticalityResult criticality_ratio(const Nonlinearity& nl, double t_max,
                                    int samples) {
    if (samples < 20)
        throw std::invalid_argument("criticality_ratio: need at least 20 samples");

    std::vector<double> ts, ratios;
    if (nl.is_r()) {
        // ratio = F(t) / (t f(t)), in log space when values overflow.
        const auto grid = geometric_grid_with_zero(1e-2, t_max, samples);
        for (double t : grid) {
            if (t == 0.0) continue;
            const double ft = nl.f(t), Ft = nl.F(t);
            double r;
            if (std::isfinite(ft) && std::isfinite(Ft) && ft < 1e300) {
                r = Ft / (t * ft);
            } else if (nl.log_f && nl.log_F) {
                r = std::exp(nl.log_F(t) - std::log(t) - nl.log_f(t));
            } else {
                break;  // overflow without a log route: stop the scan
            }
            ts.push_back(t);
            ratios.push_back(r);
        }
    } else {
        // ratio = f(t) / F(t) at t = 1 - 10^-k.
        for (int k = 1; k <= samples; ++k) {
            const double t = 1.0 - std::pow(10.0, -std::min(k, 12));
            ts.push_back(t);
            ratios.push_back(nl.f(t) / nl.F(t));
            if (k >= 12) break;
        }
    }
    if (ratios.size() < 3)
        throw std::runtime_error("criticality_ratio: too few evaluable samples");

    const size_t tail = std::min<size_t>(10, ratios.size());
    const size_t start = ratios.size() - tail;
    CriticalityResult out;
    out.tail_start = ts[start];
    out.alpha_est = *std::max_element(ratios.begin() + start, ratios.end());

    const double first = ratios[start], last = ratios.back();
    const double scale = std::max({std::abs(first), std::abs(last), 1e-300});
    if (last < first * (1.0 - 1e-9) - 1e-12 * scale)
        out.tail_trend = TailTrend::decreasing;
    else if (last > first * (1.0 + 1e-9) + 1e-12 * scale)
        out.tail_trend = TailTrend::increasing;
    else
        out.tail_trend = TailTrend::flat;
    return out;
}

double big_h(const Nonlinearity& nl, double t) {
    require_in_domain(nl, t);
    if (t == 0.0) return 0.0;
    if (nl.H_closed) return nl.H_closed(t);
    using boost::math::quadrature::gauss_kronrod;
    const auto integrand = [&nl](double s) { return nl.f2(s) * (nl.f(s) - 1.0); };
    double err = 0.0;
    return gauss_kronrod<double, 15>::integrate(integrand, 0.0, t, 12, 1e-12, &err);
}

}  // namespace fraceig
