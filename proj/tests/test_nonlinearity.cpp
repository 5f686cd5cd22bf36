#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fraceig/nonlinearity.hpp"

using namespace fraceig;

namespace {

// Independent quadrature oracle.
double quad(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 12, 1e-13, &err);
}

// Uniform grid so that raw second differences are a curvature proxy.
std::vector<double> sample_grid(const Nonlinearity& nl) {
    std::vector<double> ts;
    const double hi = nl.is_r() ? 20.0 : 0.999;
    for (int i = 0; i <= 400; ++i) ts.push_back(hi * i / 400.0);
    return ts;
}

const char* kPresets[] = {"exp", "mems2", "mems1", "loglin", "power(3)"};

}  // namespace

TEST_CASE("presets: f(0) = 1 and class endpoints") {
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        CHECK(nl.f(0.0) == 1.0);
        if (nl.is_s()) CHECK(nl.a_f == 1.0);
        else CHECK(std::isinf(nl.a_f));
        CHECK(nl.F(0.0) == 0.0);
    }
}

TEST_CASE("presets: unknown ids and bad power arguments are rejected") {
    CHECK_THROWS_AS(make_preset("gauss"), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("power(1)"), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("power(0.5)"), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("power(x)"), std::invalid_argument);
}

TEST_CASE("presets: class proxies (superlinearity, endpoint blow-up)") {
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        if (nl.is_r()) {
            // f(t)/t increasing through t = 10, 10^2, 10^3 (inf counts as
            // larger when exp overflows the last sample).
            double prev = nl.f(10.0) / 10.0;
            for (double t : {1e2, 1e3}) {
                const double ratio = nl.f(t) / t;
                CHECK(ratio > prev);
                prev = ratio;
            }
        } else {
            double prev = 0.0;
            for (int k = 1; k <= 6; ++k) {
                const double v = nl.f(1.0 - std::pow(10.0, -k));
                CHECK(v > prev);
                CHECK(v >= 0.99 * std::pow(10.0, k));  // first-order blow-up
                prev = v;
            }
        }
    }
}

TEST_CASE("presets: monotone and convex on a sampled grid") {
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        const auto ts = sample_grid(nl);
        for (size_t i = 1; i + 1 < ts.size(); ++i) {
            const double fm = nl.f(ts[i - 1]), f0 = nl.f(ts[i]), fp = nl.f(ts[i + 1]);
            CHECK(f0 - fm >= -1e-10);
            CHECK(fp - 2.0 * f0 + fm >= -1e-10);
        }
    }
}

TEST_CASE("presets: log-convexity flag matches the sampled second difference") {
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        const auto ts = sample_grid(nl);
        double worst = 1e300;
        for (size_t i = 1; i + 1 < ts.size(); ++i) {
            const double d2 = std::log(nl.f(ts[i + 1])) - 2.0 * std::log(nl.f(ts[i])) +
                              std::log(nl.f(ts[i - 1]));
            worst = std::min(worst, d2);
        }
        if (nl.log_convex) {
            CHECK(worst >= -1e-10);
            REQUIRE(nl.beta);
            CHECK(nl.beta(0.0) == 0.0);
            for (double t : {0.1, 0.5, 0.9})
                CHECK(std::exp(nl.beta(t)) == doctest::Approx(nl.f(t)).epsilon(1e-12));
        } else {
            CHECK(worst < 0.0);  // loglin and power carry strictly concave log f
        }
    }
}

TEST_CASE("presets: F agrees with quadrature of f to 1e-8 relative") {
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        const std::vector<double> ts =
            nl.is_r() ? std::vector<double>{0.3, 1.0, 4.0, 15.0}
                      : std::vector<double>{0.2, 0.5, 0.9, 0.99};
        for (double t : ts) {
            const double oracle = quad(nl.f, 0.0, t);
            CHECK(nl.F(t) == doctest::Approx(oracle).epsilon(1e-8));
            CHECK(antiderivative_quadrature(nl, t) ==
                  doctest::Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("presets: derivatives are consistent with finite differences") {
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        for (double t : {0.2, 0.7}) {
            const double h = 1e-6;
            const double d1 = (nl.f(t + h) - nl.f(t - h)) / (2.0 * h);
            const double d2 = (nl.f(t + h) - 2.0 * nl.f(t) + nl.f(t - h)) / (h * h);
            CHECK(nl.f1(t) == doctest::Approx(d1).epsilon(1e-8));
            CHECK(nl.f2(t) == doctest::Approx(d2).epsilon(1e-3));
        }
    }
}

TEST_CASE("cf_constant: closed forms and divergence flag") {
    CHECK(cf_constant(make_preset("exp")).finite);
    CHECK(cf_constant(make_preset("exp")).value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(cf_constant(make_preset("mems2")).value ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(cf_constant(make_preset("mems1")).value ==
          doctest::Approx(0.5).epsilon(1e-8));
    CHECK(cf_constant(make_preset("power(3)")).value ==
          doctest::Approx(0.5).epsilon(1e-6));
    CHECK_FALSE(cf_constant(make_preset("loglin")).finite);
    // Stored closed forms agree with the numeric route.
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        const ExtendedReal numeric = cf_constant(nl);
        CHECK(numeric.finite == nl.c_f.finite);
        if (numeric.finite)
            CHECK(numeric.value == doctest::Approx(nl.c_f.value).epsilon(1e-6));
    }
}

TEST_CASE("find_shift_k: exp reference values and the verification bound") {
    const Nonlinearity nl = make_preset("exp");
    // min of e^{2t} - 2 e^t is -1, so k = 1; for delta = 3 the min of
    // e^{2t} - 4 e^t is -4 at e^t = 2.
    const double k1 = find_shift_k(nl, 0.5, 1.0);
    CHECK(k1 == doctest::Approx(1.0).epsilon(0.01));
    const double k4 = find_shift_k(nl, 0.5, 3.0);
    CHECK(k4 == doctest::Approx(4.0).epsilon(0.01));

    for (int i = 0; i <= 4000; ++i) {
        const double t = i == 0 ? 0.0 : 1e-6 * std::pow(4e7, (i - 1) / 3999.0);
        CHECK(2.0 * nl.f(t) - nl.f(2.0 * t) - k1 <= 1e-12 * (1.0 + std::abs(nl.f(t))));
    }
}

TEST_CASE("find_shift_k: gates") {
    CHECK_THROWS_AS(find_shift_k(make_preset("mems2"), 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_shift_k(make_preset("power(3)"), 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_shift_k(make_preset("loglin"), 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_shift_k(make_preset("exp"), 1.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_shift_k(make_preset("exp"), 0.5, -1.0),
                    std::invalid_argument);
}

TEST_CASE("find_scaling_mu: value at t = 0 forces the lower bound") {
    const Nonlinearity nl = make_preset("exp");
    const double eps = 0.1;
    const double mu = find_scaling_mu(nl, eps);
    CHECK(mu >= std::sqrt((1.0 + eps / 2.0) / (1.0 + eps)));
    CHECK(mu < 1.0);
    for (int i = 0; i <= 4000; ++i) {
        const double t = i == 0 ? 0.0 : 1e-6 * std::pow(4e7, (i - 1) / 3999.0);
        CHECK(mu * mu * (nl.f(t / mu) + eps) - nl.f(t) - eps / 2.0 >= -1e-12);
    }
}

TEST_CASE("find_scaling_mu: S-class bracket for mems2") {
    const Nonlinearity nl = make_preset("mems2");
    const double mu = find_scaling_mu(nl, 1.0);
    // t = 0 requires 2 mu - 1.5 >= 0.
    CHECK(mu >= 0.75);
    CHECK(mu < 1.0);
    for (int i = 0; i <= 4000; ++i) {
        const double t = mu * i / 4000.0;
        const double r =
            mu * (nl.f(std::min(t / mu, 1.0 - 1e-15)) + 1.0) - nl.f(t) - 0.5;
        CHECK(r >= -1e-12);
    }
}

TEST_CASE("find_scaling_mu: gates") {
    CHECK_THROWS_AS(find_scaling_mu(make_preset("power(3)"), 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_scaling_mu(make_preset("exp"), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_scaling_mu(make_preset("exp"), -1.0),
                    std::invalid_argument);
}

TEST_CASE("criticality_ratio: exp decays like 1/t") {
    const CriticalityResult r = criticality_ratio(make_preset("exp"), 10.0, 10000);
    // F/(t f) = (1 - e^{-t})/t ~ 0.1 near t = 10.
    CHECK(r.alpha_est < 0.11);
    CHECK(r.alpha_est > 0.09);
    CHECK(r.tail_trend == TailTrend::decreasing);
}

TEST_CASE("criticality_ratio: power(3) tends to 1/4 from above") {
    const CriticalityResult r =
        criticality_ratio(make_preset("power(3)"), 1e4, 10000);
    CHECK(r.alpha_est > 0.25);
    CHECK(r.alpha_est < 0.2506);
    CHECK(r.tail_trend == TailTrend::decreasing);

    // Closed-form spot check: F/(t f) -> 1/(p+1).
    const Nonlinearity nl = make_preset("power(3)");
    const double t = 1e6;
    CHECK(nl.F(t) / (t * nl.f(t)) == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("criticality_ratio: mems2 blows up near the endpoint") {
    const Nonlinearity nl = make_preset("mems2");
    // f/F at t = 0.99 is 10^4 / 99.
    CHECK(nl.f(0.99) / nl.F(0.99) == doctest::Approx(1e4 / 99.0).epsilon(1e-10));
    const CriticalityResult r = criticality_ratio(nl, 0.0, 100);
    CHECK(r.tail_trend == TailTrend::increasing);
    CHECK(r.alpha_est > 1e4 / 99.0);
}

TEST_CASE("criticality_ratio: log route survives overflow for exp") {
    const CriticalityResult r = criticality_ratio(make_preset("exp"), 1e4, 10000);
    CHECK(r.alpha_est < 2e-4);
    CHECK(r.alpha_est > 0.0);
}

TEST_CASE("big_h: zero at zero, closed forms match quadrature") {
    for (const char* id : kPresets) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        CHECK(big_h(nl, 0.0) == 0.0);
        const std::vector<double> ts = nl.is_r()
                                           ? std::vector<double>{0.4, 1.0, 3.0}
                                           : std::vector<double>{0.3, 0.6, 0.9};
        double prev = 0.0;
        for (double t : ts) {
            const double oracle =
                quad([&nl](double s) { return nl.f2(s) * (nl.f(s) - 1.0); }, 0.0, t);
            const double h = big_h(nl, t);
            CHECK(h == doctest::Approx(oracle).epsilon(1e-6));
            CHECK(h >= prev);
            prev = h;
        }
    }
    // (e - 1)^2 / 2 at t = 1.
    CHECK(big_h(make_preset("exp"), 1.0) ==
          doctest::Approx(0.5 * (M_E - 1.0) * (M_E - 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(big_h(make_preset("mems2"), 1.0), std::invalid_argument);
}

TEST_CASE("big_h dominates the derivative gap (grid property)") {
    // H(t) >= (f(T) - 1)(f'(t) - f'(T)) for 0 < T < t.
    for (const char* id : {"exp", "mems2", "loglin"}) {
        const Nonlinearity nl = make_preset(id);
        CAPTURE(id);
        const double hi = nl.is_r() ? 5.0 : 0.95;
        for (int i = 1; i <= 20; ++i) {
            const double t = hi * i / 20.0;
            const double ht = big_h(nl, t);
            for (int j = 1; j < i; ++j) {
                const double T = hi * j / 20.0;
                CHECK(ht >= (nl.f(T) - 1.0) * (nl.f1(t) - nl.f1(T)) - 1e-10 * (1.0 + ht));
            }
        }
    }
}
