#include <doctest.h>

#include <cmath>

#include "mmm/blackscholes.hpp"
#include "mmm/oracle.hpp"
#include "mmm/quadrature.hpp"
#include "mmm/specfun.hpp"
#include "test_helpers.hpp"

using namespace mmm;

namespace {

// Independent oracle: quadrature of the lognormal payoff integral with
// bond = 1, kappa = 0.
double bs_call_quadrature(double S, double K, double T, double v) {
    const double vst = v * std::sqrt(T);
    const double z_low = (std::log(K / S) + 0.5 * vst * vst) / vst;
    const auto f = [&](double z) {
        return (S * std::exp(-0.5 * vst * vst + vst * z) - K) * norm_pdf(z);
    };
    return integrate(f, z_low, z_low + 45.0, 1e-11).value;
}

} // namespace

TEST_CASE("d1/d2 structure") {
    const BsContext atm{100.0, 100.0, 2.0, 0.3, 0.0, 1.0};
    const auto [d1, d2] = bs_d1_d2(atm);
    const double vst = 0.3 * std::sqrt(2.0);
    CHECK(std::abs(d1 - 0.5 * vst) < 1e-15);
    CHECK(std::abs(d2 + 0.5 * vst) < 1e-15);

    testutil::Rng rng(47);
    for (int i = 0; i < 50; ++i) {
        const BsContext ctx{100.0,
                            rng.uniform(50.0, 200.0),
                            rng.uniform(0.1, 10.0),
                            rng.uniform(0.05, 1.5),
                            rng.uniform(-0.02, 0.05),
                            rng.uniform(0.2, 1.0)};
        const auto [a, b] = bs_d1_d2(ctx);
        const double vst = ctx.v * std::sqrt(ctx.T);
        CHECK(std::abs((a - b) - vst) <= 2e-15 * (1.0 + std::abs(a) + std::abs(b)));
    }
    CHECK_THROWS_AS(bs_d1_d2({100.0, 100.0, 1.0, 0.0, 0.0, 1.0}), Error);
}

TEST_CASE("d1/d2 reduce to the yield-to-maturity form under the MMM bond") {
    const ModelParams p = testutil::sp500();
    for (double m : {0.8, 1.0, 1.3})
        for (double T : {0.5, 2.0, 10.0}) {
            const double K = m * p.S;
            const double v = 0.25;
            const double rhat = yield_to_maturity(p, T);
            const auto [d1, d2] = bs_d1_d2({p.S, K, T, v, 0.0, zcb_price(p, T)});
            const double d1_ref = (std::log(p.S / K) + (rhat + 0.5 * v * v) * T) /
                                  (v * std::sqrt(T));
            const double d2_ref = (std::log(p.S / K) + (rhat - 0.5 * v * v) * T) /
                                  (v * std::sqrt(T));
            CHECK(std::abs(d1 - d1_ref) < 1e-12 * std::max(1.0, std::abs(d1_ref)));
            CHECK(std::abs(d2 - d2_ref) < 1e-12 * std::max(1.0, std::abs(d2_ref)));
        }
}

TEST_CASE("bs_call limiting cases") {
    const BsContext zero_vol{120.0, 100.0, 1.0, 0.0, 0.01, 0.95};
    const double forward = 120.0 * std::exp(-0.01);
    CHECK(bs_call(zero_vol) == std::max(forward - 100.0 * 0.95, 0.0));
    const BsContext huge_vol{120.0, 100.0, 1.0, 1e6, 0.01, 0.95};
    CHECK(std::abs(bs_call(huge_vol) - forward) < 1e-12 * 120.0);
}

TEST_CASE("bs_call against the payoff quadrature oracle") {
    CHECK(std::abs(bs_call({100.0, 100.0, 1.0, 0.2, 0.0, 1.0}) - 7.9656) < 1e-3);
    CHECK(std::abs(bs_call({100.0, 100.0, 1.0, 0.2, 0.0, 1.0}) -
                   bs_call_quadrature(100.0, 100.0, 1.0, 0.2)) < 1e-9);
    CHECK(std::abs(bs_call({100.0, 80.0, 0.5, 0.45, 0.0, 1.0}) -
                   bs_call_quadrature(100.0, 80.0, 0.5, 0.45)) < 1e-9);
    CHECK(std::abs(bs_call({100.0, 140.0, 2.0, 0.15, 0.0, 1.0}) -
                   bs_call_quadrature(100.0, 140.0, 2.0, 0.15)) < 1e-9);
}

TEST_CASE("bs_call strictly increasing in volatility, within bounds") {
    testutil::Rng rng(53);
    for (int i = 0; i < 100; ++i) {
        BsContext ctx{100.0,
                      rng.uniform(40.0, 250.0),
                      rng.uniform(0.05, 8.0),
                      rng.uniform(0.01, 2.0),
                      rng.uniform(0.0, 0.03),
                      rng.uniform(0.3, 1.0)};
        const double v2 = ctx.v + rng.uniform(0.01, 1.0);
        const double c1 = bs_call(ctx);
        BsContext ctx2 = ctx;
        ctx2.v = v2;
        const double c2 = bs_call(ctx2);
        CHECK(c2 > c1);
        const double forward = ctx.S * std::exp(-ctx.kappa * ctx.T);
        CHECK(c1 >= std::max(forward - ctx.K * ctx.bond, 0.0) - 1e-13 * ctx.S);
        CHECK(c1 <= forward * (1.0 + 1e-15));
    }
}

TEST_CASE("bs_vega matches finite difference and decays") {
    // draws kept in a region of non-negligible vega; the difference quotient
    // noise eps*C/(2h vega) must stay under the 1e-6 band
    testutil::Rng rng(59);
    for (int i = 0; i < 50; ++i) {
        BsContext ctx{100.0,
                      rng.uniform(80.0, 125.0),
                      rng.uniform(0.4, 5.0),
                      rng.uniform(0.15, 0.8),
                      0.0,
                      rng.uniform(0.8, 1.0)};
        const double h = 1e-7;
        BsContext up = ctx, dn = ctx;
        up.v += h;
        dn.v -= h;
        const double fd = (bs_call(up) - bs_call(dn)) / (2.0 * h);
        CHECK(testutil::rel_err(bs_vega(ctx), fd) < 1e-6);
        CHECK(bs_vega(ctx) > 0.0);
    }
    CHECK(bs_vega({100.0, 100.0, 1.0, 50.0, 0.0, 1.0}) < 1e-100);

    // vega peaks near the ATM-forward strike
    const double v = 0.3, T = 2.0, bond = 0.9;
    const double k_star = 100.0 / bond * std::exp(0.5 * v * v * T);
    double peak = 0.0, peak_k = 0.0;
    for (double K = 40.0; K <= 260.0; K += 1.0) {
        const double vega = bs_vega({100.0, K, T, v, 0.0, bond});
        if (vega > peak) {
            peak = vega;
            peak_k = K;
        }
    }
    CHECK(std::abs(peak_k - k_star) <= 2.0);
}

TEST_CASE("bs_call_mmm is bs_call with the MMM bond") {
    const ModelParams p = testutil::sp500();
    for (double m : {0.7, 1.0, 1.4})
        for (double T : {0.3, 1.0, 6.0}) {
            const double K = m * p.S;
            const double v = 0.22;
            CHECK(bs_call_mmm(p, K, T, v) ==
                  bs_call({p.S, K, T, v, 0.0, zcb_price(p, T)}));
        }
    const double rhat = yield_to_maturity(p, 1.0);
    CHECK(std::abs(bs_call_mmm(p, 1.2 * p.S, 1.0, 0.0) -
                   std::max(p.S - 1.2 * p.S * std::exp(-rhat), 0.0)) < 1e-12);
}

TEST_CASE("representation formula in forward coordinates") {
    // normalized price (e^xi - 1)+ + e^xi int_0^{v sqrt T} n(xi/tau + tau/2) dtau
    testutil::Rng rng(61);
    for (int i = 0; i < 20; ++i) {
        const double S = 100.0;
        const double K = rng.uniform(60.0, 170.0);
        const double T = rng.uniform(0.2, 4.0);
        const double v = rng.uniform(0.1, 0.8);
        const double kappa = rng.uniform(0.0, 0.03);
        const double bond = rng.uniform(0.6, 1.0);
        const double xi = std::log(S / K) - std::log(bond) - kappa * T;
        const auto integrand = [&](double tau) {
            return tau == 0.0 ? 0.0 : norm_pdf(xi / tau + 0.5 * tau);
        };
        const double integral = integrate(integrand, 0.0, v * std::sqrt(T), 1e-11).value;
        const double normalized = std::max(std::exp(xi) - 1.0, 0.0) + std::exp(xi) * integral;
        const double reference = bs_call({S, K, T, v, kappa, bond}) / (K * bond);
        CHECK(std::abs(normalized - reference) < 1e-8);
    }
}
