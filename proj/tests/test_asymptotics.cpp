#include <doctest.h>

#include <cmath>

#include "mmm/asymptotics.hpp"
#include "mmm/implied_vol.hpp"
#include "test_helpers.hpp"

using namespace mmm;

TEST_CASE("small time limit closed form") {
    const ModelParams p = testutil::sp500();
    CHECK(std::abs(small_time_limit(p, p.S) - 0.17831) < 1e-5);
    CHECK(testutil::rel_err(small_time_limit(p, p.S), std::sqrt(p.alpha / p.S)) < 1e-15);

    // alpha = 4S and K = 4S collapse the formula to 2 ln 2
    const ModelParams q{100.0, 0.01, 400.0, 0.05};
    CHECK(testutil::rel_err(small_time_limit(q, 400.0), 2.0 * std::log(2.0)) < 1e-13);

    // generic strike against the direct expression
    for (double m : {0.31, 0.8, 1.25, 2.7}) {
        const double K = m * p.S;
        const double direct = std::sqrt(p.alpha) * std::log(p.S / K) /
                              (2.0 * (std::sqrt(p.S) - std::sqrt(K)));
        CHECK(testutil::rel_err(small_time_limit(p, K), direct) < 1e-12);
    }
}

TEST_CASE("small time limit is continuous across the money") {
    const ModelParams p = testutil::sp500();
    const double atm = std::sqrt(p.alpha / p.S);
    CHECK(std::abs(small_time_limit(p, p.S * (1.0 + 1e-10)) - atm) <= 1e-8 * atm);
    CHECK(std::abs(small_time_limit(p, p.S * (1.0 - 1e-10)) - atm) <= 1e-8 * atm);

    // symmetry of the near-ATM expansion
    const double h = 1e-4;
    const double sum = small_time_limit(p, p.S * (1.0 + h)) +
                       small_time_limit(p, p.S * (1.0 - h));
    CHECK(testutil::rel_err(sum, 2.0 * atm) < 1e-6);
}

TEST_CASE("small time limit ignores the risk-free rate bit-exactly") {
    const ModelParams p = testutil::sp500();
    ModelParams shifted = p;
    shifted.r += 0.05;
    for (double m : {0.4, 0.9, 1.0, 1.6, 2.9})
        CHECK(small_time_limit(p, m * p.S) == small_time_limit(shifted, m * p.S));
}

TEST_CASE("large time limit closed form") {
    const ModelParams p = testutil::sp500();
    CHECK(std::abs(large_time_limit(p) - 0.17672) < 1e-5);
    CHECK(large_time_limit(p) < std::sqrt(2.0 * (p.r + p.eta)));

    // r + eta = 1/(2(3 - 2 sqrt 2)) makes the limit exactly one
    const double target_sum = 1.0 / (2.0 * (3.0 - 2.0 * std::sqrt(2.0)));
    const ModelParams unit{100.0, 0.01, 40.0, target_sum - 0.01};
    CHECK(std::abs(large_time_limit(unit) - 1.0) < 1e-14);

    // homogeneity: doubling r + eta scales the limit by sqrt 2
    const ModelParams twice{p.S, 2.0 * p.r, p.alpha, 2.0 * p.eta};
    CHECK(testutil::rel_err(large_time_limit(twice), std::sqrt(2.0) * large_time_limit(p)) <
          1e-14);
}

TEST_CASE("rr_estimate reduces to the zero-rate formula") {
    const double S = 100.0, K = 110.0, T = 0.01, call = 0.37;
    const double direct = rr_estimate(S, 0.0, 1.0, call, K, T);
    const double expected =
        std::abs(std::log(S / K)) / std::sqrt(-2.0 * T * std::log(call));
    CHECK(testutil::rel_err(direct, expected) < 1e-14);

    const double atm = rr_estimate(S, 0.0, 1.0, call, S, T);
    CHECK(testutil::rel_err(atm, std::sqrt(2.0 * M_PI) * call / (S * std::sqrt(T))) < 1e-14);

    // supplied log_excess takes the place of the direct subtraction
    const double via_log = rr_estimate(S, 0.0, 1.0, 0.0, K, T, std::log(call));
    CHECK(via_log == direct);
}

TEST_CASE("rr_estimate error paths") {
    const double S = 100.0;
    // at or below intrinsic
    try {
        rr_estimate(S, 0.0, 1.0, 10.0, 90.0, 0.01);
        FAIL("expected nonpositive_excess");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::nonpositive_excess);
    }
    // excess above one: the radicand flips sign
    try {
        rr_estimate(S, 0.0, 1.0, 12.0, 90.0, 0.01);
        FAIL("expected negative_radicand");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::negative_radicand);
    }
    CHECK_THROWS_AS(rr_estimate(S, 0.0, 1.5, 1.0, 90.0, 0.01), Error); // bad bond
}

TEST_CASE("MMM rr estimates: frozen references") {
    const ModelParams p = testutil::sp500();
    // ATM branch
    CHECK(testutil::rel_err(rr_estimate_mmm(p, p.S, 1e-2), 0.17848193) < 1e-6);
    CHECK(testutil::rel_err(rr_estimate_mmm(p, p.S, 1e-3), 0.17835228) < 1e-6);
    // log-space branch, values pinned with the 50-digit integral
    CHECK(testutil::rel_err(rr_estimate_mmm(p, 0.8 * p.S, 1e-3), 0.18761386) < 1e-7);
    CHECK(testutil::rel_err(rr_estimate_mmm(p, 0.8 * p.S, 1e-4), 0.18830707) < 1e-7);
    CHECK(testutil::rel_err(rr_estimate_mmm(p, 0.8 * p.S, 1e-5), 0.18841853) < 1e-7);
    CHECK(testutil::rel_err(rr_estimate_mmm(p, 1.25 * p.S, 1e-3), 0.16794494) < 1e-7);
    CHECK(testutil::rel_err(rr_estimate_mmm(p, 1.25 * p.S, 1e-4), 0.16844918) < 1e-7);
    CHECK(testutil::rel_err(rr_estimate_mmm(p, 1.25 * p.S, 1e-5), 0.16852971) < 1e-7);
}

TEST_CASE("MMM rr estimates approach the small-time limit") {
    const ModelParams p = testutil::sp500();
    // ATM
    {
        const double limit = small_time_limit(p, p.S);
        double prev = 1e9;
        for (double T : {1e-2, 1e-3, 1e-4}) {
            const double err = std::abs(rr_estimate_mmm(p, p.S, T) - limit);
            CHECK(err < prev);
            prev = err;
        }
    }
    // OTM and ITM through the log-space path
    for (double m : {0.8, 1.2}) {
        const double K = m * p.S;
        const double limit = small_time_limit(p, K);
        double prev = 1e9;
        for (double T : {1e-3, 1e-4, 1e-5}) {
            const double err = std::abs(rr_estimate_mmm(p, K, T) - limit);
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("convergence report over both grids") {
    const ModelParams p = testutil::sp500();
    const LimitReport rep =
        convergence_report(p, p.S, {1e-2, 1e-3, 1e-4}, {50.0, 100.0, 200.0, 400.0});
    CHECK(rep.strike == p.S);
    CHECK(testutil::rel_err(rep.limit_small, std::sqrt(p.alpha / p.S)) < 1e-14);
    CHECK(rep.small_rows.size() == 3);
    CHECK(rep.large_rows.size() == 4);
    for (const auto& row : rep.small_rows) {
        CHECK(row.status == "ok");
        CHECK(row.numeric_iv.has_value());
        CHECK(row.rr_estimate.has_value());
    }
    CHECK(rep.small_error_monotone);
    CHECK(rep.large_error_monotone);

    // per-row failures are recorded as data, not thrown
    const LimitReport degenerate = convergence_report(p, p.S, {1e-2}, {8000.0});
    CHECK(degenerate.large_rows.size() == 1);
    CHECK(degenerate.large_rows[0].status != "ok");
    CHECK(!degenerate.large_rows[0].numeric_iv.has_value());
}

TEST_CASE("error sequence against the large-time limit can cross over") {
    // at K = 2S the implied vol straddles the limit, so the error sequence is
    // not monotone; the report flags it rather than failing
    const ModelParams p = testutil::sp500();
    const LimitReport rep = convergence_report(p, 2.0 * p.S, {1e-2}, {50.0, 100.0, 200.0, 400.0});
    CHECK(!rep.large_error_monotone);
    for (const auto& row : rep.large_rows) {
        CHECK(row.numeric_iv.has_value());
        // the small-time estimator is out of regime at these expiries and its
        // column reports that instead of a number
        CHECK(!row.rr_estimate.has_value());
        CHECK(row.status == "negative_radicand");
    }
}

TEST_CASE("skew range across expiries") {
    const ModelParams p = testutil::sp500();
    const auto skew_range = [&](double T) {
        double lo = 1e9, hi = -1e9;
        for (int i = 0; i <= 12; ++i) {
            const double K = 0.5 * p.S + 1.5 * p.S * i / 12.0;
            const double v = implied_vol_mmm(p, K, T).vol;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    };
    const double r1 = skew_range(1.0);
    const double r5 = skew_range(5.0);
    const double r20 = skew_range(20.0);
    const double r100 = skew_range(100.0);
    // the skew flattens monotonically once past its bulge near T ~ 5
    CHECK(r5 > r20);
    CHECK(r20 > r100);
    // near-term behavior at this calibration: the range still widens from
    // T = 1 to T = 5 before the flattening sets in
    CHECK(r1 < r5);
}
