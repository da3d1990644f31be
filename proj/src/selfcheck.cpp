#include "mmm/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "mmm/asymptotics.hpp"
#include "mmm/implied_vol.hpp"
#include "mmm/blackscholes.hpp"
#include "mmm/oracle.hpp"
#include "mmm/specfun.hpp"

namespace mmm {

namespace {

constexpr std::uint64_t kSuiteSeed = 0x5eedf00d;

double uniform(std::uint64_t& counter, double lo, double hi) {
    return lo + (hi - lo) * counter_uniform(kSuiteSeed, counter++);
}

struct Runner {
    SelfCheckReport report;

    void run(const std::string& name, const std::function<std::string()>& check) {
        CheckResult result;
        result.name = name;
        try {
            result.detail = check();
            result.passed = result.detail.empty();
        } catch (const std::exception& e) {
            result.passed = false;
            result.detail = std::string("exception: ") + e.what();
        }
        report.checks.push_back(result);
        (result.passed ? report.passed : report.failed)++;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

SelfCheckReport run_selfcheck(const ModelParams& params, int threads) {
    params.validate();
    Runner runner;
    const double S = params.S;

    runner.run("put_call_parity_1000", [&] {
        std::uint64_t ctr = 0;
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double K = uniform(ctr, 0.4 * S, 2.5 * S);
            const double T = uniform(ctr, 0.05, 20.0);
            const double lhs = call_price(params, K, T) + K * zcb_price(params, T);
            const double rhs = put_price(params, K, T) + S;
            worst = std::max(worst, std::abs(lhs - rhs) / S);
        }
        return worst <= 1e-12 ? "" : "max relative parity gap " + fmt(worst);
    });

    runner.run("arbitrage_bounds_50x50", [&] {
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) {
                const double K = 0.5 * S + (2.0 * S - 0.5 * S) * i / 49.0;
                const double T = 0.02 + (30.0 - 0.02) * j / 49.0;
                const double C = call_price(params, K, T);
                const double lower = std::max(S - K * zcb_price(params, T), 0.0);
                if (C < lower - 1e-10 * S || C > S * (1.0 + 1e-14))
                    return "violation at K=" + fmt(K) + " T=" + fmt(T);
            }
        return std::string();
    });

    runner.run("call_theta_nonnegative", [&] {
        for (int i = 0; i < 25; ++i)
            for (int j = 0; j < 25; ++j) {
                const double K = 0.5 * S + 1.5 * S * i / 24.0;
                const double T = 0.05 + 25.0 * j / 24.0;
                if (call_theta(params, K, T) < 0.0)
                    return "negative theta at K=" + fmt(K) + " T=" + fmt(T);
            }
        return std::string();
    });

    runner.run("chisq_recurrences", [&] {
        std::uint64_t ctr = 1000;
        for (int i = 0; i < 200; ++i) {
            const double x = uniform(ctr, 1e-6, 50.0);
            const double y = uniform(ctr, 1e-6, 50.0);
            const double p0 = ncx2_pdf({y, 0.0, x});
            const double p2 = ncx2_pdf({y, 2.0, x});
            const double p4 = ncx2_pdf({y, 4.0, x});
            const double p6 = ncx2_pdf({y, 6.0, x});
            if (std::abs(p4 - (y / x) * p0) > 1e-12 * std::abs(p4))
                return "p4 != (y/x) p0 at x=" + fmt(x) + " y=" + fmt(y);
            const double lhs = p6 - (y / x) * p2;
            const double rhs = -(2.0 / x) * p4;
            if (std::abs(lhs - rhs) > 1e-11 * std::max(std::abs(rhs), 1e-300))
                return "degree-6 recurrence at x=" + fmt(x) + " y=" + fmt(y);
        }
        return std::string();
    });

    runner.run("chisq_noncentrality_derivatives", [&] {
        std::uint64_t ctr = 2000;
        const double h = 1e-6;
        for (int i = 0; i < 50; ++i) {
            const double x = uniform(ctr, 0.5, 30.0);
            const double y = uniform(ctr, 0.5, 30.0);
            for (double delta : {0.0, 2.0, 4.0, 6.0}) {
                const double fd_pdf =
                    (ncx2_pdf({y, delta, x + h}) - ncx2_pdf({y, delta, x - h})) / (2.0 * h);
                const double an_pdf =
                    0.5 * ncx2_pdf({y, delta + 2.0, x}) - 0.5 * ncx2_pdf({y, delta, x});
                if (std::abs(fd_pdf - an_pdf) > 1e-5 * std::max(std::abs(an_pdf), 1e-12))
                    return "pdf/dx identity at delta=" + fmt(delta);
                const double fd_cdf =
                    (ncx2_cdf({y, delta, x + h}) - ncx2_cdf({y, delta, x - h})) / (2.0 * h);
                const double an_cdf = -ncx2_pdf({y, delta + 2.0, x});
                if (std::abs(fd_cdf - an_cdf) > 1e-5 * std::max(std::abs(an_cdf), 1e-12))
                    return "cdf/dx identity at delta=" + fmt(delta);
            }
        }
        return std::string();
    });

    runner.run("chisq_cdf_vs_quadrature_oracle", [&] {
        std::uint64_t ctr = 3000;
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double y = uniform(ctr, 0.0, 60.0);
            const double x = uniform(ctr, 0.0, 60.0);
            const double delta = 2.0 * static_cast<int>(uniform(ctr, 0.0, 3.999));
            const double got = ncx2_cdf({y, delta, x});
            const double want = ncx2_cdf_oracle({y, delta, x}, 1e-11);
            worst = std::max(worst, std::abs(got - want));
        }
        return worst <= 1e-9 ? "" : "max |cdf - oracle| = " + fmt(worst);
    });

    runner.run("chisq_cdf_ccdf_complement", [&] {
        std::uint64_t ctr = 4000;
        for (int i = 0; i < 200; ++i) {
            const double y = uniform(ctr, 0.0, 80.0);
            const double x = uniform(ctr, 0.0, 80.0);
            const double delta = 2.0 * static_cast<int>(uniform(ctr, 0.0, 3.999));
            const double c = ncx2_cdf({y, delta, x});
            const double cc = ncx2_ccdf({y, delta, x});
            if (c >= 1e-8 && cc >= 1e-8 && std::abs(c + cc - 1.0) > 1e-14)
                return "complement gap " + fmt(c + cc - 1.0);
        }
        return std::string();
    });

    runner.run("implied_vol_roundtrip", [&] {
        // strikes near the forward within a few v sqrt(T) standard deviations;
        // further out a low-vol price collapses onto intrinsic value
        std::uint64_t ctr = 5000;
        for (double v : {0.01, 0.05, 0.2, 0.5, 1.0, 3.0})
            for (int i = 0; i < 20; ++i) {
                const double T = uniform(ctr, 0.3, 3.0);
                const double width = std::min(0.7, 3.0 * v * std::sqrt(T));
                const double forward = S / zcb_price(params, T);
                const double K = forward * std::exp(uniform(ctr, -width, width));
                const double target = bs_call_mmm(params, K, T, v);
                const double got = implied_vol(params, K, T, target).vol;
                if (std::abs(got - v) > 1e-9)
                    return "roundtrip at v=" + fmt(v) + ": got " + fmt(got);
            }
        return std::string();
    });

    runner.run("implied_vol_monotone_in_target", [&] {
        std::uint64_t ctr = 6000;
        for (int i = 0; i < 50; ++i) {
            const double K = uniform(ctr, 0.6 * S, 1.8 * S);
            const double T = uniform(ctr, 0.1, 5.0);
            const double lo = std::max(S - K * zcb_price(params, T), 0.0);
            const double t1 = lo + (S - lo) * uniform(ctr, 0.05, 0.45);
            const double t2 = lo + (S - lo) * uniform(ctr, 0.55, 0.95);
            if (!(implied_vol(params, K, T, t2).vol > implied_vol(params, K, T, t1).vol))
                return "vol not increasing in target at K=" + fmt(K) + " T=" + fmt(T);
        }
        return std::string();
    });

    runner.run("limit_invariances", [&] {
        std::uint64_t ctr = 7000;
        ModelParams shifted = params;
        shifted.r += 0.05;
        for (int i = 0; i < 20; ++i) {
            const double K = uniform(ctr, 0.3 * S, 3.0 * S);
            if (small_time_limit(params, K) != small_time_limit(shifted, K))
                return "small-time limit depends on r at K=" + fmt(K);
        }
        if (large_time_limit(params) !=
            std::sqrt(2.0 * (3.0 - 2.0 * std::sqrt(2.0)) * (params.r + params.eta)))
            return std::string("large-time limit mismatch");
        return std::string();
    });

    runner.run("zcb_monotone_in_expiry", [&] {
        double prev = 1.0;
        for (int j = 1; j <= 60; ++j) {
            const double T = 0.05 * j * j;
            const double z = zcb_price(params, T);
            if (!(z > 0.0 && z <= prev))
                return "Z not nonincreasing at T=" + fmt(T);
            prev = z;
        }
        return std::string();
    });

    runner.run("chisq_series_sandwich", [&] {
        for (double T : {60.0, 100.0, 200.0})
            for (double m : {0.8, 1.0, 1.25}) {
                const Coordinates c = coordinates(params, m * S, T);
                const double xy = c.x * c.y;
                const double lower4 = std::exp(-0.5 * (c.x + c.y)) * c.y * c.y / 4.0 *
                                      (0.5 + xy / 24.0 + xy * xy / 768.0);
                const double upper4 = std::exp(-0.5 * c.x) * c.y * c.y / 4.0 *
                                      (0.5 + xy / 24.0 + xy * xy);
                const double chi4 = ncx2_cdf({c.y, 4.0, c.x});
                if (!(lower4 <= chi4 && chi4 <= upper4))
                    return "delta=4 sandwich at T=" + fmt(T) + " K=" + fmt(m * S);
                const double point = std::exp(-0.5 * c.x);
                const double lower0 =
                    point + std::exp(-0.5 * (c.x + c.y)) * (xy / 4.0 + xy * xy / 64.0);
                const double upper0 = point + std::exp(-0.5 * c.x) * (xy / 4.0 + xy * xy);
                const double chi0 = ncx2_cdf({c.y, 0.0, c.x});
                if (!(lower0 <= chi0 && chi0 <= upper0))
                    return "delta=0 sandwich at T=" + fmt(T) + " K=" + fmt(m * S);
            }
        return std::string();
    });

    runner.run("mc_quick_crosscheck", [&] {
        const McEstimate mc = mc_call_price(params, S, 1.0, 100'000, 20240131, threads);
        const double analytic = call_price(params, S, 1.0);
        const double z = (mc.mean - analytic) / mc.stderr_;
        return std::abs(z) <= 4.0 ? "" : "z-score " + fmt(z);
    });

    runner.run("rr_reduces_to_zero_rate_form", [&] {
        const double call = 0.37, K = 110.0, T = 0.01, spot = 100.0;
        const double direct = rr_estimate(spot, 0.0, 1.0, call, K, T);
        const double expected =
            std::abs(std::log(spot / K)) /
            std::sqrt(-2.0 * T * std::log(call - std::max(spot - K, 0.0)));
        if (std::abs(direct - expected) > 1e-14 * expected)
            return std::string("non-ATM reduction mismatch");
        const double atm = rr_estimate(spot, 0.0, 1.0, call, spot, T);
        const double atm_expected = std::sqrt(2.0 * M_PI) * call / (spot * std::sqrt(T));
        if (std::abs(atm - atm_expected) > 1e-14 * atm_expected)
            return std::string("ATM reduction mismatch");
        return std::string();
    });

    return runner.report;
}

void print_report(const SelfCheckReport& report, std::ostream& out) {
    for (const CheckResult& c : report.checks) {
        if (c.passed)
            out << "ok " << c.name << '\n';
        else
            out << "FAIL " << c.name << " (" << c.detail << ")\n";
    }
    out << "passed " << report.passed << "/" << report.passed + report.failed << '\n';
}

} // namespace mmm
