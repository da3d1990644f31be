#include "mmm/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "mmm/implied_vol.hpp"

namespace mmm {

namespace {

constexpr double kAtmLogTol = 1e-9;

bool strictly_decreasing(const std::vector<double>& v) {
    if (v.size() < 2)
        return false;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1]))
            return false;
    return true;
}

} // namespace

double small_time_limit(const ModelParams& params, double K) {
    params.validate();
    if (!(K > 0.0))
        raise(ErrorCode::domain, "small_time_limit: K must be positive");
    // sqrt(alpha) ln(S/K) / (2 (sqrt S - sqrt K)) = sqrt(alpha/S) log1p(e)/e
    // with e = sqrt(K/S) - 1; the series form keeps the removable singularity
    // at K = S continuous to machine precision.
    const double e = std::expm1(0.5 * std::log1p((K - params.S) / params.S));
    const double base = std::sqrt(params.alpha / params.S);
    if (std::abs(e) < 1e-4) {
        const double ratio = 1.0 - e * (0.5 - e * (1.0 / 3.0 - e * 0.25));
        return base * ratio;
    }
    return base * std::log1p(e) / e;
}

double large_time_limit(const ModelParams& params) {
    params.validate();
    return std::sqrt(2.0 * (3.0 - 2.0 * std::sqrt(2.0)) * (params.r + params.eta));
}

double rr_estimate(double S, double kappa, double bond, double call, double K, double T,
                   std::optional<double> log_excess) {
    if (!(S > 0.0) || !(K > 0.0))
        raise(ErrorCode::domain, "rr_estimate: S and K must be positive");
    if (!(T > 0.0))
        raise(ErrorCode::domain, "rr_estimate: T must be positive");
    if (!(bond > 0.0 && bond <= 1.0))
        raise(ErrorCode::domain, "rr_estimate: bond must lie in (0,1]");
    const double log_moneyness = std::log(S / K);
    if (std::abs(log_moneyness) <= kAtmLogTol)
        return std::sqrt(2.0 * M_PI) * call / (K * std::sqrt(T));

    double excess_log;
    if (log_excess) {
        excess_log = *log_excess;
    } else {
        const double intrinsic = std::max(S * std::exp(-kappa * T) - K * bond, 0.0);
        const double excess = call - intrinsic;
        if (!(excess > 0.0))
            raise(ErrorCode::nonpositive_excess,
                  "rr_estimate: call does not exceed intrinsic at this precision");
        excess_log = std::log(excess);
    }
    if (excess_log >= 0.0)
        raise(ErrorCode::negative_radicand,
              "rr_estimate: excess >= 1, outside the small-time asymptotic regime");
    return std::abs(log_moneyness) / std::sqrt(-2.0 * T * excess_log);
}

double rr_estimate_mmm(const ModelParams& params, double K, double T) {
    params.validate();
    if (std::abs(std::log(params.S / K)) <= kAtmLogTol)
        return rr_estimate(params.S, 0.0, zcb_price(params, T), call_price(params, K, T), K, T);
    const double lx = log_call_excess(params, K, T);
    return rr_estimate(params.S, 0.0, zcb_price(params, T), 0.0, K, T, lx);
}

LimitReport convergence_report(const ModelParams& params, double K,
                               const std::vector<double>& small_expiries,
                               const std::vector<double>& large_expiries) {
    params.validate();
    LimitReport report;
    report.strike = K;
    report.limit_small = small_time_limit(params, K);
    report.limit_large = large_time_limit(params);

    const auto evaluate = [&](double T) {
        ConvergenceRow row;
        row.expiry = T;
        try {
            row.numeric_iv = implied_vol_mmm(params, K, T).vol;
        } catch (const Error& e) {
            row.status = to_string(e.code());
        }
        try {
            row.rr_estimate = rr_estimate_mmm(params, K, T);
        } catch (const Error& e) {
            row.status = row.status == "ok" ? to_string(e.code())
                                            : row.status + "," + to_string(e.code());
        }
        return row;
    };

    std::vector<double> small_errors, large_errors;
    for (double T : small_expiries) {
        report.small_rows.push_back(evaluate(T));
        if (report.small_rows.back().numeric_iv)
            small_errors.push_back(std::abs(*report.small_rows.back().numeric_iv - report.limit_small));
    }
    for (double T : large_expiries) {
        report.large_rows.push_back(evaluate(T));
        if (report.large_rows.back().numeric_iv)
            large_errors.push_back(std::abs(*report.large_rows.back().numeric_iv - report.limit_large));
    }
    report.small_error_monotone =
        small_errors.size() == report.small_rows.size() && strictly_decreasing(small_errors);
    report.large_error_monotone =
        large_errors.size() == report.large_rows.size() && strictly_decreasing(large_errors);
    return report;
}

} // namespace mmm
