#pragma once
#include <optional>
#include <string>
#include <vector>

#include "mmm/errors.hpp"
#include "mmm/mmm_core.hpp"

namespace mmm {

// One expiry row of a convergence study. Failed evaluations carry the error
// code instead of a value; extreme rows probing double-precision limits are
// expected to fail first, so failures are data rather than aborts.
struct ConvergenceRow {
    double expiry = 0.0;
    std::optional<double> numeric_iv;
    std::optional<double> rr_estimate;
    std::string status = "ok"; // "ok" or an error code
};

struct LimitReport {
    double strike = 0.0;
    double limit_small = 0.0;
    double limit_large = 0.0;
    std::vector<ConvergenceRow> small_rows;
    std::vector<ConvergenceRow> large_rows;
    bool small_error_monotone = false; // |iv - limit_small| strictly decreasing
    bool large_error_monotone = false; // |iv - limit_large| strictly decreasing
};

// Small-time implied-volatility limit sqrt(alpha) ln(S/K) / (2(sqrt S - sqrt K)),
// continuous across K = S where it equals sqrt(alpha/S). Does not depend on r.
double small_time_limit(const ModelParams& params, double K);

// Large-time limit sqrt(2 (3 - 2 sqrt 2) (r + eta)); independent of strike.
double large_time_limit(const ModelParams& params);

// Model-free finite-T small-time estimator. ATM branch (|ln(K/S)| <= 1e-9):
// sqrt(2 pi) call / (K sqrt T). Otherwise |ln(S/K)| / sqrt(-2 T L) where L is
// log_excess when supplied (stable path) or ln(call - (S e^{-kappa T} - K bond)+)
// from direct subtraction.
double rr_estimate(double S, double kappa, double bond, double call, double K, double T,
                   std::optional<double> log_excess = std::nullopt);

// rr_estimate wired to the MMM prices, choosing the stable log-space path for
// non-ATM strikes.
double rr_estimate_mmm(const ModelParams& params, double K, double T);

// Tabulates implied_vol_mmm, rr_estimate and both closed-form limits over the
// given expiry grids (sorted ascending; small grid rows are evaluated in the
// given order).
LimitReport convergence_report(const ModelParams& params, double K,
                               const std::vector<double>& small_expiries,
                               const std::vector<double>& large_expiries);

} // namespace mmm
