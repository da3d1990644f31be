#pragma once
#include "mmm/errors.hpp"
#include "mmm/mmm_core.hpp"

namespace mmm {

struct IvResult {
    double vol = 0.0;
    int iterations = 0;
    double residual = 0.0; // price error at the solution
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

// Invert a call price to Black-Scholes implied volatility under the MMM bond
// and zero dividend yield. target_price must lie strictly between
// (S - K e^{-rhat T})_+ and S; values at a bound raise bounds_low/bounds_high
// with a diagnostic naming the bound.
IvResult implied_vol(const ModelParams& params, double K, double T, double target_price);

// Implied volatility of the MMM call price itself. The residual is formed in
// whichever of three algebraically cancelled representations keeps its pieces
// naturally small (complement, forward-OTM, excess-ITM), so the root stays
// resolvable both where C agrees with S to a double ulp and where C is
// hundreds of orders below S.
IvResult implied_vol_mmm(const ModelParams& params, double K, double T);

} // namespace mmm
