#pragma once
#include <utility>

#include "mmm/errors.hpp"
#include "mmm/mmm_core.hpp"

namespace mmm {

// General Black-Scholes inputs: dividend yield kappa and a zero-coupon bond
// price in place of a rate curve. The MMM specialization sets kappa = 0 and
// bond = zcb_price.
struct BsContext {
    double S = 0.0;
    double K = 0.0;
    double T = 0.0;
    double v = 0.0;     // volatility per sqrt(year)
    double kappa = 0.0; // dividend yield
    double bond = 1.0;  // Z_G(T) in (0,1]

    void validate() const;
};

std::pair<double, double> bs_d1_d2(const BsContext& ctx);
double bs_call(const BsContext& ctx);
double bs_vega(const BsContext& ctx);

// S N(d1) - K e^{-rhat T} N(d2) with the MMM bond.
double bs_call_mmm(const ModelParams& params, double K, double T, double v);

} // namespace mmm
