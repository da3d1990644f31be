#pragma once
#include <string>

#include "mmm/errors.hpp"

namespace mmm {

// Calibrated parameter set: index level S, risk-free rate r, scale alpha of
// the growth optimal portfolio, net growth rate eta.
struct ModelParams {
    double S = 0.0;
    double r = 0.0;
    double alpha = 0.0;
    double eta = 0.0;

    void validate() const;
};

enum class OptionKind { call, put };

struct OptionQuote {
    double strike = 0.0;
    double expiry = 0.0;
    double price = 0.0;
    OptionKind kind = OptionKind::call;
};

// Checks the quote's price against the arbitrage bounds of its kind:
// (S - K Z)+ <= call <= S and (K Z - S)+ <= put <= K Z.
bool quote_within_bounds(const ModelParams& params, const OptionQuote& quote);

// Time transform phi(T) = alpha/(4 eta) (e^{eta T} - 1) and its derivatives.
struct PhiBundle {
    double phi = 0.0;
    double phi_T = 0.0;
    double phi_TT = 0.0;
};

// Pricing coordinates x = S/phi, y = K e^{-rT}/phi with analytic T-derivatives.
struct Coordinates {
    double phi = 0.0;
    double phi_T = 0.0;
    double phi_TT = 0.0;
    double x = 0.0;
    double y = 0.0;
    double x_T = 0.0;
    double y_T = 0.0;
    double x_TT = 0.0;
};

// Below this expiry prices collapse to intrinsic value (phi underflows x,y).
constexpr double kDegenerateExpiry = 1e-12;
// Hard large-T cap: T <= 650/eta keeps every e^{eta T} combination in range.
constexpr double kMaxExpiryEtaProduct = 650.0;

PhiBundle phi_transform(const ModelParams& params, double T);
Coordinates coordinates(const ModelParams& params, double K, double T);

double call_price(const ModelParams& params, double K, double T);
double put_price(const ModelParams& params, double K, double T);
double zcb_price(const ModelParams& params, double T);
double zcb_theta(const ModelParams& params, double T);
double yield_to_maturity(const ModelParams& params, double T);

// Analytic time derivatives of the call. call_theta2 is documented for
// T in [1e-8, 650/eta]; below that the leading term cancellation exceeds
// double precision.
double call_theta(const ModelParams& params, double K, double T);
double call_theta2(const ModelParams& params, double K, double T);

// ln(C(K,T) - (S - K Z(T))_+) evaluated stably in log space: the OTM side
// (K > S) integrates the positive payoff-tail integrand for ln C, the ITM
// side (K < S) returns ln P via put-call parity. Strikes within 1e-9 S of
// spot are rejected (the ATM estimator uses the other branch of the
// small-time formula).
double log_call_excess(const ModelParams& params, double K, double T);

// Normalized complement representation C = S (1 - .): the pieces of
// 1 - C/S as relative-accurate small positive quantities. This is what the
// implied-vol solver consumes at large T, where C agrees with S to within a
// double ulp.
struct CallComplement {
    double chi4 = 0.0;       // chi^2(y; 4, x)
    double chi0_cont = 0.0;  // chi^2(y; 0, x) - e^{-x/2}
    double discount = 0.0;   // e^{-rT}
    double zcb = 0.0;        // Z(T)
};

CallComplement call_complement(const ModelParams& params, double K, double T);

} // namespace mmm
