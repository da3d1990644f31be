#include "mmm/mmm_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmm/quadrature.hpp"
#include "mmm/specfun.hpp"

namespace mmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_expiry_range(const ModelParams& params, double T) {
    if (!(T >= 0.0))
        raise(ErrorCode::domain, "expiry must be nonnegative");
    if (T * params.eta > kMaxExpiryEtaProduct)
        raise(ErrorCode::expiry_range, "expiry beyond 650/eta cap");
}

void check_strike(double K) {
    if (!(K > 0.0))
        raise(ErrorCode::domain, "strike must be positive");
}

bool degenerate(double T) { return T <= kDegenerateExpiry; }

double intrinsic_call(const ModelParams& params, double K) {
    return std::max(params.S - K, 0.0);
}

// Positive-integrand representation of the excess over intrinsic value:
//   C - (S - K Z)_+ = S int_y^inf (1 - y/w) p(w;4,x) dw        (OTM, K > S)
//   P              = S int_0^y  (y/w - 1) p(w;4,x) dw          (ITM, K < S)
// integrated in u = sqrt(w) with log-sum-exp scaling so the result is exact
// in log space even when the value itself is far below double range.
double log_excess_integral(const Coordinates& c, bool upper) {
    const double sy = std::sqrt(c.y);
    const double sx = std::sqrt(c.x);

    const auto log_integrand = [&](double u) {
        const double w = u * u;
        if (w <= 0.0 || u == sy)
            return -kInf;
        const double moneyness = upper ? (1.0 - c.y / w) : (c.y / w - 1.0);
        if (moneyness <= 0.0)
            return -kInf;
        const double lp = ncx2_log_pdf({w, 4.0, c.x});
        return std::log(moneyness) + lp + std::log(2.0 * u);
    };

    // integration window: the log-integrand sits under the parabola
    // -(u - sx)^2/2, so it has dropped 900 e-folds below its value at sy
    // once |u - sx| reaches sqrt(rate^2 + 1800) with rate = |sy - sx|
    const double rate = std::abs(sy - sx);
    const double span = std::sqrt(rate * rate + 1800.0) - rate + 2.0;

    // the integrand peaks within ~1/rate of sy, so the panels must grow
    // geometrically away from sy or the Gauss-Kronrod nodes undersample the
    // peak at small T
    const double char_width = 1.0 / (rate + 2.0 / span);
    std::vector<double> offsets{0.0};
    for (double d = char_width / 16.0; d < span; d *= 1.7)
        offsets.push_back(d);
    offsets.push_back(span);

    std::vector<double> pts;
    double lo_clip = upper ? sy : std::max(0.0, sy - span);
    for (double d : offsets) {
        const double u = upper ? sy + d : std::max(lo_clip, sy - d);
        pts.push_back(u);
    }
    if (!upper)
        std::reverse(pts.begin(), pts.end());

    double peak = -kInf;
    for (double u : pts)
        peak = std::max(peak, log_integrand(u));
    // ladder midpoints refine the scan near the peak
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        peak = std::max(peak, log_integrand(0.5 * (pts[i] + pts[i + 1])));
    if (peak == -kInf)
        raise(ErrorCode::nonpositive_excess, "call price does not exceed intrinsic value");

    const auto scaled = [&](double u) {
        const double g = log_integrand(u);
        return g == -kInf ? 0.0 : std::exp(g - peak);
    };
    // two-phase: a coarse pass pins the scale, then a relative-tolerance pass
    // (an a-priori absolute tolerance can sit below the error-estimator noise
    // floor and spin the refinement forever)
    const QuadResult coarse = integrate_segmented(scaled, pts, 1e-4 * char_width, 400'000,
                                                  /*throw_on_budget=*/false);
    if (!(coarse.value > 0.0))
        raise(ErrorCode::nonpositive_excess, "call price does not exceed intrinsic value");
    const QuadResult q = integrate_segmented(scaled, pts, 1e-13 * coarse.value, 2'000'000,
                                             /*throw_on_budget=*/false);
    if (!(q.value > 0.0))
        raise(ErrorCode::nonpositive_excess, "call price does not exceed intrinsic value");
    if (q.error > 1e-9 * q.value)
        raise(ErrorCode::no_convergence, "log_call_excess: quadrature did not converge");
    return peak + std::log(q.value);
}

} // namespace

void ModelParams::validate() const {
    if (!(S > 0.0))
        raise(ErrorCode::config, "S must be positive");
    if (!(alpha > 0.0))
        raise(ErrorCode::config, "alpha must be positive");
    if (!(eta > 0.0))
        raise(ErrorCode::config, "eta must be positive");
    if (!(r >= 0.0))
        raise(ErrorCode::config, "r must be nonnegative");
}

PhiBundle phi_transform(const ModelParams& params, double T) {
    check_expiry_range(params, T);
    PhiBundle b;
    b.phi = params.alpha / (4.0 * params.eta) * std::expm1(params.eta * T);
    b.phi_T = 0.25 * params.alpha * std::exp(params.eta * T);
    b.phi_TT = params.eta * b.phi_T;
    return b;
}

Coordinates coordinates(const ModelParams& params, double K, double T) {
    check_strike(K);
    if (degenerate(T))
        raise(ErrorCode::degenerate_expiry, "expiry at or below degenerate threshold 1e-12");
    const PhiBundle b = phi_transform(params, T);
    Coordinates c;
    c.phi = b.phi;
    c.phi_T = b.phi_T;
    c.phi_TT = b.phi_TT;
    c.x = params.S / b.phi;
    c.x_T = -params.S * b.phi_T / (b.phi * b.phi);
    c.x_TT = 2.0 * params.S * b.phi_T * b.phi_T / (b.phi * b.phi * b.phi) -
             params.S * b.phi_TT / (b.phi * b.phi);
    const double disc_strike = K * std::exp(-params.r * T);
    c.y = disc_strike / b.phi;
    c.y_T = -c.y * (params.r + b.phi_T / b.phi);
    return c;
}

CallComplement call_complement(const ModelParams& params, double K, double T) {
    const Coordinates c = coordinates(params, K, T);
    CallComplement out;
    out.chi4 = ncx2_cdf({c.y, 4.0, c.x});
    out.chi0_cont = ncx2_cdf0_continuous(c.y, c.x);
    out.discount = std::exp(-params.r * T);
    out.zcb = out.discount * (-std::expm1(-0.5 * c.x));
    return out;
}

double call_price(const ModelParams& params, double K, double T) {
    check_strike(K);
    if (degenerate(T))
        return intrinsic_call(params, K);
    const Coordinates c = coordinates(params, K, T);
    return params.S * ncx2_ccdf({c.y, 4.0, c.x}) -
           K * std::exp(-params.r * T) * ncx2_ccdf({c.y, 0.0, c.x});
}

double put_price(const ModelParams& params, double K, double T) {
    check_strike(K);
    if (degenerate(T))
        return std::max(K - params.S, 0.0);
    const Coordinates c = coordinates(params, K, T);
    const double p = K * std::exp(-params.r * T) * ncx2_cdf0_continuous(c.y, c.x) -
                     params.S * ncx2_cdf({c.y, 4.0, c.x});
    return std::max(p, 0.0);
}

double zcb_price(const ModelParams& params, double T) {
    if (degenerate(T))
        return 1.0;
    check_expiry_range(params, T);
    const double x = params.S / phi_transform(params, T).phi;
    return std::exp(-params.r * T) * (-std::expm1(-0.5 * x));
}

double zcb_theta(const ModelParams& params, double T) {
    const Coordinates c = coordinates(params, params.S, T);
    const double disc = std::exp(-params.r * T);
    return -params.r * disc * (-std::expm1(-0.5 * c.x)) +
           0.5 * c.x_T * disc * std::exp(-0.5 * c.x);
}

double yield_to_maturity(const ModelParams& params, double T) {
    if (!(T > 0.0))
        raise(ErrorCode::domain, "yield_to_maturity: T must be positive");
    check_expiry_range(params, T);
    const double x = params.S / phi_transform(params, T).phi;
    return params.r - std::log(-std::expm1(-0.5 * x)) / T;
}

double call_theta(const ModelParams& params, double K, double T) {
    const Coordinates c = coordinates(params, K, T);
    const double p4 = ncx2_pdf({c.y, 4.0, c.x});
    const double ccdf0 = ncx2_ccdf({c.y, 0.0, c.x});
    return -2.0 * params.S / c.x * c.x_T * p4 +
           params.r * K * std::exp(-params.r * T) * ccdf0;
}

double call_theta2(const ModelParams& params, double K, double T) {
    const Coordinates c = coordinates(params, K, T);
    const double p0 = ncx2_pdf({c.y, 0.0, c.x});
    const double p2 = ncx2_pdf({c.y, 2.0, c.x});
    const double p4 = ncx2_pdf({c.y, 4.0, c.x});
    const double p6 = ncx2_pdf({c.y, 6.0, c.x});
    const double ccdf0 = ncx2_ccdf({c.y, 0.0, c.x});
    const double disc_strike = params.r * K * std::exp(-params.r * T);

    // eta^2 e^{eta T}/(e^{eta T}-1)^2 and eta e^{eta T}/(e^{eta T}-1)
    const double em = std::expm1(params.eta * T);
    const double eT = em + 1.0;
    const double ratio1 = params.eta * params.eta * eT / (em * em);
    const double ratio2 = params.eta * eT / em;

    return -2.0 * params.S * ratio1 * p4 +
           params.S * ratio2 * ((p2 - p4) * c.y_T + (p6 - p4) * c.x_T) -
           params.r * disc_strike * ccdf0 +
           disc_strike * (-p0 * c.y_T + p2 * c.x_T);
}

bool quote_within_bounds(const ModelParams& params, const OptionQuote& quote) {
    check_strike(quote.strike);
    if (!(quote.expiry > 0.0))
        raise(ErrorCode::domain, "quote_within_bounds: expiry must be positive");
    const double discounted_strike = quote.strike * zcb_price(params, quote.expiry);
    if (quote.kind == OptionKind::call)
        return quote.price >= std::max(params.S - discounted_strike, 0.0) &&
               quote.price <= params.S;
    return quote.price >= std::max(discounted_strike - params.S, 0.0) &&
           quote.price <= discounted_strike;
}

double log_call_excess(const ModelParams& params, double K, double T) {
    check_strike(K);
    if (!(T > 0.0))
        raise(ErrorCode::domain, "log_call_excess: T must be positive");
    if (std::abs(K - params.S) <= 1e-9 * params.S)
        raise(ErrorCode::atm_strike,
              "log_call_excess: strike indistinguishable from spot; use the ATM branch");
    const Coordinates c = coordinates(params, K, T);
    return std::log(params.S) + log_excess_integral(c, /*upper=*/K > params.S);
}

} // namespace mmm
