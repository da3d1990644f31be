#include "mmm/implied_vol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mmm/blackscholes.hpp"
#include "mmm/specfun.hpp"

namespace mmm {

namespace {

constexpr double kPriceTol = 1e-12;  // relative to S
constexpr double kVolStepTol = 1e-12;
constexpr double kBracketLo = 1e-9;
constexpr double kBracketHi0 = 5.0;
constexpr double kBracketHiMax = 5e3;
constexpr int kMaxIterations = 200;
constexpr double kVegaFloor = 1e-300;

// Safeguarded Newton on a residual that is increasing in v and vanishes at
// the root, expressed in units of price/S. Falls back to bisection whenever a
// Newton step leaves the bracket or vega degenerates.
IvResult solve_monotone(const std::function<double(double)>& resid,
                        const std::function<double(double)>& vega_over_s) {
    double lo = kBracketLo;
    double hi = kBracketHi0;
    double f_lo = resid(lo);
    int iterations = 0;

    if (f_lo >= 0.0) {
        // target at the zero-volatility limit already
        return {lo, 1, f_lo, lo, lo};
    }
    double f_hi = resid(hi);
    while (f_hi < 0.0 && hi < kBracketHiMax) {
        lo = hi;
        f_lo = f_hi;
        hi = std::min(hi * 4.0, kBracketHiMax);
        f_hi = resid(hi);
        ++iterations;
    }
    if (f_hi < 0.0)
        raise(ErrorCode::no_convergence, "implied_vol: residual not bracketed by v = 5e3");

    double v = std::clamp(0.2, lo, hi);
    double f = resid(v);
    while (iterations++ < kMaxIterations) {
        if (f < 0.0)
            lo = v;
        else
            hi = v;
        const double width = hi - lo;
        if (std::abs(f) <= kPriceTol &&
            (width <= kVolStepTol || width <= 8.0 * std::numeric_limits<double>::epsilon() * v))
            return {v, iterations, f, lo, hi};

        double v_next = 0.5 * (lo + hi);
        // Newton only where the residual still carries magnitude information;
        // below the price tolerance its sign is all that is reliable, so the
        // bracket is driven by bisection there.
        const double vega = vega_over_s(v);
        if (std::abs(f) > kPriceTol && vega > kVegaFloor) {
            const double newton = v - f / vega;
            if (newton > lo && newton < hi && newton != v)
                v_next = newton;
        }
        if (v_next == lo || v_next == hi) {
            // bracket collapsed to adjacent doubles
            return {v, iterations, f, lo, hi};
        }
        v = v_next;
        f = resid(v);
    }
    raise(ErrorCode::no_convergence, "implied_vol: iteration budget exhausted");
}

struct BsComplementTerms {
    double n_bar_d1 = 0.0; // 1 - N(d1)
    double n_d2 = 0.0;     // N(d2)
    double n_bar_d2 = 0.0; // 1 - N(d2)
};

BsComplementTerms bs_complement(const ModelParams& params, double K, double T, double Z,
                                double v) {
    const auto [d1, d2] = bs_d1_d2({params.S, K, T, v, 0.0, Z});
    return {norm_ccdf(d1), norm_cdf(d2), norm_ccdf(d2)};
}

} // namespace

IvResult implied_vol_mmm(const ModelParams& params, double K, double T) {
    params.validate();
    const CallComplement cc = call_complement(params, K, T);
    const double ks = K / params.S;
    const double r_call = ks * cc.zcb + cc.chi4 - ks * cc.discount * cc.chi0_cont; // 1 - C/S
    const auto vega_over_s = [&](double v) {
        return bs_vega({params.S, K, T, v, 0.0, cc.zcb}) / params.S;
    };

    // Three representations of the residual (bs(v) - C)/S, each exact where
    // its pieces are the naturally small quantities:
    //  - complement: C within a ulp of S (large T, deep ITM) -- the common
    //    (K/S) Z term of both prices cancels symbolically;
    //  - forward-OTM: C itself hundreds of orders below S;
    //  - excess-ITM: C close to a positive intrinsic value -- the intrinsic
    //    cancels symbolically and the put carries the stable excess.
    IvResult r;
    if (r_call < 0.5) {
        const auto residual = [&](double v) {
            const BsComplementTerms bs = bs_complement(params, K, T, cc.zcb, v);
            return cc.chi4 - ks * cc.discount * cc.chi0_cont - bs.n_bar_d1 +
                   ks * cc.zcb * bs.n_bar_d2;
        };
        r = solve_monotone(residual, vega_over_s);
    } else if (ks * cc.zcb >= 1.0) {
        const double c_over_s = call_price(params, K, T) / params.S;
        const auto residual = [&](double v) {
            const auto [d1, d2] = bs_d1_d2({params.S, K, T, v, 0.0, cc.zcb});
            return norm_cdf(d1) - ks * cc.zcb * norm_cdf(d2) - c_over_s;
        };
        r = solve_monotone(residual, vega_over_s);
    } else {
        const double excess = put_price(params, K, T) / params.S; // C - (S - K Z)
        const auto residual = [&](double v) {
            const BsComplementTerms bs = bs_complement(params, K, T, cc.zcb, v);
            return ks * cc.zcb * bs.n_bar_d2 - bs.n_bar_d1 - excess;
        };
        r = solve_monotone(residual, vega_over_s);
    }
    r.residual *= params.S;
    return r;
}

IvResult implied_vol(const ModelParams& params, double K, double T, double target_price) {
    params.validate();
    if (!(K > 0.0) || !(T > 0.0))
        raise(ErrorCode::domain, "implied_vol: K and T must be positive");
    const double Z = zcb_price(params, T);
    const double lower = std::max(params.S - K * Z, 0.0);
    if (target_price < lower)
        raise(ErrorCode::bounds_low, "implied_vol: target below the lower arbitrage bound (S - K Z)+");
    if (target_price == lower)
        raise(ErrorCode::bounds_low, "implied_vol: target at the lower arbitrage bound (v = 0 limit)");
    if (target_price > params.S)
        raise(ErrorCode::bounds_high, "implied_vol: target above the upper arbitrage bound S");
    if (target_price == params.S)
        raise(ErrorCode::bounds_high, "implied_vol: target at the upper arbitrage bound (v -> inf limit)");

    const double ks = K / params.S;
    const auto vega_over_s = [&](double v) {
        return bs_vega({params.S, K, T, v, 0.0, Z}) / params.S;
    };
    IvResult r;
    if (target_price > 0.5 * params.S) {
        const double rt = (params.S - target_price) / params.S; // 1 - target/S
        const auto residual = [&](double v) {
            const BsComplementTerms bs = bs_complement(params, K, T, Z, v);
            return rt - bs.n_bar_d1 - ks * Z * bs.n_d2;
        };
        r = solve_monotone(residual, vega_over_s);
    } else if (ks * Z >= 1.0) {
        const double ct = target_price / params.S;
        const auto residual = [&](double v) {
            const auto [d1, d2] = bs_d1_d2({params.S, K, T, v, 0.0, Z});
            return norm_cdf(d1) - ks * Z * norm_cdf(d2) - ct;
        };
        r = solve_monotone(residual, vega_over_s);
    } else {
        const double excess = std::max(target_price / params.S - (1.0 - ks * Z), 0.0);
        const auto residual = [&](double v) {
            const BsComplementTerms bs = bs_complement(params, K, T, Z, v);
            return ks * Z * bs.n_bar_d2 - bs.n_bar_d1 - excess;
        };
        r = solve_monotone(residual, vega_over_s);
    }
    r.residual *= params.S;
    return r;
}

} // namespace mmm
