#include "mmm/blackscholes.hpp"

#include <algorithm>
#include <cmath>

#include "mmm/specfun.hpp"

namespace mmm {

void BsContext::validate() const {
    if (!(S > 0.0) || !(K > 0.0))
        raise(ErrorCode::domain, "BsContext: S and K must be positive");
    if (!(T > 0.0))
        raise(ErrorCode::domain, "BsContext: T must be positive");
    if (!(v >= 0.0))
        raise(ErrorCode::domain, "BsContext: v must be nonnegative");
    if (!(bond > 0.0 && bond <= 1.0))
        raise(ErrorCode::domain, "BsContext: bond must lie in (0,1]");
}

std::pair<double, double> bs_d1_d2(const BsContext& ctx) {
    ctx.validate();
    if (ctx.v == 0.0)
        raise(ErrorCode::domain, "bs_d1_d2: zero volatility; use the limit price");
    const double vst = ctx.v * std::sqrt(ctx.T);
    const double forward_log =
        std::log(ctx.S / ctx.K) - std::log(ctx.bond) - ctx.kappa * ctx.T;
    const double d1 = forward_log / vst + 0.5 * vst;
    return {d1, d1 - vst};
}

double bs_call(const BsContext& ctx) {
    ctx.validate();
    const double forward_spot = ctx.S * std::exp(-ctx.kappa * ctx.T);
    if (ctx.v == 0.0)
        return std::max(forward_spot - ctx.K * ctx.bond, 0.0);
    const auto [d1, d2] = bs_d1_d2(ctx);
    return forward_spot * norm_cdf(d1) - ctx.K * ctx.bond * norm_cdf(d2);
}

double bs_vega(const BsContext& ctx) {
    const auto [d1, d2] = bs_d1_d2(ctx);
    (void)d2;
    return ctx.S * std::exp(-ctx.kappa * ctx.T) * norm_pdf(d1) * std::sqrt(ctx.T);
}

double bs_call_mmm(const ModelParams& params, double K, double T, double v) {
    return bs_call({params.S, K, T, v, 0.0, zcb_price(params, T)});
}

} // namespace mmm
