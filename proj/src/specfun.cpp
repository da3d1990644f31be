#include "mmm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmm/quadrature.hpp"

namespace mmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogDblMax = 709.782712893384;
// Below this log value even a subnormal double rounds to zero.
constexpr double kLogTiny = -745.0;
constexpr double kSeriesAsymCrossover = 30.0;

int checked_order(int nu) {
    if (nu < -1 || nu > 3)
        raise(ErrorCode::domain, "bessel_i: order must be in {-1,0,1,2,3}");
    return nu == -1 ? 1 : nu;
}

// Ascending series sum_k (z/2)^{2k+nu} / (k! (k+nu)!), unscaled.
double bessel_series(int nu, double z) {
    const double q = 0.25 * z * z;
    double term = 1.0;
    for (int m = 1; m <= nu; ++m)
        term *= 0.5 * z / m;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + nu));
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum;
}

// Large-argument expansion of exp(-z) I_nu(z); valid for z > ~30 at the
// orders used here (terms fall below 1e-15 before diverging).
double bessel_asymptotic_scaled(int nu, double z) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = kInf;
    for (int k = 1; k <= 40; ++k) {
        const double factor = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
        term *= -factor;
        if (std::abs(term) >= prev)
            break;
        sum += term;
        prev = std::abs(term);
        if (std::abs(term) < 1e-17 * std::abs(sum))
            break;
    }
    return sum / std::sqrt(2.0 * M_PI * z);
}

int delta_to_shape(double delta) {
    const double d = delta / 2.0;
    const double rounded = std::nearbyint(d);
    if (delta < 0.0 || std::abs(d - rounded) > 1e-9 || rounded > 4.0)
        raise(ErrorCode::domain, "noncentral chi-square: delta must be one of {0,2,4,6,8}");
    return static_cast<int>(rounded);
}

void check_args(const ChiSquareArgs& args) {
    if (!(args.y >= 0.0) || !(args.x >= 0.0))
        raise(ErrorCode::domain, "noncentral chi-square: y and x must be nonnegative");
}

// Stirling tail ln Gamma(j+1) - [(j+1/2) ln j - j + ln(2 pi)/2].
double stirling_correction(double j) {
    const double j2 = j * j;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * j2)) / j2) / j;
}

double gamma_p_series(std::int64_t k, double z);
double gamma_q_contfrac(std::int64_t k, double z);

// Kahan-compensated accumulator; the mixture sweeps run to ~1e6 terms and an
// uncompensated chain would drift past the 1e-14 complement tolerance.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double t = v - carry;
        const double s = sum + t;
        carry = (s - sum) - t;
        sum = s;
    }
    double value() const { return sum; }
};

// Poisson-mixture engine shared by cdf/ccdf/continuous-part evaluation.
// chi2(y; 2d, x) = sum_j pois(j; x/2) P(d+j, y/2) and complementarily with Q.
// Sums run outward from the Poisson mode with multiplicative recursions; the
// directional G updates that subtract are clamped at zero, which only affects
// terms already negligible in the accumulated total.
double mixture_sum(int d, double y, double x, bool upper, bool skip_point_mass) {
    const double mu = 0.5 * x;
    const double lam = 0.5 * y;
    const double rel_eps = 1e-17;
    const double abs_floor = 1e-322;

    const std::int64_t j0 = std::max<std::int64_t>(static_cast<std::int64_t>(mu), 0);
    double w0 = std::exp(log_poisson_pmf(j0, mu));
    const std::int64_t k0 = d + j0;
    // anchor the sweeps on an exactly complementary (P,Q) pair: the side that
    // is small gets its dedicated route, the other side is 1 minus it, so the
    // cdf and ccdf recursions cancel to a ulp instead of drifting apart
    double g0;
    if (k0 == 0) {
        g0 = upper ? 0.0 : 1.0;
    } else if (lam < static_cast<double>(k0) + 1.0) {
        const double p = gamma_p_series(k0, lam);
        g0 = upper ? 1.0 - p : p;
    } else {
        const double q = gamma_q_contfrac(k0, lam);
        g0 = upper ? q : 1.0 - q;
    }
    double t0 = std::exp(log_poisson_pmf(k0, lam));

    Kahan sum;
    if (!(skip_point_mass && j0 == 0))
        sum.add(w0 * g0);

    // downward sweep (j0-1 .. 0): P grows, Q shrinks
    {
        double w = w0, t = t0;
        Kahan g;
        g.add(g0);
        for (std::int64_t j = j0 - 1; j >= 0; --j) {
            w *= static_cast<double>(j + 1) / mu;
            const std::int64_t k = d + j;
            t *= static_cast<double>(k + 1) / lam;
            // t grows toward k = lam; revive it if the anchor underflowed
            if (t == 0.0 && static_cast<double>(k) > lam)
                t = std::exp(log_poisson_pmf(k, lam));
            g.add(upper ? -t : t);
            double gv = g.value();
            if (upper && gv < 1e-8 * t) {
                // the subtraction annihilated Q; re-anchor it fresh
                gv = k == 0 ? 0.0 : gamma_q(k, lam);
                g = Kahan{};
                g.add(gv);
            }
            if (upper && k == 0) { g = Kahan{}; gv = 0.0; }
            if (!upper && (k == 0 || gv > 1.0)) { g = Kahan{}; g.add(1.0); gv = 1.0; }
            if (!(skip_point_mass && j == 0))
                sum.add(w * gv);
            const double ratio = static_cast<double>(j) / mu;
            if (ratio < 0.999) {
                const double bound = w * (upper ? gv : 1.0) / (1.0 - ratio);
                if (bound < rel_eps * sum.value() + abs_floor)
                    break;
            }
        }
    }
    // upward sweep (j0+1 ..): P shrinks, Q grows
    {
        double w = w0, t = t0;
        Kahan g;
        g.add(g0);
        for (std::int64_t j = j0 + 1;; ++j) {
            w *= mu / static_cast<double>(j);
            const std::int64_t k = d + j;
            // the G update consumes t(k-1), which grows toward k-1 = lam;
            // revive it if the anchor underflowed
            if (t == 0.0 && static_cast<double>(k - 1) < lam)
                t = std::exp(log_poisson_pmf(k - 1, lam));
            g.add(upper ? t : -t);
            double gv = g.value();
            if (upper && gv > 1.0) { g = Kahan{}; g.add(1.0); gv = 1.0; }
            if (!upper && gv < 1e-8 * t) {
                // the subtraction annihilated P; re-anchor it fresh
                gv = gamma_p(k, lam);
                g = Kahan{};
                g.add(gv);
            }
            t *= lam / static_cast<double>(k);
            sum.add(w * gv);
            const double ratio = mu / static_cast<double>(j + 1);
            if (ratio < 0.999) {
                const double bound = w * (upper ? 1.0 : gv) / (1.0 - ratio);
                if (bound < rel_eps * sum.value() + abs_floor)
                    break;
            }
        }
    }
    return std::min(sum.value(), 1.0);
}

// Log-slope bound of the density right of y; positive value rho means
// p(w) <= p(y) exp(-rho (w-y)) for w >= y, so the upper tail is at most
// p(y)/rho.
double upper_tail_decay_rate(int d, double y, double x) {
    if (y <= 0.0)
        return -1.0;
    const double delta = 2.0 * d;
    return 0.5 * (1.0 - std::sqrt(x / y)) - std::max(delta - 2.0, 0.0) / (4.0 * y);
}

} // namespace

double log_poisson_pmf(std::int64_t j, double mu) {
    if (j < 0)
        return -kInf;
    if (mu == 0.0)
        return j == 0 ? 0.0 : -kInf;
    const double jd = static_cast<double>(j);
    if (j < 30)
        return -mu + jd * std::log(mu) - std::lgamma(jd + 1.0);
    // j ln(mu/j) + (j - mu) evaluated through log1p so that the huge
    // intermediate terms of the naive lgamma form never meet.
    const double del = jd - mu;
    const double core = -jd * std::log1p(del / mu) + del;
    return core - 0.5 * std::log(2.0 * M_PI * jd) - stirling_correction(jd);
}

namespace {

double gamma_p_series(std::int64_t k, double z) {
    // P(k,z) = pois(k;z) * sum_{n>=0} z^n / ((k+1)...(k+n)), z < k+1
    const double kd = static_cast<double>(k);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n < 10'000'000; ++n) {
        term *= z / (kd + n);
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    const double lp = log_poisson_pmf(k, z);
    return (lp < kLogTiny - 40.0) ? 0.0 : std::exp(lp) * sum;
}

double gamma_q_contfrac(std::int64_t k, double z) {
    // Q(k,z) = k pois(k;z) * CF, z >= k+1 (modified Lentz)
    const double kd = static_cast<double>(k);
    const double tiny = 1e-300;
    double b = z + 1.0 - kd;
    double c = 1.0 / tiny;
    double dd = 1.0 / b;
    double h = dd;
    for (int i = 1; i < 10'000'000; ++i) {
        const double an = -static_cast<double>(i) * (i - kd);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < tiny) dd = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        dd = 1.0 / dd;
        const double del = dd * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            break;
    }
    const double lp = log_poisson_pmf(k, z);
    return (lp < kLogTiny - 40.0) ? 0.0 : kd * std::exp(lp) * h;
}

} // namespace

double gamma_p(std::int64_t k, double z) {
    if (k < 0)
        raise(ErrorCode::domain, "gamma_p: negative shape");
    if (k == 0)
        return 1.0;
    if (z <= 0.0)
        return 0.0;
    if (z < static_cast<double>(k) + 1.0)
        return gamma_p_series(k, z);
    return 1.0 - gamma_q_contfrac(k, z);
}

double gamma_q(std::int64_t k, double z) {
    if (k < 0)
        raise(ErrorCode::domain, "gamma_q: negative shape");
    if (k == 0)
        return 0.0;
    if (z <= 0.0)
        return 1.0;
    if (z < static_cast<double>(k) + 1.0)
        return 1.0 - gamma_p_series(k, z);
    return gamma_q_contfrac(k, z);
}

double bessel_i_scaled(int nu, double z) {
    const int n = checked_order(nu);
    if (!(z >= 0.0))
        raise(ErrorCode::domain, "bessel_i_scaled: z must be nonnegative");
    if (z <= kSeriesAsymCrossover)
        return bessel_series(n, z) * std::exp(-z);
    return bessel_asymptotic_scaled(n, z);
}

double bessel_i_scaled_log(int nu, double z) {
    const int n = checked_order(nu);
    if (!(z >= 0.0))
        raise(ErrorCode::domain, "bessel_i_scaled_log: z must be nonnegative");
    if (z == 0.0)
        return n == 0 ? 0.0 : -kInf;
    if (z <= kSeriesAsymCrossover)
        return std::log(bessel_series(n, z)) - z;
    return std::log(bessel_asymptotic_scaled(n, z));
}

double bessel_i(int nu, double z) {
    const int n = checked_order(nu);
    if (!(z >= 0.0))
        raise(ErrorCode::domain, "bessel_i: z must be nonnegative");
    if (z <= kSeriesAsymCrossover)
        return bessel_series(n, z);
    const double log_value = std::log(bessel_asymptotic_scaled(n, z)) + z;
    if (log_value > kLogDblMax)
        raise(ErrorCode::overflow, "bessel_i: unscaled value exceeds double range");
    return std::exp(log_value);
}

double ncx2_log_pdf(const ChiSquareArgs& args) {
    check_args(args);
    const int d = delta_to_shape(args.delta);
    const double y = args.y, x = args.x;
    if (y < 0.0)
        return -kInf;
    if (x == 0.0) {
        // central limit of the Bessel series leading term
        if (d == 0)
            return -kInf;
        if (y == 0.0)
            return d == 1 ? std::log(0.5) : -kInf;
        return (d - 1.0) * std::log(0.5 * y) - 0.5 * y - std::lgamma(static_cast<double>(d)) -
               std::log(2.0);
    }
    if (y == 0.0) {
        if (d == 0)
            return std::log(0.25 * x) - 0.5 * x;
        if (d == 1)
            return std::log(0.5) - 0.5 * x;
        return -kInf;
    }
    const double sx = std::sqrt(x), sy = std::sqrt(y);
    const double diff = sx - sy;
    return std::log(0.5) + 0.5 * (d - 1.0) * (std::log(y) - std::log(x)) -
           0.5 * diff * diff + bessel_i_scaled_log(d - 1, sx * sy);
}

double ncx2_pdf(const ChiSquareArgs& args) {
    const double lp = ncx2_log_pdf(args);
    return lp == -kInf ? 0.0 : std::exp(lp);
}

namespace {

// Lower mass including any point mass, with an underflow guard: left of the
// density mode the continuous part is bounded by y * p(y).
double lower_mass(int d, double y, double x) {
    const double point_mass = d == 0 ? std::exp(-0.5 * x) : 0.0;
    if (y < x && std::log(y) + ncx2_log_pdf({y, 2.0 * d, x}) < kLogTiny)
        return point_mass;
    return std::min(mixture_sum(d, y, x, /*upper=*/false, /*skip_point_mass=*/false), 1.0);
}

double upper_mass(int d, double y, double x) {
    const double rho = upper_tail_decay_rate(d, y, x);
    if (rho > 0.0 && ncx2_log_pdf({y, 2.0 * d, x}) - std::log(rho) < kLogTiny)
        return 0.0;
    return std::min(mixture_sum(d, y, x, /*upper=*/true, /*skip_point_mass=*/false), 1.0);
}

// True when the lower mass is the numerically small side of the split. The
// +2 keeps the split near the distribution median when x and delta are both
// tiny, where the continuous mass sits at the Erlang base scale instead of x.
bool lower_side_small(int d, double y, double x) { return y <= x + 2.0 * d + 2.0; }

} // namespace

double ncx2_cdf(const ChiSquareArgs& args) {
    check_args(args);
    const int d = delta_to_shape(args.delta);
    const double y = args.y, x = args.x;
    if (x == 0.0)
        return gamma_p(d, 0.5 * y);
    if (y == 0.0)
        return d == 0 ? std::exp(-0.5 * x) : 0.0;
    if (lower_side_small(d, y, x))
        return lower_mass(d, y, x);
    return std::max(0.0, 1.0 - upper_mass(d, y, x));
}

double ncx2_ccdf(const ChiSquareArgs& args) {
    check_args(args);
    const int d = delta_to_shape(args.delta);
    const double y = args.y, x = args.x;
    if (y == 0.0)
        return d == 0 ? -std::expm1(-0.5 * x) : 1.0;
    if (x == 0.0)
        return gamma_q(d, 0.5 * y);
    if (lower_side_small(d, y, x))
        return std::max(0.0, 1.0 - lower_mass(d, y, x));
    return upper_mass(d, y, x);
}

double ncx2_cdf0_continuous(double y, double x) {
    check_args({y, 0.0, x});
    if (y == 0.0 || x == 0.0)
        return 0.0;
    if (lower_side_small(0, y, x)) {
        if (y < x && std::log(y) + ncx2_log_pdf({y, 0.0, x}) < kLogTiny)
            return 0.0;
        return mixture_sum(0, y, x, /*upper=*/false, /*skip_point_mass=*/true);
    }
    // right of the mode the full continuous mass 1 - e^{-x/2} minus the small
    // upper tail is the accurate route
    return std::max(0.0, -std::expm1(-0.5 * x) - upper_mass(0, y, x));
}

double ncx2_cdf_oracle(const ChiSquareArgs& args, double tol) {
    check_args(args);
    if (!(tol > 0.0))
        raise(ErrorCode::domain, "ncx2_cdf_oracle: tol must be positive");
    const int d = delta_to_shape(args.delta);
    const double y = args.y, x = args.x;
    const double point_mass = d == 0 ? std::exp(-0.5 * x) : 0.0;
    if (y == 0.0)
        return point_mass;

    // Pre-split around the density mode so the top-level panels cannot miss a
    // narrow bump inside [0, y].
    const double mode = std::max(args.delta - 2.0, 0.0) + x;
    const double width = std::sqrt(2.0 * (args.delta + 2.0 * x)) + 1.0;
    std::vector<double> pts{0.0};
    for (double m = -16.0; m <= 16.0; m += 2.0) {
        const double p = mode + m * width;
        if (p > 0.0 && p < y)
            pts.push_back(p);
    }
    pts.push_back(y);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const auto density = [&](double z) { return ncx2_pdf({z, args.delta, x}); };
    const QuadResult q = integrate_segmented(density, pts, tol);
    return point_mass + q.value;
}

double norm_pdf(double d) {
    return std::exp(-0.5 * d * d) / std::sqrt(2.0 * M_PI);
}

double norm_cdf(double d) {
    return 0.5 * std::erfc(-d / std::sqrt(2.0));
}

double norm_ccdf(double d) {
    return 0.5 * std::erfc(d / std::sqrt(2.0));
}

double norm_cdf_inv(double u) {
    if (!(u > 0.0 && u < 1.0))
        raise(ErrorCode::domain, "norm_cdf_inv: u must lie in (0,1)");
    // Acklam's rational approximation
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double z;
    if (u < plow) {
        const double q = std::sqrt(-2.0 * std::log(u));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    } else if (u <= 1.0 - plow) {
        const double q = u - 0.5;
        const double r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-u));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    // one Halley step against the exact cdf
    const double e = norm_cdf(z) - u;
    const double n = norm_pdf(z);
    if (n > 0.0) {
        const double w = e / n;
        z -= w / (1.0 + 0.5 * z * w);
    }
    return z;
}

} // namespace mmm
