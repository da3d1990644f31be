#pragma once
#include <cstdint>

#include "mmm/errors.hpp"

namespace mmm {

// Arguments of the noncentral chi-square functions: evaluation point y,
// degrees of freedom delta, noncentrality x. delta = 0 follows Siegel's
// convention and carries a point mass exp(-x/2) at the origin.
struct ChiSquareArgs {
    double y = 0.0;
    double delta = 0.0;
    double x = 0.0;
};

// Modified Bessel function of the first kind, integer order nu in {-1,0,1,2,3}.
// I_{-1} = I_1 by dispatch. Throws ErrorCode::overflow when exp(z) I_nu would
// exceed the double range; use bessel_i_scaled there.
double bessel_i(int nu, double z);

// exp(-z) I_nu(z); finite for every representable z >= 0.
double bessel_i_scaled(int nu, double z);

// log of bessel_i_scaled; -inf when the scaled value underflows.
double bessel_i_scaled_log(int nu, double z);

// Noncentral chi-square density p(y; delta, x). delta must be one of
// {0,2,4,6,8}; the evaluation routes through the scaled Bessel so the
// exp(-(x+y)/2) factor never underflows prematurely.
double ncx2_pdf(const ChiSquareArgs& args);

// log of ncx2_pdf; -inf where the density vanishes.
double ncx2_log_pdf(const ChiSquareArgs& args);

// Distribution function. For delta = 0 the point mass exp(-x/2) is included
// at every y >= 0.
double ncx2_cdf(const ChiSquareArgs& args);

// 1 - ncx2_cdf computed as a direct positive-term sum, not as 1 - cdf.
double ncx2_ccdf(const ChiSquareArgs& args);

// Continuous part of the delta = 0 distribution: cdf without the point mass,
// accurate in relative terms even where the integral part is far below
// exp(-x/2). Needed by the complement-form pricing identities.
double ncx2_cdf0_continuous(double y, double x);

// Independent verification oracle: adaptive quadrature of ncx2_pdf on [0, y]
// plus the delta = 0 point mass. Error estimate below tol or
// ErrorCode::no_convergence.
double ncx2_cdf_oracle(const ChiSquareArgs& args, double tol);

// Standard normal distribution.
double norm_pdf(double d);
double norm_cdf(double d);
double norm_ccdf(double d);

// Inverse standard normal cdf (Acklam's approximation plus one Halley
// refinement); u in (0,1).
double norm_cdf_inv(double u);

// log Poisson pmf ln(e^-mu mu^j / j!) evaluated without the lgamma
// cancellation that loses ~1e-5 absolute for mu ~ 1e10. Exposed for tests.
double log_poisson_pmf(std::int64_t j, double mu);

// Regularized incomplete gamma for integer shape k >= 0 (P lower, Q upper);
// P(0,.) = 1 and Q(0,.) = 0 by the point-mass convention.
double gamma_p(std::int64_t k, double z);
double gamma_q(std::int64_t k, double z);

} // namespace mmm
