#pragma once
#include <cstdint>
#include <functional>

#include "mmm/errors.hpp"
#include "mmm/mmm_core.hpp"

namespace mmm {

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
};

// Counter-based uniform/normal stream: draw i of stream `seed` depends only on
// (seed, i), so parallel path batches reproduce bit-exactly under any thread
// count.
std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t index);
double counter_uniform(std::uint64_t seed, std::uint64_t index);
double counter_normal(std::uint64_t seed, std::uint64_t index);

// Exact draw of the terminal index level: S_T e^{-rT}/phi(T) is noncentral
// chi-square with 4 degrees of freedom and noncentrality x = S/phi(T),
// realized as (sqrt x + Z1)^2 + Z2^2 + Z3^2 + Z4^2. `path` selects the
// four-normal block of the stream; no discretization is involved.
double sample_terminal(const ModelParams& params, double T, std::uint64_t seed,
                       std::uint64_t path);

// Monte Carlo price of the benchmarked call expectation
// S E[(S_T - K)+ / S_T]; deterministic for fixed seed, reduction is
// batch-ordered so thread count cannot change the result.
McEstimate mc_call_price(const ModelParams& params, double K, double T,
                         std::int64_t n_paths, std::uint64_t seed, int threads = 1);

// Central finite difference of f at T (order 1 or 2).
double finite_diff(const std::function<double(double)>& f, double T, int order, double step);

} // namespace mmm
