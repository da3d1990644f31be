#pragma once
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "mmm/errors.hpp"

namespace mmm {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;       // accumulated error estimate
    std::size_t evaluations = 0;
};

// Adaptive Gauss-Kronrod 15(7) bisection with an absolute-tolerance stop and a
// hard evaluation budget. Throws ErrorCode::no_convergence when the budget is
// exhausted before the estimate drops below tol; with throw_on_budget = false
// it returns the best estimate instead (error field reports the residual).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double tol, std::size_t max_evaluations = 1'000'000,
                     bool throw_on_budget = true);

// Same integrator over a pre-split partition (useful when the integrand has a
// narrow bump the top-level interval would miss).
QuadResult integrate_segmented(const std::function<double(double)>& f,
                               const std::vector<double>& breakpoints, double tol,
                               std::size_t max_evaluations = 1'000'000,
                               bool throw_on_budget = true);

} // namespace mmm
