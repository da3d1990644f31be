#include "mmm/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mmm {

namespace {

// QUADPACK dqk15 nodes and weights (positive half).
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct Panel {
    double a, b, value, error;
    bool splittable;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(center - dx) + f(center + dx);
        result_kronrod += kWgk[i] * fsum;
        if (i % 2 == 1)
            result_gauss += kWg[i / 2] * fsum;
    }
    const bool splittable = center > a && center < b;
    return {a, b, result_kronrod * half,
            std::abs((result_kronrod - result_gauss) * half), splittable};
}

bool panel_less(const Panel& l, const Panel& r) {
    // resolution-limited panels sink to the bottom of the heap
    if (l.splittable != r.splittable)
        return !l.splittable;
    return l.error < r.error;
}

} // namespace

QuadResult integrate_segmented(const std::function<double(double)>& f,
                               const std::vector<double>& breakpoints, double tol,
                               std::size_t max_evaluations, bool throw_on_budget) {
    std::vector<Panel> heap;
    QuadResult out;

    const auto push = [&](double a, double b) {
        heap.push_back(gk15(f, a, b));
        out.evaluations += 15;
        out.value += heap.back().value;
        out.error += heap.back().error;
        std::push_heap(heap.begin(), heap.end(), panel_less);
    };

    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (breakpoints[i] < breakpoints[i + 1])
            push(breakpoints[i], breakpoints[i + 1]);

    while (out.error > tol && !heap.empty() && heap.front().splittable) {
        if (out.evaluations + 30 > max_evaluations) {
            if (throw_on_budget)
                raise(ErrorCode::no_convergence, "integrate: evaluation budget exhausted");
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), panel_less);
        const Panel worst = heap.back();
        heap.pop_back();
        out.value -= worst.value;
        out.error -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        push(worst.a, mid);
        push(mid, worst.b);
    }
    // sum afresh so the result does not carry accumulated rounding
    out.value = 0.0;
    out.error = 0.0;
    for (const Panel& p : heap) {
        out.value += p.value;
        out.error += p.error;
    }
    return out;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                     std::size_t max_evaluations, bool throw_on_budget) {
    return integrate_segmented(f, {a, b}, tol, max_evaluations, throw_on_budget);
}

} // namespace mmm
