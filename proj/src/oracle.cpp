#include "mmm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "mmm/specfun.hpp"

namespace mmm {

namespace {

constexpr std::int64_t kBatchSize = 1 << 14;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct BatchSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

} // namespace

std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    // 53-bit mantissa, offset keeps u strictly inside (0,1)
    return (static_cast<double>(counter_mix(seed, index) >> 11) + 0.5) * 0x1p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t index) {
    return norm_cdf_inv(counter_uniform(seed, index));
}

double sample_terminal(const ModelParams& params, double T, std::uint64_t seed,
                       std::uint64_t path) {
    const PhiBundle b = phi_transform(params, T);
    const double sqrt_x = std::sqrt(params.S / b.phi);
    const std::uint64_t base = 4 * path;
    const double z1 = counter_normal(seed, base);
    const double z2 = counter_normal(seed, base + 1);
    const double z3 = counter_normal(seed, base + 2);
    const double z4 = counter_normal(seed, base + 3);
    const double w = (sqrt_x + z1) * (sqrt_x + z1) + z2 * z2 + z3 * z3 + z4 * z4;
    return w * b.phi * std::exp(params.r * T);
}

McEstimate mc_call_price(const ModelParams& params, double K, double T,
                         std::int64_t n_paths, std::uint64_t seed, int threads) {
    params.validate();
    if (n_paths < 1000)
        raise(ErrorCode::domain, "mc_call_price: need at least 1e3 paths");
    if (!(K >= 0.0))
        raise(ErrorCode::domain, "mc_call_price: strike must be nonnegative");

    const PhiBundle b = phi_transform(params, T);
    const double sqrt_x = std::sqrt(params.S / b.phi);
    const double y = K * std::exp(-params.r * T) / b.phi;
    const double S = params.S;

    // benchmarked payoff S (S_T - K)+ / S_T = S (1 - y/W)+ with
    // W = S_T e^{-rT} / phi
    const auto payoff_batch = [&](std::int64_t begin, std::int64_t end) {
        BatchSums s;
        for (std::int64_t i = begin; i < end; ++i) {
            const std::uint64_t base = 4 * static_cast<std::uint64_t>(i);
            const double z1 = sqrt_x + counter_normal(seed, base);
            const double z2 = counter_normal(seed, base + 1);
            const double z3 = counter_normal(seed, base + 2);
            const double z4 = counter_normal(seed, base + 3);
            const double w = z1 * z1 + z2 * z2 + z3 * z3 + z4 * z4;
            const double p = w > y ? S * (1.0 - y / w) : 0.0;
            s.sum += p;
            s.sum_sq += p * p;
        }
        return s;
    };

    const std::int64_t n_batches = (n_paths + kBatchSize - 1) / kBatchSize;
    std::vector<BatchSums> batches(static_cast<std::size_t>(n_batches));
    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(n_batches)));
    if (n_workers == 1) {
        for (std::int64_t bi = 0; bi < n_batches; ++bi)
            batches[static_cast<std::size_t>(bi)] = payoff_batch(
                bi * kBatchSize, std::min(n_paths, (bi + 1) * kBatchSize));
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::int64_t bi = w; bi < n_batches; bi += n_workers)
                    batches[static_cast<std::size_t>(bi)] = payoff_batch(
                        bi * kBatchSize, std::min(n_paths, (bi + 1) * kBatchSize));
            });
        }
        for (auto& t : pool)
            t.join();
    }

    // fixed batch order keeps the floating-point reduction thread-invariant
    double sum = 0.0, sum_sq = 0.0;
    for (const BatchSums& s : batches) {
        sum += s.sum;
        sum_sq += s.sum_sq;
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
    return {mean, std::sqrt(var / n), n_paths, seed};
}

double finite_diff(const std::function<double(double)>& f, double T, int order, double step) {
    if (!(step > 0.0) || !(T - step > 0.0))
        raise(ErrorCode::domain, "finite_diff: need step > 0 and T - step > 0");
    if (order == 1)
        return (f(T + step) - f(T - step)) / (2.0 * step);
    if (order == 2)
        return (f(T + step) - 2.0 * f(T) + f(T - step)) / (step * step);
    raise(ErrorCode::domain, "finite_diff: order must be 1 or 2");
}

} // namespace mmm
