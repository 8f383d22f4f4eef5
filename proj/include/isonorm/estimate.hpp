#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "isonorm/parallel.hpp"
#include "isonorm/rng.hpp"

namespace isonorm {

/// A Monte-Carlo result. std_error comes from batch means over >= 30
/// independent substreams.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t count = 0;
    RngKey stream{};
};

inline Estimate exact_estimate(double value, RngKey stream = {}) {
    return Estimate{value, 0.0, 0, stream};
}

/// Batch layout used by every driver: `batches` substreams of equal size.
/// Requested counts are rounded up to a multiple of the batch count.
struct BatchPlan {
    int batches = 0;
    std::int64_t per_batch = 0;
    std::int64_t total() const { return static_cast<std::int64_t>(batches) * per_batch; }
};

inline BatchPlan plan_batches(std::int64_t count, int min_batches = 30) {
    BatchPlan p;
    p.batches = count >= 3000 ? 100 : std::max<int>(min_batches, 1);
    if (count < p.batches) count = p.batches;
    p.per_batch = (count + p.batches - 1) / p.batches;
    return p;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Standard error of the mean of batch means.
inline double se_of_batch_means(const std::vector<double>& means) {
    const std::size_t b = means.size();
    if (b < 2) return 0.0;
    const double m = mean_of(means);
    double ss = 0.0;
    for (double x : means) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

/// Mean of sample_fn(Rng&) over `count` draws, batch-means standard error.
/// Batch b draws from substream `substream0 + b`, so the result is
/// bit-identical for any worker count.
template <class Fn>
Estimate mc_mean(RngKey key, std::int64_t count, Fn&& sample_fn,
                 std::uint32_t substream0 = 0) {
    const BatchPlan plan = plan_batches(count);
    std::vector<double> means(plan.batches);
    parallel_for(plan.batches, [&](std::int64_t b) {
        Rng rng(key, substream0 + static_cast<std::uint32_t>(b));
        double s = 0.0;
        for (std::int64_t i = 0; i < plan.per_batch; ++i) s += sample_fn(rng);
        means[static_cast<std::size_t>(b)] = s / static_cast<double>(plan.per_batch);
    });
    Estimate e;
    e.value = mean_of(means);
    e.std_error = se_of_batch_means(means);
    e.count = plan.total();
    e.stream = key;
    return e;
}

/// As mc_mean but sample_fn emits `width` values per draw (into a caller
/// slot); returns one Estimate per component, computed on shared draws.
template <class Fn>
std::vector<Estimate> mc_mean_multi(RngKey key, std::int64_t count, int width,
                                    Fn&& sample_fn, std::uint32_t substream0 = 0) {
    const BatchPlan plan = plan_batches(count);
    std::vector<std::vector<double>> means(
        static_cast<std::size_t>(width), std::vector<double>(plan.batches));
    parallel_for(plan.batches, [&](std::int64_t b) {
        Rng rng(key, substream0 + static_cast<std::uint32_t>(b));
        std::vector<double> acc(static_cast<std::size_t>(width), 0.0);
        std::vector<double> slot(static_cast<std::size_t>(width), 0.0);
        for (std::int64_t i = 0; i < plan.per_batch; ++i) {
            sample_fn(rng, slot.data());
            for (int k = 0; k < width; ++k) acc[k] += slot[k];
        }
        for (int k = 0; k < width; ++k)
            means[k][static_cast<std::size_t>(b)] = acc[k] / static_cast<double>(plan.per_batch);
    });
    std::vector<Estimate> out(static_cast<std::size_t>(width));
    for (int k = 0; k < width; ++k) {
        out[k].value = mean_of(means[k]);
        out[k].std_error = se_of_batch_means(means[k]);
        out[k].count = plan.total();
        out[k].stream = key;
    }
    return out;
}

/// Contiguous row ranges for batch-means statistics over a stored sample:
/// 100 blocks for large samples, `min_batches` otherwise.
struct RowBlocks {
    int batches = 0;
    std::vector<std::int64_t> edges; // batches+1 boundaries
};

inline RowBlocks row_blocks(std::int64_t count, int min_batches = 30) {
    RowBlocks r;
    r.batches = count >= 3000 ? 100 : std::max(min_batches, 1);
    r.edges.resize(static_cast<std::size_t>(r.batches) + 1);
    for (int b = 0; b <= r.batches; ++b)
        r.edges[static_cast<std::size_t>(b)] = count * b / r.batches;
    return r;
}

inline double combined_se(double se_a, double se_b) {
    return std::sqrt(se_a * se_a + se_b * se_b);
}

/// |a-b| measured in combined standard errors (large when both SEs vanish
/// and the values differ).
inline double diff_in_se_units(const Estimate& a, const Estimate& b,
                               double se_floor = 1e-15) {
    const double se = std::max(combined_se(a.std_error, b.std_error), se_floor);
    return std::abs(a.value - b.value) / se;
}

} // namespace isonorm
