#pragma once

#include "isonorm/batch.hpp"
#include "isonorm/body.hpp"
#include "isonorm/estimate.hpp"
#include "isonorm/measure.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace isonorm {

/// Batch-means mean of gauge(K, row) over the rows of a sample matrix.
Estimate mean_gauge_rows(const Mat& points, const Body& k, RngKey stream);

/// M(K): sphere average of the gauge.
Estimate big_m(const Body& k, RngKey stream, std::int64_t count);

/// w(K): sphere average of the support function.
Estimate mean_width(const Body& k, RngKey stream, std::int64_t count);

struct VradReport {
    std::optional<Estimate> volume_route; // (vol K / vol B2^n)^{1/n}
    Estimate polar_route;                 // (sphere mean of gauge^{-n})^{1/n}
    std::string authoritative;            // "volume" | "polar"
    bool unstable = false;                // polar block spread above 20%

    const Estimate& value() const
    {
        return authoritative == "volume" ? *volume_route : polar_route;
    }
};

/// Volume radius by both routes; the polar route uses median-of-means over
/// 100 blocks against the heavy gauge^{-n} tail.
VradReport vrad(const Body& k, RngKey stream, std::int64_t count);

/// I_1(mu, K) = E gauge(K, X), X ~ mu.
Estimate i1(const MeasureSpec& measure, const Body& k, RngKey stream, std::int64_t count);

struct GaussianGaugeReport {
    Estimate direct;      // E_gamma gauge(K, x)
    Estimate via_m;       // E||g||_2 * M(K)
    double gaussian_norm; // E||g_n||_2, exact Gamma-ratio
    double gap_se_units;  // |direct - via_m| / combined SE
};

/// Gaussian mean gauge plus the exact polar-factorization cross-check.
GaussianGaugeReport gaussian_mean_gauge(const Body& k, RngKey stream, std::int64_t count);

/// h_{Z_q}(y) = (mean |<x,y>|^q)^{1/q} over a batch from a volume-1 centered
/// body; SE by the delta method on batch means. Guard: q <= 2 log(count).
Estimate zq_support(const SampleBatch& c_batch, double q, const Vec& y);

struct ZqInclusionReport {
    double max_ratio = 0.0; // max over directions of h_Zq / ((q/p) h_Zp)
    double max_monotone_violation_se = 0.0; // max (h_Zp - h_Zq) / combined SE
    int directions = 0;
};

/// Monotone inclusion Z_p subset Z_q over random directions, plus the
/// empirical constant for the (q/p)-inclusion.
ZqInclusionReport zq_inclusion_check(const SampleBatch& c_batch, double p, double q,
                                     int directions, RngKey stream);

/// I_1(K, Z_q°(K)) by nested Monte Carlo with per-term jackknife correction
/// of the inner (.)^{1/q} bias.
Estimate i1_zq_polar(const Body& k_iso, double q, RngKey stream, std::int64_t outer_count,
                     std::int64_t inner_count);

} // namespace isonorm
