#include "isonorm/functionals.hpp"

#include "isonorm/parallel.hpp"
#include "isonorm/samplers.hpp"
#include "isonorm/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace isonorm {

Estimate mean_gauge_rows(const Mat& points, const Body& k, RngKey stream)
{
    RowBlocks rg = row_blocks(points.rows());
    std::vector<double> per_batch(static_cast<std::size_t>(rg.batches));
    parallel_for(rg.batches, [&](std::int64_t b) {
        auto lo = rg.edges[static_cast<std::size_t>(b)];
        auto hi = rg.edges[static_cast<std::size_t>(b) + 1];
        double s = 0.0;
        for (std::int64_t r = lo; r < hi; ++r) s += k.gauge(points.row(r));
        per_batch[static_cast<std::size_t>(b)] = s / static_cast<double>(hi - lo);
    });
    Estimate est;
    est.value = mean_of(per_batch);
    est.std_error = se_of_batch_means(per_batch);
    est.count = points.rows();
    est.stream = stream;
    return est;
}

Estimate big_m(const Body& k, RngKey stream, std::int64_t count)
{
    const int n = k.dim();
    return mc_mean(stream, count, [&k, n](Rng& rng) {
        Vec theta(n);
        sphere_point(rng, theta);
        return k.gauge(theta);
    });
}

Estimate mean_width(const Body& k, RngKey stream, std::int64_t count)
{
    const int n = k.dim();
    return mc_mean(stream, count, [&k, n](Rng& rng) {
        Vec theta(n);
        sphere_point(rng, theta);
        return k.support(theta);
    });
}

VradReport vrad(const Body& k, RngKey stream, std::int64_t count)
{
    const int n = k.dim();
    VradReport rep;
    if (k.volume()) {
        Estimate e;
        e.value = std::pow(k.volume()->value / unit_ball_volume(n), 1.0 / n);
        e.std_error = k.volume()->rel_se * e.value / n;
        e.stream = stream;
        rep.volume_route = e;
    }

    // Median of means over 100 blocks: gauge^{-n} is heavy-tailed.
    constexpr int kBlocks = 100;
    const std::int64_t per = std::max<std::int64_t>(count / kBlocks, 1);
    std::vector<double> blocks(kBlocks);
    parallel_for(kBlocks, [&](std::int64_t b) {
        Rng rng(stream, static_cast<std::uint32_t>(b));
        Vec theta(n);
        double s = 0.0;
        for (std::int64_t i = 0; i < per; ++i) {
            sphere_point(rng, theta);
            s += std::pow(k.gauge(theta), -n);
        }
        blocks[static_cast<std::size_t>(b)] = s / static_cast<double>(per);
    });
    std::vector<double> sorted = blocks;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[49] + sorted[50]);
    const double q25 = sorted[24];
    const double q75 = sorted[74];
    rep.unstable = (q75 - q25) > 0.20 * median;

    // 1.2533 = sqrt(pi/2), the asymptotic efficiency factor of the median.
    const double se_median = 1.2533141373155003 * se_of_batch_means(blocks);
    Estimate polar;
    polar.value = std::pow(median, 1.0 / n);
    polar.std_error = se_median * polar.value / (n * median);
    polar.count = per * kBlocks;
    polar.stream = stream;
    rep.polar_route = polar;
    rep.authoritative = rep.volume_route ? "volume" : "polar";
    return rep;
}

Estimate i1(const MeasureSpec& measure, const Body& k, RngKey stream, std::int64_t count)
{
    if (measure.dim() != k.dim()) throw std::invalid_argument("i1: dimension mismatch");
    SampleBatch batch = sample_measure(measure, count, stream);
    return mean_gauge_rows(batch.points, k, stream);
}

GaussianGaugeReport gaussian_mean_gauge(const Body& k, RngKey stream, std::int64_t count)
{
    const int n = k.dim();
    GaussianGaugeReport rep;
    rep.direct = mc_mean(stream.derive(1), count, [&k, n](Rng& rng) {
        Vec g(n);
        gaussian_point(rng, g);
        return k.gauge(g);
    });
    rep.gaussian_norm = gaussian_norm_mean(n);
    Estimate m = big_m(k, stream.derive(2), count);
    rep.via_m.value = rep.gaussian_norm * m.value;
    rep.via_m.std_error = rep.gaussian_norm * m.std_error;
    rep.via_m.count = m.count;
    rep.via_m.stream = m.stream;
    rep.gap_se_units = diff_in_se_units(rep.direct, rep.via_m);
    return rep;
}

Estimate zq_support(const SampleBatch& c_batch, double q, const Vec& y)
{
    const std::int64_t count = c_batch.count();
    if (!(q >= 1.0)) throw std::invalid_argument("zq_support: q must be >= 1");
    if (y.size() != c_batch.dim()) throw std::invalid_argument("zq_support: dimension mismatch");
    if (q > 2.0 * std::log(static_cast<double>(count)))
        throw std::invalid_argument("zq_support: q too large for this batch size");

    Vec dots = c_batch.points * y;
    RowBlocks rg = row_blocks(count);
    std::vector<double> per_batch(static_cast<std::size_t>(rg.batches));
    parallel_for(rg.batches, [&](std::int64_t b) {
        auto lo = rg.edges[static_cast<std::size_t>(b)];
        auto len = rg.edges[static_cast<std::size_t>(b) + 1] - lo;
        per_batch[static_cast<std::size_t>(b)] =
            dots.segment(lo, len).array().abs().pow(q).mean();
    });
    const double mu = mean_of(per_batch);
    const double se_mu = se_of_batch_means(per_batch);
    Estimate est;
    est.value = std::pow(mu, 1.0 / q);
    est.std_error = mu > 0.0 ? se_mu / q * std::pow(mu, 1.0 / q - 1.0) : 0.0;
    est.count = count;
    est.stream = c_batch.stream;
    return est;
}

ZqInclusionReport zq_inclusion_check(const SampleBatch& c_batch, double p, double q,
                                     int directions, RngKey stream)
{
    if (!(p >= 1.0) || !(q >= p))
        throw std::invalid_argument("zq_inclusion_check: need 1 <= p <= q");
    if (directions < 1) throw std::invalid_argument("zq_inclusion_check: directions must be >= 1");

    const int n = c_batch.dim();
    Rng rng(stream, 0);
    ZqInclusionReport rep;
    rep.directions = directions;
    Vec y(n);
    for (int d = 0; d < directions; ++d) {
        sphere_point(rng, y);
        Estimate hp = zq_support(c_batch, p, y);
        Estimate hq = zq_support(c_batch, q, y);
        rep.max_ratio = std::max(rep.max_ratio, hq.value / ((q / p) * hp.value));
        const double se = std::max(combined_se(hp.std_error, hq.std_error), 1e-15);
        rep.max_monotone_violation_se =
            std::max(rep.max_monotone_violation_se, (hp.value - hq.value) / se);
    }
    return rep;
}

Estimate i1_zq_polar(const Body& k_iso, double q, RngKey stream, std::int64_t outer_count,
                     std::int64_t inner_count)
{
    if (!k_iso.isotropic_flag())
        throw std::invalid_argument("i1_zq_polar: body must carry the isotropic flag");
    if (!(q >= 1.0)) throw std::invalid_argument("i1_zq_polar: q must be >= 1");
    if (outer_count < 100 || inner_count < 100)
        throw std::invalid_argument("i1_zq_polar: need at least 100 outer and inner samples");

    SampleBatch outer = sample_measure(MeasureSpec::uniform_on(k_iso), outer_count,
                                       stream.derive(1));
    UniformPointSampler inner_sampler(k_iso);
    const RngKey inner_key = stream.derive(2);
    const int n = k_iso.dim();

    RowBlocks rg = row_blocks(outer_count);
    std::vector<double> per_batch(static_cast<std::size_t>(rg.batches));
    parallel_for(rg.batches, [&](std::int64_t b) {
        auto lo = rg.edges[static_cast<std::size_t>(b)];
        auto hi = rg.edges[static_cast<std::size_t>(b) + 1];
        std::vector<double> u(static_cast<std::size_t>(inner_count));
        Vec y(n);
        double acc = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng(inner_key, static_cast<std::uint32_t>(i));
            Vec x = outer.points.row(i);
            double total = 0.0;
            for (std::int64_t j = 0; j < inner_count; ++j) {
                inner_sampler.draw(rng, y);
                u[static_cast<std::size_t>(j)] = std::pow(std::abs(y.dot(x)), q);
                total += u[static_cast<std::size_t>(j)];
            }
            const auto m = static_cast<double>(inner_count);
            const double plug = std::pow(total / m, 1.0 / q);
            double jack = 0.0;
            for (std::int64_t j = 0; j < inner_count; ++j)
                jack += std::pow((total - u[static_cast<std::size_t>(j)]) / (m - 1.0), 1.0 / q);
            jack /= m;
            acc += m * plug - (m - 1.0) * jack; // jackknife bias correction
        }
        per_batch[static_cast<std::size_t>(b)] = acc / static_cast<double>(hi - lo);
    });

    Estimate est;
    est.value = mean_of(per_batch);
    est.std_error = se_of_batch_means(per_batch);
    est.count = outer_count * inner_count;
    est.stream = stream;
    return est;
}

} // namespace isonorm
