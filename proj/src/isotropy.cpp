#include "isonorm/isotropy.hpp"

#include "isonorm/parallel.hpp"
#include "isonorm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace isonorm {

namespace {

Mat unbiased_cov(const Mat& rows)
{
    Vec mean = rows.colwise().mean();
    Mat centered = rows.rowwise() - mean.transpose();
    return centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
}

// det(Cov)^{1/(2n)} with batch-means SE from sub-batch covariances.
Estimate l_from_points(const Mat& points, RngKey stream)
{
    const auto n = static_cast<double>(points.cols());
    RowBlocks rg = row_blocks(points.rows());
    std::vector<double> per_batch(static_cast<std::size_t>(rg.batches));
    parallel_for(rg.batches, [&](std::int64_t b) {
        auto lo = rg.edges[static_cast<std::size_t>(b)];
        auto len = rg.edges[static_cast<std::size_t>(b) + 1] - lo;
        Mat cov = unbiased_cov(points.middleRows(lo, len));
        per_batch[static_cast<std::size_t>(b)] =
            std::pow(std::max(cov.determinant(), 0.0), 0.5 / n);
    });
    Estimate est;
    est.value = std::pow(std::max(unbiased_cov(points).determinant(), 0.0), 0.5 / n);
    est.std_error = se_of_batch_means(per_batch);
    est.count = points.rows();
    est.stream = stream;
    return est;
}

} // namespace

MomentEstimate estimate_moments(const SampleBatch& batch)
{
    const std::int64_t count = batch.count();
    const int n = batch.dim();
    if (count < 100) throw std::invalid_argument("estimate_moments: need at least 100 points");

    MomentEstimate out;
    out.mean = batch.points.colwise().mean();
    out.cov = unbiased_cov(batch.points);

    RowBlocks rg = row_blocks(count);
    Mat means(rg.batches, n);
    std::vector<Mat> covs(static_cast<std::size_t>(rg.batches));
    parallel_for(rg.batches, [&](std::int64_t b) {
        auto lo = rg.edges[static_cast<std::size_t>(b)];
        auto len = rg.edges[static_cast<std::size_t>(b) + 1] - lo;
        auto block = batch.points.middleRows(lo, len);
        means.row(b) = block.colwise().mean();
        covs[static_cast<std::size_t>(b)] = unbiased_cov(block);
    });

    out.mean_se.resize(n);
    out.cov_se.resize(n, n);
    std::vector<double> slot(static_cast<std::size_t>(rg.batches));
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < rg.batches; ++b) slot[static_cast<std::size_t>(b)] = means(b, i);
        out.mean_se[i] = se_of_batch_means(slot);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int b = 0; b < rg.batches; ++b)
                slot[static_cast<std::size_t>(b)] = covs[static_cast<std::size_t>(b)](i, j);
            out.cov_se(i, j) = se_of_batch_means(slot);
        }

    double max_diag = out.cov.diagonal().maxCoeff();
    out.degenerate = out.cov.diagonal().minCoeff() <= 1e-14 * std::max(1.0, max_diag);
    return out;
}

Estimate estimate_volume(const Body& body, RngKey stream, double target_rel_se)
{
    if (body.volume()) {
        Estimate est;
        est.value = body.volume()->value;
        est.std_error = body.volume()->rel_se * est.value;
        est.stream = stream;
        return est;
    }
    const int n = body.dim();
    if (n > 10)
        throw AcceptanceTooLow("estimate_volume: rejection mode is guarded to dim <= 10");

    const double radius = body.circumradius_ub();
    const double box_volume = std::pow(2.0 * radius, n);
    constexpr std::int64_t kPerChunk = 65536;
    constexpr int kMaxChunks = 1024;

    std::vector<std::int64_t> accepted;
    int chunks = 0;
    double value = 0.0;
    double se = 0.0;
    for (int next = 4; chunks < kMaxChunks; next = std::min(2 * next, kMaxChunks)) {
        accepted.resize(static_cast<std::size_t>(next), 0);
        const int base = chunks;
        parallel_for(next - base, [&](std::int64_t i) {
            const int chunk = base + static_cast<int>(i);
            Rng rng(stream, static_cast<std::uint32_t>(chunk));
            Vec x(n);
            std::int64_t hits = 0;
            for (std::int64_t k = 0; k < kPerChunk; ++k) {
                for (int c = 0; c < n; ++c) x[c] = radius * rng.uniform_sym();
                if (body.gauge(x) <= 1.0) ++hits;
            }
            accepted[static_cast<std::size_t>(chunk)] = hits;
        });
        chunks = next;

        std::int64_t hits = 0;
        for (std::int64_t h : accepted) hits += h;
        const auto tried = static_cast<double>(chunks) * kPerChunk;
        const double p = static_cast<double>(hits) / tried;
        if (tried >= 1e6 && p < 1e-5)
            throw AcceptanceTooLow("estimate_volume: acceptance below 1e-5");
        value = box_volume * p;
        se = box_volume * std::sqrt(std::max(p * (1.0 - p), 0.0) / tried);
        if (p > 0.0 && se <= target_rel_se * value) {
            Estimate est;
            est.value = value;
            est.std_error = se;
            est.count = static_cast<std::int64_t>(tried);
            est.stream = stream;
            return est;
        }
        if (chunks == kMaxChunks) break;
    }
    Estimate est; // budget cap reached: honest (larger) SE
    est.value = value;
    est.std_error = se;
    est.count = static_cast<std::int64_t>(chunks) * kPerChunk;
    est.stream = stream;
    return est;
}

std::pair<Body, IsotropicCertificate> isotropic_transform(const Body& body, RngKey stream,
                                                          std::int64_t sample_budget)
{
    const int n = body.dim();
    if (sample_budget <= 0)
        sample_budget = std::max<std::int64_t>(100000, 1000 * static_cast<std::int64_t>(n) * n);

    Estimate vol = estimate_volume(body, stream.derive(1));
    const double vol_rel_se = vol.std_error / vol.value;

    SampleBatch batch =
        sample_measure(MeasureSpec::uniform_on(body), sample_budget, stream.derive(2));
    MomentEstimate mom = estimate_moments(batch);
    if (mom.degenerate)
        throw std::runtime_error("isotropic_transform: degenerate covariance estimate");

    Eigen::SelfAdjointEigenSolver<Mat> eig(mom.cov);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error("isotropic_transform: covariance estimate not positive definite");
    Mat whitener = eig.eigenvectors() *
                   eig.eigenvalues().array().rsqrt().matrix().asDiagonal() *
                   eig.eigenvectors().transpose();
    const double det_w = eig.eigenvalues().array().rsqrt().prod();
    const double alpha = std::pow(det_w * vol.value, -1.0 / n);

    Mat t_map = alpha * whitener;
    Body out = Body::linear_image(t_map, body)
                   .with_volume(1.0, vol_rel_se)
                   .with_isotropic_flag()
                   .with_label("iso:" + body.label());

    SampleBatch check =
        sample_measure(MeasureSpec::uniform_on(out), sample_budget, stream.derive(3));
    MomentEstimate mom2 = estimate_moments(check);
    Estimate l_est = l_from_points(check.points, stream);

    IsotropicCertificate cert;
    cert.T = std::move(t_map);
    cert.shift = mom.mean;
    cert.L = l_est;
    const double l2 = l_est.value * l_est.value;
    cert.cov_dev = (mom2.cov - l2 * Mat::Identity(n, n)).cwiseAbs().maxCoeff() / l2;
    cert.bary_dev = mom2.mean.cwiseAbs().maxCoeff();
    cert.vol_dev = vol_rel_se;
    return {std::move(out), std::move(cert)};
}

Estimate isotropic_constant(const Body& body, RngKey stream, std::int64_t sample_budget)
{
    const int n = body.dim();
    if (sample_budget <= 0)
        sample_budget = std::max<std::int64_t>(100000, 1000 * static_cast<std::int64_t>(n) * n);

    Body base = body;
    if (!body.isotropic_flag()) {
        if (!body.volume()) {
            Estimate vol = estimate_volume(body, stream.derive(1));
            base = body.with_volume(vol.value, vol.std_error / vol.value);
        }
        base = base.normalize_volume();
    }
    SampleBatch batch =
        sample_measure(MeasureSpec::uniform_on(base), sample_budget, stream.derive(2));
    return l_from_points(batch.points, stream);
}

Estimate thin_shell_sigma(const MeasureSpec& measure, RngKey stream, std::int64_t count)
{
    SampleBatch batch = sample_measure(measure, count, stream);
    Vec norms = batch.points.rowwise().norm();

    RowBlocks rg = row_blocks(count);
    std::vector<double> per_batch(static_cast<std::size_t>(rg.batches));
    parallel_for(rg.batches, [&](std::int64_t b) {
        auto lo = rg.edges[static_cast<std::size_t>(b)];
        auto len = rg.edges[static_cast<std::size_t>(b) + 1] - lo;
        auto seg = norms.segment(lo, len);
        double m = seg.mean();
        per_batch[static_cast<std::size_t>(b)] =
            std::sqrt((seg.array() - m).square().sum() / static_cast<double>(len - 1));
    });
    double m = norms.mean();
    Estimate est;
    est.value = std::sqrt((norms.array() - m).square().sum() / static_cast<double>(count - 1));
    est.std_error = se_of_batch_means(per_batch);
    est.count = count;
    est.stream = stream;
    return est;
}

Estimate tau_statistic(const MeasureSpec& measure, RngKey stream, std::int64_t count,
                       int directions)
{
    const int n = measure.dim();
    if (count < 1000) throw std::invalid_argument("tau_statistic: need at least 1000 points");
    if (directions < 1) throw std::invalid_argument("tau_statistic: directions must be >= 1");

    // Candidate xi's: random directions plus the top eigenvector of the
    // Gram matrix G_ab = <T_a, T_b>_F of the empirical third-moment slices
    // (the objective is xi' G xi, so this is the plug-in maximizer).
    std::vector<Vec> candidates;
    {
        Rng rng(stream.derive(1), 0);
        for (int d = 0; d < directions; ++d) {
            Vec xi(n);
            double norm = 0.0;
            while (norm == 0.0) {
                for (int i = 0; i < n; ++i) xi[i] = rng.normal();
                norm = xi.norm();
            }
            candidates.push_back(xi / norm);
        }
    }
    {
        SampleBatch pilot = sample_measure(measure, count, stream.derive(2));
        const Mat& x = pilot.points;
        std::vector<Mat> slices(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a)
            slices[static_cast<std::size_t>(a)] =
                x.transpose() * (x.array().colwise() * x.col(a).array()).matrix() /
                static_cast<double>(count);
        Mat gram(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                gram(a, b) = (slices[static_cast<std::size_t>(a)].array() *
                              slices[static_cast<std::size_t>(b)].array())
                                 .sum();
        Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
        candidates.push_back(eig.eigenvectors().col(n - 1));
    }

    // Fresh draws for unbiased evaluation (selection happened on other streams).
    SampleBatch eval = sample_measure(measure, count, stream.derive(3));
    const Mat& x = eval.points;
    Vec sq = x.rowwise().squaredNorm();

    RowBlocks rg = row_blocks(count);
    Estimate best;
    best.value = -std::numeric_limits<double>::infinity();
    for (const Vec& xi : candidates) {
        Vec c = x * xi;
        std::vector<double> per_batch(static_cast<std::size_t>(rg.batches));
        parallel_for(rg.batches, [&](std::int64_t b) {
            auto lo = rg.edges[static_cast<std::size_t>(b)];
            auto len = rg.edges[static_cast<std::size_t>(b) + 1] - lo;
            auto xb = x.middleRows(lo, len);
            auto cb = c.segment(lo, len);
            Mat s = xb.transpose() * (xb.array().colwise() * cb.array()).matrix();
            double diag = (sq.segment(lo, len).array().square() * cb.array().square()).sum();
            auto m = static_cast<double>(len);
            // U-statistic: unbiased for ||E[x x' <x,xi>]||_F^2
            per_batch[static_cast<std::size_t>(b)] =
                (s.squaredNorm() - diag) / (m * (m - 1.0));
        });
        Estimate est;
        est.value = mean_of(per_batch);
        est.std_error = se_of_batch_means(per_batch);
        est.count = count;
        est.stream = stream;
        if (est.value > best.value) best = est;
    }
    return best;
}

} // namespace isonorm
