#include "isonorm/multinorm.hpp"

#include "isonorm/functionals.hpp"
#include "isonorm/parallel.hpp"
#include "isonorm/samplers.hpp"
#include "isonorm/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace isonorm {

namespace {

double mean_se_of(const std::vector<double>& v, double& se)
{
    se = se_of_batch_means(v);
    return mean_of(v);
}

SampleBatch sample_uniform_policy(const Body& body, std::int64_t count, RngKey stream,
                                  const SamplerPolicy& policy)
{
    switch (policy.kind) {
    case SamplerPolicy::Kind::rejection: return sample_uniform_rejection(body, count, stream);
    case SamplerPolicy::Kind::hit_and_run:
        return sample_hit_and_run(body, count, stream, policy.burn_in, policy.thinning);
    case SamplerPolicy::Kind::automatic: break;
    }
    return sample_measure(MeasureSpec::uniform_on(body), count, stream);
}

Mat nu_points(const MultiNormContext& ctx, const Vec& unit_t, std::int64_t count, RngKey stream)
{
    const auto s = static_cast<std::int64_t>(unit_t.size());
    if (ctx.policy.kind == SamplerPolicy::Kind::automatic)
        return sample_nu_t(ctx.c, unit_t, count, stream).points;
    SampleBatch uni = sample_uniform_policy(ctx.c, count * s, stream, ctx.policy);
    Mat out = Mat::Zero(count, ctx.c.dim());
    for (std::int64_t k = 0; k < count; ++k)
        for (std::int64_t j = 0; j < s; ++j) out.row(k) += unit_t[j] * uni.points.row(k * s + j);
    return out;
}

// Serial block-means estimate of E gauge(K, sum t_j X_j); safe to call from
// inside an outer parallel loop (one substream per block, no nesting).
Estimate nu_norm_blocks(const Body& c, const Body& k, const Vec& t, RngKey key,
                        std::int64_t count)
{
    const int n = c.dim();
    const auto s = static_cast<int>(t.size());
    UniformPointSampler sampler(c);
    RowBlocks rg = row_blocks(count);
    std::vector<double> per(static_cast<std::size_t>(rg.batches));
    Vec x(n), z(n);
    for (int b = 0; b < rg.batches; ++b) {
        Rng rng(key, static_cast<std::uint32_t>(b));
        auto len = rg.edges[static_cast<std::size_t>(b) + 1] - rg.edges[static_cast<std::size_t>(b)];
        double acc = 0.0;
        for (std::int64_t i = 0; i < len; ++i) {
            z.setZero();
            for (int j = 0; j < s; ++j) {
                sampler.draw(rng, x);
                z += t[j] * x;
            }
            acc += k.gauge(z);
        }
        per[static_cast<std::size_t>(b)] = acc / static_cast<double>(len);
    }
    Estimate est;
    est.value = mean_se_of(per, est.std_error);
    est.count = count;
    est.stream = key;
    return est;
}

Vec random_unit(Rng& rng, int s)
{
    Vec t(s);
    sphere_point(rng, t);
    return t;
}

} // namespace

MultiNormContext make_context(const Body& c, const Body& k, RngKey stream,
                              std::int64_t sample_budget, SamplerPolicy policy)
{
    if (c.dim() != k.dim()) throw std::invalid_argument("make_context: C and K dims differ");
    if (c.isotropic_flag()) {
        const int n = c.dim();
        Estimate l = isotropic_constant(c, stream.derive(1), sample_budget);
        SampleBatch check = sample_measure(
            MeasureSpec::uniform_on(c),
            sample_budget > 0
                ? sample_budget
                : std::max<std::int64_t>(100000, 1000 * static_cast<std::int64_t>(n) * n),
            stream.derive(2));
        MomentEstimate mom = estimate_moments(check);
        const double l2 = l.value * l.value;
        IsotropicCertificate cert;
        cert.T = Mat::Identity(n, n);
        cert.shift = Vec::Zero(n);
        cert.L = l;
        cert.cov_dev = (mom.cov - l2 * Mat::Identity(n, n)).cwiseAbs().maxCoeff() / l2;
        cert.bary_dev = mom.mean.cwiseAbs().maxCoeff();
        cert.vol_dev = c.volume() ? c.volume()->rel_se : 0.0;
        return MultiNormContext{c, k, l, std::move(cert), policy};
    }
    auto [iso, cert] = isotropic_transform(c, stream.derive(3), sample_budget);
    Estimate l = cert.L;
    return MultiNormContext{std::move(iso), k, l, std::move(cert), policy};
}

Estimate multi_norm(const MultiNormContext& ctx, const Vec& t, RngKey stream, std::int64_t count)
{
    const double scale = t.norm();
    if (scale == 0.0) {
        Estimate zero;
        zero.stream = stream;
        return zero;
    }
    Mat points = nu_points(ctx, t / scale, count, stream);
    Estimate est = mean_gauge_rows(points, ctx.k, stream);
    est.value *= scale;
    est.std_error *= scale;
    return est;
}

CovarianceCheckReport covariance_check_nu_t(const MultiNormContext& ctx, const Vec& t,
                                            RngKey stream, std::int64_t count)
{
    const Vec unit_t = t / t.norm();
    SampleBatch batch;
    batch.points = nu_points(ctx, unit_t, count, stream);
    batch.stream = stream;
    MomentEstimate mom = estimate_moments(batch);

    CovarianceCheckReport rep;
    rep.cov = mom.cov;
    rep.cov_diag_se = mom.cov_se.diagonal();
    rep.l_squared = ctx.l.value * ctx.l.value;
    const int n = ctx.c.dim();
    for (int i = 0; i < n; ++i) {
        rep.max_diag_rel_dev =
            std::max(rep.max_diag_rel_dev, std::abs(mom.cov(i, i) - rep.l_squared) / rep.l_squared);
        for (int j = 0; j < i; ++j) {
            const double se = std::max(mom.cov_se(i, j), 1e-15);
            rep.max_offdiag_se_units =
                std::max(rep.max_offdiag_se_units, std::abs(mom.cov(i, j)) / se);
        }
    }
    return rep;
}

IdentityCheckReport identity_check(const MultiNormContext& ctx, const Vec& t, RngKey stream,
                                   std::int64_t count)
{
    const Vec unit_t = t / t.norm();
    IdentityCheckReport rep;
    rep.lhs = multi_norm(ctx, unit_t, stream.derive(1), count);

    MeasureSpec mu_t =
        MeasureSpec::rescaled(MeasureSpec::weighted_sum(ctx.c, unit_t), 1.0 / ctx.l.value);
    Estimate i1_est = i1(mu_t, ctx.k, stream.derive(2), count);
    rep.rhs.value = ctx.l.value * i1_est.value;
    rep.rhs.std_error = ctx.l.value * i1_est.std_error; // L cancels exactly; no SE(L) term
    rep.rhs.count = i1_est.count;
    rep.rhs.stream = i1_est.stream;
    rep.gap_se_units = diff_in_se_units(rep.lhs, rep.rhs);
    return rep;
}

MOfBallReport m_of_ball(const MultiNormContext& ctx, int s, RngKey stream,
                        std::int64_t outer_count, std::int64_t inner_count)
{
    if (s < 1) throw std::invalid_argument("m_of_ball: s must be >= 1");
    MOfBallReport rep;
    rep.gaussian_norm = gaussian_norm_mean(s);

    std::vector<double> sphere_terms(static_cast<std::size_t>(outer_count));
    std::vector<double> gauss_terms(static_cast<std::size_t>(outer_count));
    const RngKey sphere_dirs = stream.derive(1);
    const RngKey sphere_draws = stream.derive(2);
    const RngKey gauss_dirs = stream.derive(3);
    const RngKey gauss_draws = stream.derive(4);
    parallel_for(outer_count, [&](std::int64_t i) {
        Rng rng_s(sphere_dirs, static_cast<std::uint32_t>(i));
        Vec theta = random_unit(rng_s, s);
        sphere_terms[static_cast<std::size_t>(i)] =
            nu_norm_blocks(ctx.c, ctx.k, theta, sphere_draws.derive(static_cast<std::uint64_t>(i)),
                           inner_count)
                .value;

        Rng rng_g(gauss_dirs, static_cast<std::uint32_t>(i));
        Vec g(s);
        gaussian_point(rng_g, g);
        // 1-homogeneity: evaluate at g/||g|| and scale back.
        const double norm = g.norm();
        gauss_terms[static_cast<std::size_t>(i)] =
            norm * nu_norm_blocks(ctx.c, ctx.k, g / norm,
                                  gauss_draws.derive(static_cast<std::uint64_t>(i)), inner_count)
                       .value;
    });

    rep.sphere_route.value = mean_se_of(sphere_terms, rep.sphere_route.std_error);
    rep.sphere_route.count = outer_count * inner_count;
    rep.sphere_route.stream = stream;
    rep.gaussian_route.value = mean_se_of(gauss_terms, rep.gaussian_route.std_error);
    rep.gaussian_route.value /= rep.gaussian_norm;
    rep.gaussian_route.std_error /= rep.gaussian_norm;
    rep.gaussian_route.count = outer_count * inner_count;
    rep.gaussian_route.stream = stream;
    rep.gap_se_units = diff_in_se_units(rep.sphere_route, rep.gaussian_route);
    return rep;
}

SymmetryCheckReport symmetry_check(const MultiNormContext& ctx, int s, int trials, RngKey stream,
                                   std::int64_t count)
{
    if (s < 1 || trials < 1)
        throw std::invalid_argument("symmetry_check: s and trials must be >= 1");
    const int n = ctx.c.dim();
    SymmetryCheckReport rep;
    rep.trials = trials;

    std::vector<double> sym_dev(static_cast<std::size_t>(trials));
    const RngKey setup = stream.derive(1);
    const RngKey draws = stream.derive(2);
    parallel_for(trials, [&](std::int64_t trial) {
        Rng rng(setup, static_cast<std::uint32_t>(trial));
        Vec t = random_unit(rng, s);
        std::vector<int> perm(static_cast<std::size_t>(s));
        std::iota(perm.begin(), perm.end(), 0);
        for (int j = s - 1; j > 0; --j)
            std::swap(perm[static_cast<std::size_t>(j)],
                      perm[rng.next_u32() % static_cast<std::uint32_t>(j + 1)]);
        Vec t2(s);
        for (int j = 0; j < s; ++j)
            t2[j] = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * t[perm[static_cast<std::size_t>(j)]];

        // Shared draws: both weight vectors applied to the same X's.
        UniformPointSampler sampler(ctx.c);
        RowBlocks rg = row_blocks(count);
        std::vector<double> per(static_cast<std::size_t>(rg.batches));
        Vec x(n), za(n), zb(n);
        const RngKey key = draws.derive(static_cast<std::uint64_t>(trial));
        for (int b = 0; b < rg.batches; ++b) {
            Rng block_rng(key, static_cast<std::uint32_t>(b));
            auto len =
                rg.edges[static_cast<std::size_t>(b) + 1] - rg.edges[static_cast<std::size_t>(b)];
            double acc = 0.0;
            for (std::int64_t i = 0; i < len; ++i) {
                za.setZero();
                zb.setZero();
                for (int j = 0; j < s; ++j) {
                    sampler.draw(block_rng, x);
                    za += t[j] * x;
                    zb += t2[j] * x;
                }
                acc += ctx.k.gauge(za) - ctx.k.gauge(zb);
            }
            per[static_cast<std::size_t>(b)] = acc / static_cast<double>(len);
        }
        double se = 0.0;
        double mean = mean_se_of(per, se);
        sym_dev[static_cast<std::size_t>(trial)] = std::abs(mean) / std::max(se, 1e-15);
    });
    rep.max_dev_se_units = *std::max_element(sym_dev.begin(), sym_dev.end());

    const int pairs = 2 * trials;
    std::vector<double> tri_excess(static_cast<std::size_t>(pairs));
    const RngKey pair_setup = stream.derive(3);
    const RngKey pair_draws = stream.derive(4);
    parallel_for(pairs, [&](std::int64_t pair) {
        Rng rng(pair_setup, static_cast<std::uint32_t>(pair));
        Vec t = random_unit(rng, s);
        Vec u = random_unit(rng, s);
        UniformPointSampler sampler(ctx.c);
        RowBlocks rg = row_blocks(count);
        std::vector<double> per(static_cast<std::size_t>(rg.batches));
        Vec x(n), zt(n), zu(n);
        const RngKey key = pair_draws.derive(static_cast<std::uint64_t>(pair));
        for (int b = 0; b < rg.batches; ++b) {
            Rng block_rng(key, static_cast<std::uint32_t>(b));
            auto len =
                rg.edges[static_cast<std::size_t>(b) + 1] - rg.edges[static_cast<std::size_t>(b)];
            double acc = 0.0;
            for (std::int64_t i = 0; i < len; ++i) {
                zt.setZero();
                zu.setZero();
                for (int j = 0; j < s; ++j) {
                    sampler.draw(block_rng, x);
                    zt += t[j] * x;
                    zu += u[j] * x;
                }
                // gauge(zt+zu) <= gauge(zt) + gauge(zu) holds per draw
                acc += ctx.k.gauge(zt + zu) - ctx.k.gauge(zt) - ctx.k.gauge(zu);
            }
            per[static_cast<std::size_t>(b)] = acc / static_cast<double>(len);
        }
        double se = 0.0;
        double mean = mean_se_of(per, se);
        tri_excess[static_cast<std::size_t>(pair)] = mean / std::max(se, 1e-15);
    });
    rep.max_triangle_excess_se = *std::max_element(tri_excess.begin(), tri_excess.end());
    return rep;
}

RotationAverageReport rotation_average_check(const MeasureSpec& measure, const Body& k,
                                             int rotations, RngKey stream, std::int64_t count)
{
    if (rotations < 1)
        throw std::invalid_argument("rotation_average_check: rotations must be >= 1");
    const int n = k.dim();
    if (measure.dim() != n)
        throw std::invalid_argument("rotation_average_check: dimension mismatch");

    std::vector<double> terms(static_cast<std::size_t>(rotations));
    const RngKey rot_key = stream.derive(1);
    const RngKey draw_key = stream.derive(2);
    parallel_for(rotations, [&](std::int64_t r) {
        Mat u = sample_haar_rotation(n, rot_key.derive(static_cast<std::uint64_t>(r)));
        SampleBatch batch =
            sample_measure(measure, count, draw_key.derive(static_cast<std::uint64_t>(r)));
        // gauge of U(K) at x equals gauge of K at U' x
        double acc = 0.0;
        for (std::int64_t i = 0; i < batch.count(); ++i)
            acc += k.gauge(u.transpose() * batch.points.row(i).transpose());
        terms[static_cast<std::size_t>(r)] = acc / static_cast<double>(batch.count());
    });

    RotationAverageReport rep;
    rep.lhs.value = mean_se_of(terms, rep.lhs.std_error);
    rep.lhs.count = static_cast<std::int64_t>(rotations) * count;
    rep.lhs.stream = stream;

    const std::int64_t rhs_count = std::min<std::int64_t>(
        static_cast<std::int64_t>(rotations) * count, 4000000);
    Estimate m = big_m(k, stream.derive(3), rhs_count);
    SampleBatch norm_batch = sample_measure(measure, rhs_count, stream.derive(4));
    Vec norms = norm_batch.points.rowwise().norm();
    RowBlocks rg = row_blocks(rhs_count);
    std::vector<double> per(static_cast<std::size_t>(rg.batches));
    for (int b = 0; b < rg.batches; ++b) {
        auto lo = rg.edges[static_cast<std::size_t>(b)];
        auto len = rg.edges[static_cast<std::size_t>(b) + 1] - lo;
        per[static_cast<std::size_t>(b)] = norms.segment(lo, len).mean();
    }
    double norm_se = 0.0;
    const double norm_mean = mean_se_of(per, norm_se);

    rep.rhs.value = m.value * norm_mean;
    rep.rhs.std_error = combined_se(m.std_error * norm_mean, m.value * norm_se);
    rep.rhs.count = rhs_count;
    rep.rhs.stream = stream;
    rep.gap_se_units = diff_in_se_units(rep.lhs, rep.rhs);
    return rep;
}

AlptSpectralReport alpt_spectral_check(const MultiNormContext& ctx, int s, int trials,
                                       RngKey stream)
{
    if (s < 1 || trials < 2)
        throw std::invalid_argument("alpt_spectral_check: need s >= 1, trials >= 2");
    const int n = ctx.c.dim();
    const double l2 = ctx.l.value * ctx.l.value;

    AlptSpectralReport rep;
    rep.trials = trials;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    rep.max_eigenvalue = -std::numeric_limits<double>::infinity();

    Mat flat(trials, n * n);
    std::vector<int> in_band(static_cast<std::size_t>(trials), 0);
    std::vector<double> lo_eig(static_cast<std::size_t>(trials));
    std::vector<double> hi_eig(static_cast<std::size_t>(trials));
    parallel_for(trials, [&](std::int64_t trial) {
        UniformPointSampler sampler(ctx.c);
        Rng rng(stream.derive(1), static_cast<std::uint32_t>(trial));
        Vec x(n);
        Mat a = Mat::Zero(n, n);
        for (int j = 0; j < s; ++j) {
            sampler.draw(rng, x);
            a += x * x.transpose();
        }
        a /= static_cast<double>(s) * l2;
        Eigen::SelfAdjointEigenSolver<Mat> eig(a);
        lo_eig[static_cast<std::size_t>(trial)] = eig.eigenvalues().minCoeff();
        hi_eig[static_cast<std::size_t>(trial)] = eig.eigenvalues().maxCoeff();
        in_band[static_cast<std::size_t>(trial)] =
            (lo_eig[static_cast<std::size_t>(trial)] >= 0.5 &&
             hi_eig[static_cast<std::size_t>(trial)] <= 1.5)
                ? 1
                : 0;
        for (int i = 0; i < n * n; ++i) flat(trial, i) = a(i / n, i % n);
    });
    for (int trial = 0; trial < trials; ++trial) {
        rep.in_band += in_band[static_cast<std::size_t>(trial)];
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, lo_eig[static_cast<std::size_t>(trial)]);
        rep.max_eigenvalue = std::max(rep.max_eigenvalue, hi_eig[static_cast<std::size_t>(trial)]);
    }

    // E[(1/(s L^2)) sum x x'] = I: entrywise deviation in SE units.
    for (int i = 0; i < n * n; ++i) {
        const double mean = flat.col(i).mean();
        const double sd = std::sqrt((flat.col(i).array() - mean).square().sum() /
                                    static_cast<double>(trials - 1));
        const double se = std::max(sd / std::sqrt(static_cast<double>(trials)), 1e-15);
        const double target = (i / n == i % n) ? 1.0 : 0.0;
        rep.mean_matrix_dev_se = std::max(rep.mean_matrix_dev_se, std::abs(mean - target) / se);
    }
    return rep;
}

GmScanReport gm_lower_bound_scan(const MultiNormContext& ctx, int s, int directions,
                                 RngKey stream, std::int64_t count)
{
    if (s < 1 || directions < 1)
        throw std::invalid_argument("gm_lower_bound_scan: s, directions must be >= 1");
    const int n = ctx.c.dim();

    std::vector<Vec> dirs;
    dirs.push_back(Vec::Unit(s, 0));
    dirs.push_back(Vec::Constant(s, 1.0 / std::sqrt(static_cast<double>(s))));
    {
        Rng rng(stream.derive(1), 0);
        for (int d = 2; d < directions; ++d) dirs.push_back(random_unit(rng, s));
    }

    std::vector<Estimate> vals(dirs.size());
    const RngKey draw_key = stream.derive(2);
    parallel_for(static_cast<std::int64_t>(dirs.size()), [&](std::int64_t d) {
        vals[static_cast<std::size_t>(d)] =
            nu_norm_blocks(ctx.c, ctx.k, dirs[static_cast<std::size_t>(d)],
                           draw_key.derive(static_cast<std::uint64_t>(d)), count);
    });

    GmScanReport rep;
    rep.directions = static_cast<int>(dirs.size());
    std::size_t best = 0;
    for (std::size_t d = 1; d < vals.size(); ++d)
        if (vals[d].value < vals[best].value) best = d;
    rep.min_norm = vals[best];
    rep.min_direction = dirs[best];
    rep.empirical_c = rep.min_norm.value;

    Estimate m = big_m(ctx.k, stream.derive(3), std::max<std::int64_t>(count, 100000));
    const double normalizer =
        ctx.l.value * gaussian_norm_mean(n) * m.value / std::sqrt(static_cast<double>(n));
    rep.normalized_constant = rep.min_norm.value / normalizer;
    return rep;
}

CriticalDimensionReport critical_dimension_report(const MultiNormContext& ctx, int s,
                                                  RngKey stream)
{
    if (s < 1) throw std::invalid_argument("critical_dimension_report: s must be >= 1");
    CriticalDimensionReport rep;
    rep.s = s;
    MOfBallReport m = m_of_ball(ctx, s, stream.derive(1), 128, 2000);
    rep.m_bs = m.sphere_route;

    std::vector<Vec> dirs;
    dirs.push_back(Vec::Unit(s, 0));
    dirs.push_back(Vec::Constant(s, 1.0 / std::sqrt(static_cast<double>(s))));
    {
        Rng rng(stream.derive(2), 0);
        for (int d = 0; d < 510; ++d) dirs.push_back(random_unit(rng, s));
    }
    std::vector<Estimate> vals(dirs.size());
    const RngKey draw_key = stream.derive(3);
    parallel_for(static_cast<std::int64_t>(dirs.size()), [&](std::int64_t d) {
        vals[static_cast<std::size_t>(d)] =
            nu_norm_blocks(ctx.c, ctx.k, dirs[static_cast<std::size_t>(d)],
                           draw_key.derive(static_cast<std::uint64_t>(d)), 2000);
    });
    std::size_t best = 0;
    for (std::size_t d = 1; d < vals.size(); ++d)
        if (vals[d].value > vals[best].value) best = d;
    rep.b_hat = vals[best];
    rep.k_hat = static_cast<double>(s) * (rep.m_bs.value / rep.b_hat.value) *
                (rep.m_bs.value / rep.b_hat.value);
    return rep;
}

} // namespace isonorm
