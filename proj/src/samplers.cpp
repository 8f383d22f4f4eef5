#include "isonorm/samplers.hpp"

#include "isonorm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace isonorm {

namespace {

constexpr std::int64_t kChunk = 4096;

std::int64_t chunk_count(std::int64_t count) { return (count + kChunk - 1) / kChunk; }

void ball_point(Rng& rng, double radius, Vec& out)
{
    sphere_point(rng, out);
    out *= radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(out.size()));
}

// Fill `count` points, one chunk of rows per RNG substream, in parallel.
// The layout is fixed by (stream, chunk index), so the result is identical
// for every worker count.
template <typename PointFn>
Mat fill_points(int dim, std::int64_t count, RngKey stream, PointFn&& point_fn)
{
    Mat points(count, dim);
    parallel_for(chunk_count(count), [&](std::int64_t chunk) {
        Rng rng(stream, static_cast<std::uint32_t>(chunk));
        std::int64_t lo = chunk * kChunk;
        std::int64_t hi = std::min(count, lo + kChunk);
        Vec x(dim);
        for (std::int64_t r = lo; r < hi; ++r) {
            point_fn(rng, x);
            points.row(r) = x;
        }
    });
    return points;
}

} // namespace

void gaussian_point(Rng& rng, Vec& out)
{
    for (int i = 0; i < out.size(); ++i) out[i] = rng.normal();
}

void sphere_point(Rng& rng, Vec& out)
{
    do {
        gaussian_point(rng, out);
    } while (out.norm() == 0.0);
    out /= out.norm();
}

UniformPointSampler::UniformPointSampler(Body body) : body_(std::move(body))
{
    radius_ = body_.circumradius_ub();
    // Walk the transform chain; a cube base means exact direct sampling.
    const Body* cur = &body_;
    std::vector<const Body::Spec*> chain;
    while (true) {
        if (const auto* s = std::get_if<Body::CubeSpec>(&cur->spec())) {
            boxed_ = true;
            half_width_ = s->half_width;
            break;
        }
        if (const auto* s = std::get_if<Body::LinearImageSpec>(&cur->spec())) {
            chain.push_back(&cur->spec());
            cur = s->inner.get();
            continue;
        }
        if (const auto* s = std::get_if<Body::ScaledSpec>(&cur->spec())) {
            chain.push_back(&cur->spec());
            cur = s->inner.get();
            continue;
        }
        break;
    }
    if (!boxed_) return;
    // Record maps innermost-first.
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        if (const auto* s = std::get_if<Body::LinearImageSpec>(*it)) {
            maps_.push_back(s->T);
        } else {
            maps_.emplace_back();
            scales_.push_back(std::get<Body::ScaledSpec>(**it).c);
        }
    }
}

std::int64_t UniformPointSampler::draw(Rng& rng, Vec& out) const
{
    const int n = body_.dim();
    if (out.size() != n) out.resize(n);
    if (boxed_) {
        for (int i = 0; i < n; ++i) out[i] = half_width_ * rng.uniform_sym();
        std::size_t scale_idx = 0;
        for (const Mat& map : maps_) {
            if (map.size() == 0)
                out *= scales_[scale_idx++];
            else
                out = map * out;
        }
        return 1;
    }
    for (std::int64_t tried = 1;; ++tried) {
        ball_point(rng, radius_, out);
        if (body_.gauge(out) <= 1.0) return tried;
        if (tried >= 1000000)
            throw AcceptanceTooLow("uniform sampling: acceptance below 1e-6 for one point");
    }
}

SampleBatch sample_sphere(int dim, std::int64_t count, RngKey stream)
{
    if (dim < 1 || count < 1) throw std::invalid_argument("sample_sphere: dim, count must be >= 1");
    SampleBatch batch;
    batch.points = fill_points(dim, count, stream, [](Rng& rng, Vec& x) { sphere_point(rng, x); });
    batch.source = "sphere" + std::to_string(dim);
    batch.stream = stream;
    return batch;
}

SampleBatch sample_gaussian(int dim, std::int64_t count, RngKey stream)
{
    if (dim < 1 || count < 1)
        throw std::invalid_argument("sample_gaussian: dim, count must be >= 1");
    SampleBatch batch;
    batch.points = fill_points(dim, count, stream, [](Rng& rng, Vec& x) { gaussian_point(rng, x); });
    batch.source = "gaussian" + std::to_string(dim);
    batch.stream = stream;
    return batch;
}

Mat sample_haar_rotation(int dim, RngKey stream)
{
    if (dim < 1) throw std::invalid_argument("sample_haar_rotation: dim must be >= 1");
    Rng rng(stream, 0);
    Mat g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i)
        if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    return q;
}

SampleBatch sample_uniform_rejection(const Body& body, std::int64_t count, RngKey stream)
{
    if (count < 1) throw std::invalid_argument("sample_uniform_rejection: count must be >= 1");
    const int n = body.dim();
    UniformPointSampler sampler(body);

    SampleBatch batch;
    batch.method = SampleMethod::rejection;
    batch.source = "uniform:" + body.label();
    batch.stream = stream;
    batch.points.resize(count, n);

    const std::int64_t chunks = chunk_count(count);
    std::vector<std::int64_t> proposals(static_cast<std::size_t>(chunks), 0);
    parallel_for(chunks, [&](std::int64_t chunk) {
        Rng rng(stream, static_cast<std::uint32_t>(chunk));
        std::int64_t lo = chunk * kChunk;
        std::int64_t hi = std::min(count, lo + kChunk);
        std::int64_t tried = 0;
        Vec x(n);
        for (std::int64_t r = lo; r < hi; ++r) {
            tried += sampler.draw(rng, x);
            batch.points.row(r) = x;
            if (tried >= 1000000 && static_cast<double>(r - lo + 1) < 1e-5 * static_cast<double>(tried))
                throw AcceptanceTooLow("sample_uniform_rejection: acceptance below 1e-5");
        }
        proposals[static_cast<std::size_t>(chunk)] = tried;
    });
    std::int64_t total = 0;
    for (std::int64_t p : proposals) total += p;
    batch.acceptance_rate = static_cast<double>(count) / static_cast<double>(total);
    return batch;
}

SampleBatch sample_hit_and_run(const Body& body, std::int64_t count, RngKey stream,
                               std::int64_t burn_in, std::int64_t thinning, std::optional<Vec> x0)
{
    if (count < 1) throw std::invalid_argument("sample_hit_and_run: count must be >= 1");
    const int n = body.dim();
    if (burn_in < 0) burn_in = 10 * static_cast<std::int64_t>(n) * n;
    if (thinning < 1) thinning = n;

    Vec x = x0.value_or(Vec::Zero(n));
    if (x.size() != n || body.gauge(x) >= 1.0)
        throw std::invalid_argument("sample_hit_and_run: x0 must be strictly interior");

    Rng rng(stream, 0);
    SampleBatch batch;
    batch.points.resize(count, n);
    batch.method = SampleMethod::hit_and_run;
    batch.source = "uniform:" + body.label();
    batch.stream = stream;
    batch.burn_in = burn_in;
    batch.thinning = thinning;

    Vec theta(n);
    auto boundary = [&](const Vec& from, const Vec& dir) {
        // largest lambda >= 0 with gauge(from + lambda*dir) <= 1
        double lo = 0.0;
        double hi = body.circumradius_ub() + from.norm() + 1.0;
        if (body.gauge(from + hi * dir) <= 1.0)
            throw std::runtime_error("sample_hit_and_run: chord solve failed (oracle mismatch)");
        while (hi - lo > 1e-12 * (1.0 + hi)) {
            double mid = 0.5 * (lo + hi);
            (body.gauge(from + mid * dir) <= 1.0 ? lo : hi) = mid;
        }
        return lo;
    };

    std::int64_t emitted = 0;
    for (std::int64_t step = 0; emitted < count; ++step) {
        sphere_point(rng, theta);
        double fwd = boundary(x, theta);
        double bwd = boundary(x, -theta);
        double u = rng.uniform01();
        x += (-bwd + u * (bwd + fwd)) * theta;
        if (step >= burn_in && (step - burn_in) % thinning == thinning - 1)
            batch.points.row(emitted++) = x;
    }
    return batch;
}

namespace {

SampleBatch sample_uniform_auto(const Body& body, std::int64_t count, RngKey stream)
{
    if (UniformPointSampler(body).direct() || body.dim() <= 10)
        return sample_uniform_rejection(body, count, stream);
    return sample_hit_and_run(body, count, stream);
}

} // namespace

SampleBatch sample_nu_t(const Body& c_iso, const Vec& t, std::int64_t count, RngKey stream)
{
    if (!c_iso.isotropic_flag())
        throw std::invalid_argument("sample_nu_t: body must carry the isotropic flag");
    const auto s = static_cast<std::int64_t>(t.size());
    if (s < 1) throw std::invalid_argument("sample_nu_t: need at least one weight");
    if (count < 1) throw std::invalid_argument("sample_nu_t: count must be >= 1");

    SampleBatch uni = sample_uniform_auto(c_iso, count * s, stream);
    SampleBatch batch;
    batch.points = Mat::Zero(count, c_iso.dim());
    for (std::int64_t k = 0; k < count; ++k)
        for (std::int64_t j = 0; j < s; ++j) batch.points.row(k) += t[j] * uni.points.row(k * s + j);
    batch.method = uni.method;
    batch.burn_in = uni.burn_in;
    batch.thinning = uni.thinning;
    batch.acceptance_rate = uni.acceptance_rate;
    batch.source = "nu_t[s=" + std::to_string(s) + "]:" + c_iso.label();
    batch.stream = stream;
    return batch;
}

SampleBatch sample_measure(const MeasureSpec& measure, std::int64_t count, RngKey stream)
{
    struct Visitor {
        std::int64_t count;
        RngKey stream;
        SampleBatch operator()(const MeasureSpec::UniformOnBody& m) const
        {
            return sample_uniform_auto(m.body, count, stream);
        }
        SampleBatch operator()(const MeasureSpec::StandardGaussian& m) const
        {
            return sample_gaussian(m.dim, count, stream);
        }
        SampleBatch operator()(const MeasureSpec::WeightedSum& m) const
        {
            return sample_nu_t(m.body, m.t, count, stream);
        }
        SampleBatch operator()(const MeasureSpec::Rescaled& m) const
        {
            SampleBatch batch = sample_measure(*m.inner, count, stream);
            batch.points *= m.factor;
            batch.source = "rescaled:" + batch.source;
            return batch;
        }
    };
    return std::visit(Visitor{count, stream}, measure.variant());
}

} // namespace isonorm
