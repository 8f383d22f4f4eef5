#pragma once

#include "isonorm/batch.hpp"
#include "isonorm/body.hpp"
#include "isonorm/measure.hpp"
#include "isonorm/rng.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace isonorm {

/// Rejection sampling stalled: running acceptance < 1e-5 after 1e6 proposals.
struct AcceptanceTooLow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One standard-normal / unit-sphere point, written in place.
void gaussian_point(Rng& rng, Vec& out);
void sphere_point(Rng& rng, Vec& out);

/// Draws exact uniform points one at a time: directly for cubes and their
/// linear images (pushforward through the transform chain), by circumball
/// rejection otherwise.
class UniformPointSampler {
public:
    explicit UniformPointSampler(Body body);
    /// Writes one point; returns the number of proposals consumed (1 when
    /// direct). Throws AcceptanceTooLow past 1e6 proposals for one point.
    std::int64_t draw(Rng& rng, Vec& out) const;
    bool direct() const { return boxed_; }

private:
    Body body_;
    double radius_ = 0.0;
    bool boxed_ = false;
    double half_width_ = 0.0;
    std::vector<Mat> maps_; // innermost-first; empty matrix = pure scaling
    std::vector<double> scales_;
};

SampleBatch sample_sphere(int dim, std::int64_t count, RngKey stream);
SampleBatch sample_gaussian(int dim, std::int64_t count, RngKey stream);

/// Haar-distributed orthogonal matrix: Gaussian matrix factored as QR with
/// the positive-diagonal-R sign convention.
Mat sample_haar_rotation(int dim, RngKey stream);

/// Exact uniform law on the body. Proposal is the circumradius ball, except
/// for cubes (and linear images of cubes) where the box is sampled directly.
SampleBatch sample_uniform_rejection(const Body& body, std::int64_t count, RngKey stream);

/// Hit-and-run chain with gauge-bisection chord solving (1e-12 brackets).
/// Defaults (pass -1): burn_in = 10 n^2, thinning = n.
SampleBatch sample_hit_and_run(const Body& body, std::int64_t count, RngKey stream,
                               std::int64_t burn_in = -1, std::int64_t thinning = -1,
                               std::optional<Vec> x0 = std::nullopt);

/// Weighted-sum law nu_t: points t_1 X_1 + ... + t_s X_s, X_j i.i.d. uniform
/// on the isotropic body.
SampleBatch sample_nu_t(const Body& c_iso, const Vec& t, std::int64_t count, RngKey stream);

/// Dispatch on the measure variant; uniform-on-body picks the best sampler
/// (box/rejection up to dim 10, hit-and-run above).
SampleBatch sample_measure(const MeasureSpec& measure, std::int64_t count, RngKey stream);

} // namespace isonorm
