#pragma once

#include "isonorm/batch.hpp"
#include "isonorm/body.hpp"
#include "isonorm/estimate.hpp"
#include "isonorm/measure.hpp"

#include <cstdint>
#include <utility>

namespace isonorm {

struct MomentEstimate {
    Vec mean;
    Mat cov; // unbiased
    Vec mean_se;
    Mat cov_se;
    bool degenerate = false; // some direction has (near-)zero variance
};

/// Record of one whitening run. The deviations ARE the certificate; nothing
/// is silently rounded to a pass/fail.
struct IsotropicCertificate {
    Mat T;          // applied map: x -> T x, det > 0
    Vec shift;      // estimated barycenter of the input (recorded, not applied:
                    // every body variant is exactly centered by construction)
    Estimate L;     // isotropic constant of the output body
    double cov_dev = 0.0;  // max |Cov - L^2 I| entry, relative to L^2
    double bary_dev = 0.0; // ||barycenter estimate||_inf of the output
    double vol_dev = 0.0;  // relative SE of the output volume
};

/// Sample mean/covariance with batch-means standard errors. Requires >= 100
/// points.
MomentEstimate estimate_moments(const SampleBatch& batch);

/// Body volume: closed form when the body carries one (SE 0), otherwise
/// rejection counting against the circumscribed box (dim <= 10).
Estimate estimate_volume(const Body& body, RngKey stream, double target_rel_se = 0.01);

/// Map the body to isotropic position: C* = alpha * Cov^{-1/2} C with
/// vol(C*) = 1, flagged isotropic, plus the certificate of what was measured.
std::pair<Body, IsotropicCertificate> isotropic_transform(const Body& body, RngKey stream,
                                                          std::int64_t sample_budget = 0);

/// L = det(Cov)^{1/(2n)} of the volume-1 normalized body.
Estimate isotropic_constant(const Body& body, RngKey stream, std::int64_t sample_budget = 0);

/// sqrt(Var ||X||_2) for an isotropic measure.
Estimate thin_shell_sigma(const MeasureSpec& measure, RngKey stream, std::int64_t count);

/// Lower bound for sup_xi sum_ij (E[x_i x_j <x,xi>])^2: max over random
/// directions plus a powered-up refinement direction, each evaluated by an
/// unbiased U-statistic on independent draws.
Estimate tau_statistic(const MeasureSpec& measure, RngKey stream, std::int64_t count,
                       int directions = 16);

} // namespace isonorm
