#pragma once

#include "isonorm/body.hpp"
#include "isonorm/estimate.hpp"
#include "isonorm/isotropy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isonorm {

struct SamplerPolicy {
    enum class Kind { automatic, rejection, hit_and_run };
    Kind kind = Kind::automatic;
    std::int64_t burn_in = -1;  // hit-and-run only; -1 = default 10 n^2
    std::int64_t thinning = -1; // -1 = default n
};

/// The pair (C, K) every multi-integral quantity is computed against:
/// C isotropic of volume 1 with its certificate, K any body of the same
/// dimension, L the isotropic constant estimate of C.
struct MultiNormContext {
    Body c;
    Body k;
    Estimate l;
    IsotropicCertificate certificate;
    SamplerPolicy policy;
};

/// Build a context: C is transformed to isotropic position unless already
/// flagged (then only L is estimated).
MultiNormContext make_context(const Body& c, const Body& k, RngKey stream,
                              std::int64_t sample_budget = 0, SamplerPolicy policy = {});

/// ||t|| = E gauge(K, sum_j t_j X_j). Exactly 1-homogeneous: t is normalized
/// internally and the estimate rescaled by ||t||_2.
Estimate multi_norm(const MultiNormContext& ctx, const Vec& t, RngKey stream, std::int64_t count);

struct CovarianceCheckReport {
    Mat cov;
    Vec cov_diag_se;
    double l_squared = 0.0;
    double max_diag_rel_dev = 0.0;    // max |cov_ii - L^2| / L^2
    double max_offdiag_se_units = 0.0;
};

/// Cov(nu_t) = L^2 I for unit t.
CovarianceCheckReport covariance_check_nu_t(const MultiNormContext& ctx, const Vec& t,
                                            RngKey stream, std::int64_t count);

struct IdentityCheckReport {
    Estimate lhs; // multi_norm
    Estimate rhs; // L * I_1(mu_t, K), independent stream
    double gap_se_units = 0.0;
};

/// Basic identity ||t|| = L * I_1(mu_t, K) on independent streams. The same
/// L estimate scales mu_t and multiplies I_1, so it cancels exactly and its
/// SE is excluded from the combined SE.
IdentityCheckReport identity_check(const MultiNormContext& ctx, const Vec& t, RngKey stream,
                                   std::int64_t count);

struct MOfBallReport {
    Estimate sphere_route;   // mean of multi_norm over unit t
    Estimate gaussian_route; // mean of multi_norm over Gaussian t, / E||g_s||_2
    double gaussian_norm = 0.0;
    double gap_se_units = 0.0;
};

/// M(B_s) by the sphere route and the Gaussian route (exact E||g_s||_2
/// factor), cross-checked.
MOfBallReport m_of_ball(const MultiNormContext& ctx, int s, RngKey stream,
                        std::int64_t outer_count, std::int64_t inner_count);

struct SymmetryCheckReport {
    double max_dev_se_units = 0.0;      // over random (t, permutation, signs)
    double max_triangle_excess_se = 0.0; // max (||t+u|| - ||t|| - ||u||) / SE
    int trials = 0;
};

/// 1-symmetry of the norm under shared-stream (CRN) evaluation, plus the
/// triangle inequality on shared draws.
SymmetryCheckReport symmetry_check(const MultiNormContext& ctx, int s, int trials, RngKey stream,
                                   std::int64_t count);

struct RotationAverageReport {
    Estimate lhs; // mean over Haar U of I_1(mu, U(K))
    Estimate rhs; // M(K) * E||X||_2
    double gap_se_units = 0.0;
};

/// Fubini identity: averaging I_1(mu, U(K)) over O(n) gives M(K) E||X||_2.
RotationAverageReport rotation_average_check(const MeasureSpec& measure, const Body& k,
                                             int rotations, RngKey stream, std::int64_t count);

struct AlptSpectralReport {
    int trials = 0;
    int in_band = 0;             // spectrum of (1/(s L^2)) sum x_j x_j' in [1/2, 3/2]
    double min_eigenvalue = 0.0; // across all trials
    double max_eigenvalue = 0.0;
    double mean_matrix_dev_se = 0.0; // entrywise |mean - I| in SE units
};

AlptSpectralReport alpt_spectral_check(const MultiNormContext& ctx, int s, int trials,
                                       RngKey stream);

struct GmScanReport {
    Estimate min_norm; // over scanned unit t
    Vec min_direction;
    double empirical_c = 0.0;          // = min_norm (unit t)
    double normalized_constant = 0.0;  // min / (L * E||g_n||_2 * M(K) / sqrt(n))
    int directions = 0;
};

/// min ||t|| over random unit t (canonical directions always included):
/// the empirical constant of the sqrt-sum lower bound.
GmScanReport gm_lower_bound_scan(const MultiNormContext& ctx, int s, int directions,
                                 RngKey stream, std::int64_t count);

struct CriticalDimensionReport {
    Estimate m_bs;    // M(B_s), sphere route
    Estimate b_hat;   // max ||t|| over the scan (empirical circumscribed radius)
    double k_hat = 0.0; // s (M/b)^2, an empirical proxy
    int s = 0;
};

CriticalDimensionReport critical_dimension_report(const MultiNormContext& ctx, int s,
                                                  RngKey stream);

} // namespace isonorm
