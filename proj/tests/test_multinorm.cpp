#include "isonorm/multinorm.hpp"
#include "isonorm/special.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace isonorm;

namespace {

MultiNormContext cube_context(int n, Body k, RngKey key)
{
    return make_context(Body::cube(n).with_isotropic_flag(), std::move(k), key);
}

} // namespace

TEST_CASE("context on a flagged cube estimates L without transforming")
{
    const auto ctx = cube_context(3, Body::euclidean_ball(3), RngKey{501, 0});
    CHECK(ctx.l.value == doctest::Approx(oracles::l_cube()).epsilon(0.01));
    CHECK(ctx.certificate.cov_dev < 0.05);
    CHECK(ctx.certificate.T.isApprox(Mat::Identity(3, 3)));

    // Unflagged round body: transform kicks in, L matches the disk constant.
    const auto ctx2 = make_context(Body::euclidean_ball(2), Body::cube(2), RngKey{501, 1});
    CHECK(ctx2.l.value == doctest::Approx(oracles::l_disk()).epsilon(0.02));
    CHECK(ctx2.c.isotropic_flag());
}

TEST_CASE("one-dimensional norms match the trapezoid quadrature")
{
    const auto ctx = cube_context(1, Body::cube(1), RngKey{502, 0});
    Vec t(2);
    t << 1.0, 1.0;
    const auto n11 = multi_norm(ctx, t, RngKey{502, 1}, 400000);
    CHECK(std::abs(n11.value - oracles::norm_1d(1.0, 1.0)) < 3.0 * n11.std_error);

    t << 2.0, 1.0;
    const auto n21 = multi_norm(ctx, t, RngKey{502, 2}, 400000);
    CHECK(std::abs(n21.value - oracles::norm_1d(2.0, 1.0)) < 3.0 * n21.std_error);

    // Exact homogeneity on the shared stream.
    const auto n63 = multi_norm(ctx, (3.0 * t).eval(), RngKey{502, 2}, 400000);
    CHECK(n63.value == doctest::Approx(3.0 * n21.value).epsilon(1e-13));

    // Zero weights: zero, exactly.
    CHECK(multi_norm(ctx, Vec::Zero(2), RngKey{502, 3}, 100).value == 0.0);
}

TEST_CASE("basic identity: independent-stream LHS and RHS agree")
{
    const auto ctx = cube_context(3, Body::euclidean_ball(3), RngKey{503, 0});
    Vec t(4);
    t << 0.5, -0.3, 0.8, 0.1;
    t /= t.norm();
    const auto rep = identity_check(ctx, t, RngKey{503, 1}, 150000);
    CHECK(std::abs(rep.gap_se_units) <= 3.0);
    CHECK(rep.lhs.value > 0.0);
}

TEST_CASE("nu_t covariance is L^2 I for unit weights")
{
    const auto ctx = cube_context(3, Body::euclidean_ball(3), RngKey{504, 0});
    Vec t(5);
    t << 1.0, 2.0, -1.0, 0.5, 0.25;
    t /= t.norm();
    const auto rep = covariance_check_nu_t(ctx, t, RngKey{504, 1}, 400000);
    CHECK(rep.max_diag_rel_dev <= 0.02);
    CHECK(rep.max_offdiag_se_units <= 4.0);
    CHECK(rep.l_squared == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("M(B_s) sphere and gaussian routes")
{
    const auto ctx = cube_context(2, Body::euclidean_ball(2), RngKey{505, 0});
    const auto rep = m_of_ball(ctx, 4, RngKey{505, 1}, 96, 1500);
    CHECK(std::abs(rep.gap_se_units) <= 3.0);
    CHECK(rep.gaussian_norm == doctest::Approx(gaussian_norm_mean(4)));
    CHECK(rep.sphere_route.value > 0.0);
}

TEST_CASE("permutation and sign invariance on shared streams")
{
    const auto ctx = cube_context(2, Body::euclidean_ball(2), RngKey{506, 0});
    const auto rep = symmetry_check(ctx, 5, 16, RngKey{506, 1}, 30000);
    CHECK(rep.max_dev_se_units <= 3.5);
    CHECK(rep.max_triangle_excess_se <= 3.0);
}

TEST_CASE("rotation-average identity")
{
    const auto rep = rotation_average_check(
        MeasureSpec::uniform_on(Body::cube(2).with_isotropic_flag()), Body::cube(2, 1.0), 64,
        RngKey{507, 0}, 20000);
    CHECK(std::abs(rep.gap_se_units) <= 3.0);
}

TEST_CASE("empirical covariance spectral band")
{
    const auto ctx = cube_context(3, Body::euclidean_ball(3), RngKey{508, 0});
    const auto rep = alpt_spectral_check(ctx, 64, 50, RngKey{508, 1});
    CHECK(rep.in_band >= 45);
    CHECK(rep.min_eigenvalue > 0.0);
    CHECK(rep.mean_matrix_dev_se <= 4.0);
}

TEST_CASE("lower-bound scan keeps canonical directions and positivity")
{
    const auto ctx = cube_context(2, Body::euclidean_ball(2), RngKey{509, 0});
    const auto rep = gm_lower_bound_scan(ctx, 6, 16, RngKey{509, 1}, 4000);
    CHECK(rep.min_norm.value > 0.0);
    CHECK(rep.empirical_c == rep.min_norm.value);
    CHECK(rep.normalized_constant > 0.0);
    CHECK(rep.min_direction.size() == 6);
    CHECK(rep.min_direction.norm() == doctest::Approx(1.0));
    CHECK(rep.directions >= 16);
}

TEST_CASE("critical dimension proxy is finite and positive")
{
    const auto ctx = cube_context(2, Body::euclidean_ball(2), RngKey{510, 0});
    const auto rep = critical_dimension_report(ctx, 8, RngKey{510, 1});
    CHECK(std::isfinite(rep.k_hat));
    CHECK(rep.k_hat > 0.0);
    CHECK(rep.b_hat.value >= rep.m_bs.value * 0.5); // b is a max, M an average
    CHECK(rep.s == 8);
}
