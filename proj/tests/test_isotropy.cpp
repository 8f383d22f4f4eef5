#include "isonorm/isotropy.hpp"
#include "isonorm/samplers.hpp"
#include "isonorm/special.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace isonorm;

TEST_CASE("moment estimates recover the cube law")
{
    const auto batch = sample_measure(MeasureSpec::uniform_on(Body::cube(3)), 200000,
                                      RngKey{301, 0});
    const auto mom = estimate_moments(batch);
    CHECK_FALSE(mom.degenerate);
    CHECK(mom.mean.cwiseAbs().maxCoeff() < 4.0 * mom.mean_se.maxCoeff());
    for (int i = 0; i < 3; ++i)
        CHECK(mom.cov(i, i) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
    CHECK(std::abs(mom.cov(0, 1)) < 4.0 * mom.cov_se(0, 1) + 1e-6);

    // A flat direction must be flagged.
    SampleBatch flat = batch;
    flat.points.col(2).setZero();
    CHECK(estimate_moments(flat).degenerate);
}

TEST_CASE("volume estimator: exact path and box Monte Carlo")
{
    const auto exact = estimate_volume(Body::euclidean_ball(3), RngKey{302, 0});
    CHECK(exact.value == doctest::Approx(unit_ball_volume(3)));
    CHECK(exact.std_error == 0.0);

    // Cross-polytope has no closed form in the oracle; MC against 2^n/n!.
    const int n = 1 << 3;
    Mat a(n, 3);
    for (int row = 0; row < n; ++row)
        for (int j = 0; j < 3; ++j) a(row, j) = (row >> j) & 1 ? 1.0 : -1.0;
    const Body b1 = Body::polytope(a, Vec::Constant(n, 1.0));
    CHECK_FALSE(b1.volume().has_value());
    const auto mc = estimate_volume(b1, RngKey{302, 1}, 0.01);
    CHECK(std::abs(mc.value - oracles::b1_volume(3)) < 4.0 * mc.std_error);
    CHECK(mc.std_error < 0.011 * mc.value * 1.5);
}

TEST_CASE("isotropic transform whitens a sheared cube")
{
    Mat t(2, 2);
    t << 2.0, 0.7, 0.0, 0.5;
    const Body sheared = Body::linear_image(t, Body::cube(2));
    const auto [iso, cert] = isotropic_transform(sheared, RngKey{303, 0});
    CHECK(iso.isotropic_flag());
    REQUIRE(iso.volume().has_value());
    CHECK(iso.volume()->value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cert.cov_dev < 0.05);
    CHECK(cert.bary_dev < 0.02);
    // Affine images of the cube share L = 12^{-1/2}.
    CHECK(cert.L.value == doctest::Approx(oracles::l_cube()).epsilon(0.01));
}

TEST_CASE("isotropic constants of cube and disk")
{
    for (int n = 2; n <= 4; ++n) {
        const auto l = isotropic_constant(Body::cube(n), RngKey{304, std::uint64_t(n)});
        CHECK(l.value == doctest::Approx(oracles::l_cube()).epsilon(0.01));
    }
    const auto disk = isotropic_constant(Body::euclidean_ball(2), RngKey{304, 9});
    CHECK(disk.value == doctest::Approx(oracles::l_disk()).epsilon(0.01));
}

TEST_CASE("thin shell and tau on reference measures")
{
    const auto sigma = thin_shell_sigma(MeasureSpec::gaussian(20), RngKey{305, 0}, 150000);
    CHECK(std::abs(sigma.value - oracles::gaussian_thin_shell(20)) < 3.5 * sigma.std_error);

    // Even measure: tau should be statistically zero (scan biases upward).
    const auto tau = tau_statistic(MeasureSpec::gaussian(2), RngKey{305, 1}, 100000);
    CHECK(std::abs(tau.value) < 5.0 * tau.std_error + 1e-6);
}
