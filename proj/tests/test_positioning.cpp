#include "isonorm/positioning.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace isonorm;

TEST_CASE("volume-ratio floor with explicit constant")
{
    const auto rep = milman_pajor_check(Body::cube(3), Body::euclidean_ball(3), RngKey{601, 0},
                                        150000);
    CHECK(rep.floor_ok);
    CHECK(rep.lhs.value > rep.rhs - 3.0 * (rep.lhs.std_error + rep.rhs_se));

    // Equality case C = K: lhs = n/(n+1) exactly in expectation.
    const auto eq = milman_pajor_check(Body::cube(3), Body::cube(3), RngKey{601, 1}, 150000);
    CHECK(eq.floor_ok);
    CHECK(std::abs(eq.gap_se_units) <= 3.0);
    CHECK(eq.rhs == doctest::Approx(0.75));
}

TEST_CASE("position search recovers a planted optimum in SL(2)")
{
    Mat s0(2, 2);
    s0 << 0.25, -0.15, 0.3, -0.25; // traceless
    Mat t0 = s0.exp();
    t0 *= std::pow(t0.determinant(), -0.5);
    const Body c = Body::cube(2);
    const Body k = Body::linear_image(t0.inverse(), c);

    const auto rep = optimize_position(c, k, RngKey{602, 0}, 1200, 8, 6000);
    const double floor = 2.0 / 3.0;
    CHECK(rep.det_t == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.ratio <= 1.10 * floor);
    CHECK(rep.ratio >= floor - 3.0 * rep.objective.std_error);
    for (std::size_t i = 1; i < rep.trace.size(); ++i)
        CHECK(rep.trace[i] <= rep.trace[i - 1] + 1e-12);
    CHECK(rep.winner_restart >= 0);
}

TEST_CASE("identity start is already optimal when C equals K")
{
    const auto rep = optimize_position(Body::cube(2), Body::cube(2), RngKey{603, 0}, 800, 4,
                                       6000);
    CHECK(rep.ratio == doctest::Approx(2.0 / 3.0).epsilon(0.03));
    CHECK(rep.det_t == doctest::Approx(1.0).epsilon(1e-9));
}
