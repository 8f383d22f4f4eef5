#include "isonorm/body.hpp"
#include "isonorm/json_io.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace isonorm;

namespace {

Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

Vec v3(double a, double b, double c)
{
    Vec v(3);
    v << a, b, c;
    return v;
}

/// Cross-polytope |x_1| + ... + |x_n| <= r as 2^n halfspaces.
Body cross_polytope(int n, double r)
{
    const int m = 1 << n;
    Mat a(m, n);
    for (int row = 0; row < m; ++row)
        for (int j = 0; j < n; ++j) a(row, j) = (row >> j) & 1 ? 1.0 : -1.0;
    return Body::polytope(a, Vec::Constant(m, r));
}

} // namespace

TEST_CASE("gauge closed forms")
{
    const Vec x = v3(0.3, -0.4, 1.2);
    CHECK(Body::euclidean_ball(3).gauge(x) == doctest::Approx(x.norm()));
    CHECK(Body::euclidean_ball(3, 2.0).gauge(x) == doctest::Approx(x.norm() / 2.0));
    CHECK(Body::cube(3).gauge(x) == doctest::Approx(2.0 * 1.2));
    CHECK(Body::p_ball(3, 1.0).gauge(x) == doctest::Approx(0.3 + 0.4 + 1.2));
    CHECK(Body::p_ball(3, 3.0).gauge(x)
          == doctest::Approx(std::pow(0.027 + 0.064 + 1.728, 1.0 / 3.0)));

    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 1.0;
    CHECK(Body::ellipsoid(m).gauge(v2(0.5, 0.0)) == doctest::Approx(1.0)); // semi-axis 1/2
    CHECK(Body::scaled(3.0, Body::cube(2)).gauge(v2(1.5, 0.0)) == doctest::Approx(1.0));
}

TEST_CASE("support equals polar gauge and respects duality")
{
    const Vec y = v3(1.0, -2.0, 0.5);
    CHECK(Body::euclidean_ball(3).support(y) == doctest::Approx(y.norm()));
    CHECK(Body::cube(3).support(y) == doctest::Approx(0.5 * (1.0 + 2.0 + 0.5)));
    CHECK(Body::p_ball(3, 1.0).support(y) == doctest::Approx(2.0)); // ||y||_inf
    // l_p / l_q duality at p = 3.
    const double q = 1.5;
    Vec yy = v3(0.2, 0.7, -0.1);
    const double lq = std::pow(std::pow(0.2, q) + std::pow(0.7, q) + std::pow(0.1, q), 1.0 / q);
    CHECK(Body::p_ball(3, 3.0).support(yy) == doctest::Approx(lq));
    CHECK(Body::p_ball(3, 3.0).polar_gauge(yy) == doctest::Approx(lq));

    // Linear images: h_{TK}(y) = h_K(T'y).
    Mat t(2, 2);
    t << 2.0, 1.0, 0.0, 1.0;
    const Body img = Body::linear_image(t, Body::cube(2));
    const Vec w = v2(0.3, -0.8);
    CHECK(img.support(w) == doctest::Approx(Body::cube(2).support((t.transpose() * w).eval())));
    CHECK(img.gauge(v2(2.0, 0.0)) == doctest::Approx(Body::cube(2).gauge(v2(1.0, 0.0))));
}

TEST_CASE("membership and radii brackets")
{
    const Body cube = Body::cube(3);
    CHECK(cube.contains(v3(0.5, 0.5, 0.5)));
    CHECK_FALSE(cube.contains(v3(0.5001, 0.0, 0.0)));
    CHECK(cube.inradius_lb() == doctest::Approx(0.5));
    CHECK(cube.circumradius_ub() == doctest::Approx(0.5 * std::sqrt(3.0)));
    CHECK(cube.volume().has_value());
    CHECK(cube.volume()->value == doctest::Approx(1.0));
    CHECK(cube.volume()->exact);

    const Body b1 = Body::p_ball(4, 1.0);
    CHECK(b1.volume()->value == doctest::Approx(oracles::b1_volume(4)));
    CHECK(b1.inradius_lb() == doctest::Approx(0.5)); // 4^{1/2 - 1} = 1/2
    CHECK(b1.circumradius_ub() == doctest::Approx(1.0));
}

TEST_CASE("polytope oracle matches the cross-polytope closed forms")
{
    const Body poly = cross_polytope(3, 1.0);
    const Body b1 = Body::p_ball(3, 1.0);
    const Vec pts[] = {v3(0.2, -0.3, 0.4), v3(1.0, 0.0, 0.0), v3(-0.1, -0.1, -0.1)};
    for (const auto& x : pts) {
        CHECK(poly.gauge(x) == doctest::Approx(b1.gauge(x)));
        CHECK(poly.support(x) == doctest::Approx(b1.support(x)));
    }
    const auto info = poly.support_info(v3(0.4, 1.3, -0.2));
    CHECK(info.method == "vertices");
    CHECK(info.value == doctest::Approx(1.3));
    CHECK(poly.circumradius_ub() == doctest::Approx(1.0));

    // Central symmetry is required.
    Mat bad(3, 2);
    bad << 1.0, 0.0, -1.0, 0.0, 0.0, 1.0; // missing (0, -1)
    CHECK_THROWS(Body::polytope(bad, Vec::Constant(3, 1.0)));

    // Rank-deficient normals leave the body unbounded.
    Mat flat(2, 2);
    flat << 1.0, 0.0, -1.0, 0.0;
    CHECK_THROWS(Body::polytope(flat, Vec::Constant(2, 1.0)));
}

TEST_CASE("high-dimensional polytope support falls back to certified ascent")
{
    const Body poly = cross_polytope(9, 1.0); // 512 facets, enumeration infeasible
    Vec y = Vec::Zero(9);
    y(2) = 0.7;
    y(5) = -1.1;
    const auto info = poly.support_info(y);
    CHECK(info.method == "ascent");
    CHECK(info.value == doctest::Approx(1.1).epsilon(0.01)); // exact: ||y||_inf
    CHECK(info.lower <= info.value + 1e-12);
    CHECK(info.upper >= 1.1 - 1e-9);
}

TEST_CASE("volume normalization")
{
    const Body big = Body::cube(3, 2.0); // volume 64
    const Body unit = big.normalize_volume();
    REQUIRE(unit.volume().has_value());
    CHECK(unit.volume()->value == doctest::Approx(1.0));
    // Gauge scales by 64^{1/3} = 4.
    CHECK(unit.gauge(v3(0.5, 0.0, 0.0)) == doctest::Approx(4.0 * big.gauge(v3(0.5, 0.0, 0.0))));
}

TEST_CASE("body JSON schema round-trips the oracle")
{
    const Body bodies[] = {
        Body::cube(3),
        Body::p_ball(2, 1.5, 2.0),
        cross_polytope(2, 1.0),
        Body::linear_image((Mat(2, 2) << 1.0, 0.5, 0.0, 1.0).finished(), Body::cube(2)),
        Body::scaled(0.7, Body::euclidean_ball(4)),
    };
    for (const auto& body : bodies) {
        const Body back = body_from_json(body_to_json(body));
        CHECK(back.dim() == body.dim());
        CHECK(back.label() == body.label());
        Vec x = Vec::LinSpaced(body.dim(), -0.3, 0.4);
        CHECK(back.gauge(x) == doctest::Approx(body.gauge(x)));
        CHECK(back.support(x) == doctest::Approx(body.support(x)));
    }
    // The isotropic flag and estimated volumes survive.
    const Body flagged = Body::cube(2).with_isotropic_flag();
    CHECK(body_from_json(body_to_json(flagged)).isotropic_flag());
    const Body est = cross_polytope(2, 1.0).with_volume(1.99, 0.01);
    const Body est_back = body_from_json(body_to_json(est));
    REQUIRE(est_back.volume().has_value());
    CHECK(est_back.volume()->value == doctest::Approx(1.99));
    CHECK_FALSE(est_back.volume()->exact);

    // Schema errors carry actionable messages.
    CHECK_THROWS_AS(body_from_json(nlohmann::json{{"type", "dodecahedron"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(body_from_json(nlohmann::json{{"type", "ball"}}), std::invalid_argument);
}
