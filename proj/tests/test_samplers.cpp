#include "isonorm/batch.hpp"
#include "isonorm/parallel.hpp"
#include "isonorm/samplers.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>

using namespace isonorm;

namespace {

void with_threads(const char* value, const std::function<void()>& fn)
{
    const char* old = std::getenv("ISONORM_THREADS");
    const std::string saved = old ? old : "";
    setenv("ISONORM_THREADS", value, 1);
    fn();
    if (old)
        setenv("ISONORM_THREADS", saved.c_str(), 1);
    else
        unsetenv("ISONORM_THREADS");
}

} // namespace

TEST_CASE("sphere and gaussian batches have the right moments")
{
    const RngKey key{42, 7};
    const auto sph = sample_sphere(4, 50000, key);
    for (std::int64_t i = 0; i < 200; ++i)
        CHECK(sph.points.row(i).norm() == doctest::Approx(1.0));
    CHECK(sph.points.colwise().mean().norm() < 0.02);

    const auto gau = sample_gaussian(3, 100000, key);
    CHECK(gau.points.colwise().mean().norm() < 0.02);
    const Mat cov = gau.points.transpose() * gau.points / double(gau.count());
    CHECK((cov - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("samples are byte-identical for any worker count")
{
    const Body body = Body::p_ball(3, 1.0);
    const RngKey key{99, 3};
    Mat one, four, sixteen;
    with_threads("1", [&] { one = sample_uniform_rejection(body, 30000, key).points; });
    with_threads("4", [&] { four = sample_uniform_rejection(body, 30000, key).points; });
    with_threads("16", [&] { sixteen = sample_uniform_rejection(body, 30000, key).points; });
    CHECK((one - four).cwiseAbs().maxCoeff() == 0.0);
    CHECK((one - sixteen).cwiseAbs().maxCoeff() == 0.0);

    // Same key, same draw; different stream, different draw.
    const auto again = sample_uniform_rejection(body, 30000, key);
    CHECK((one - again.points).cwiseAbs().maxCoeff() == 0.0);
    const auto other = sample_uniform_rejection(body, 30000, RngKey{99, 4});
    CHECK((one - other.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rejection sampling: membership, symmetry, acceptance bookkeeping")
{
    const Body b1 = Body::p_ball(3, 1.0);
    const auto batch = sample_uniform_rejection(b1, 40000, RngKey{5, 0});
    CHECK(batch.count() == 40000);
    CHECK(batch.method == SampleMethod::rejection);
    for (std::int64_t i = 0; i < batch.count(); i += 97)
        CHECK(b1.contains(batch.points.row(i).transpose(), 1e-9));
    CHECK(batch.points.colwise().mean().norm() < 0.01);
    // Acceptance ratio ~ vol(B_1^3)/vol(B_2^3) = (4/3)/(4 pi/3) = 1/pi.
    CHECK(batch.acceptance_rate == doctest::Approx(1.0 / 3.14159265).epsilon(0.05));

    // Cube chains route through the exact box sampler.
    const auto cube = sample_uniform_rejection(Body::cube(3), 10000, RngKey{5, 1});
    CHECK(cube.acceptance_rate == doctest::Approx(1.0));

    // Hopeless acceptance raises instead of spinning forever.
    Mat m = Mat::Identity(3, 3);
    m(1, 1) = 1e12;
    m(2, 2) = 1e12;
    CHECK_THROWS_AS(sample_uniform_rejection(Body::ellipsoid(m), 100, RngKey{5, 2}),
                    AcceptanceTooLow);
}

TEST_CASE("hit-and-run agrees with the exact ellipsoid moments")
{
    Mat m(2, 2);
    m << 1.0, 0.3, 0.3, 2.0;
    const Body e = Body::ellipsoid(m);
    const auto batch = sample_hit_and_run(e, 20000, RngKey{11, 0});
    CHECK(batch.method == SampleMethod::hit_and_run);
    CHECK(batch.burn_in == 10 * 2 * 2);
    CHECK(batch.thinning == 2);
    for (std::int64_t i = 0; i < batch.count(); i += 53)
        CHECK(e.contains(batch.points.row(i).transpose(), 1e-9));
    // Cov(uniform on {x'Mx <= 1}) = M^{-1}/(n+2).
    const Mat cov = batch.points.transpose() * batch.points / double(batch.count());
    const Mat exact = m.inverse() / 4.0;
    CHECK((cov - exact).cwiseAbs().maxCoeff() < 0.05 * exact(0, 0));
}

TEST_CASE("weighted-sum sampler matches the isotropic covariance")
{
    const Body cube = Body::cube(3).with_isotropic_flag();
    Vec t(4);
    t << 0.8, -0.2, 0.4, 0.1;
    const auto batch = sample_nu_t(cube, t, 120000, RngKey{21, 0});
    CHECK(batch.dim() == 3);
    const Mat cov = batch.points.transpose() * batch.points / double(batch.count());
    const double expected = t.squaredNorm() / 12.0;
    CHECK(cov(0, 0) == doctest::Approx(expected).epsilon(0.05));
    CHECK(cov(1, 1) == doctest::Approx(expected).epsilon(0.05));
    CHECK(std::abs(cov(0, 1)) < 0.01 * t.squaredNorm());

    CHECK_THROWS(sample_nu_t(Body::cube(3), t, 100, RngKey{21, 1})); // flag required
}

TEST_CASE("haar rotations are orthogonal and evenly spread")
{
    Vec mean = Vec::Zero(3);
    for (int r = 0; r < 200; ++r) {
        const Mat u = sample_haar_rotation(3, RngKey{31, std::uint64_t(r)});
        CHECK((u.transpose() * u - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(std::abs(u.determinant()) - 1.0) < 1e-12);
        mean += u.col(0);
    }
    CHECK(mean.norm() / 200.0 < 0.1); // first column is sphere-uniform
}

TEST_CASE("batch binary format round-trips exactly")
{
    const auto dir = std::filesystem::temp_directory_path() / "isonorm_batch_test";
    std::filesystem::create_directories(dir);
    const auto file = dir / "batch.bin";

    auto batch = sample_uniform_rejection(Body::p_ball(2, 1.0), 5000, RngKey{77, 2});
    batch.source = "b1_2";
    save_batch(batch, file.string());
    REQUIRE(std::filesystem::exists(file));
    REQUIRE(std::filesystem::exists(file.string() + ".meta.json"));

    const auto back = load_batch(file.string());
    CHECK(back.count() == batch.count());
    CHECK(back.dim() == batch.dim());
    CHECK(back.method == batch.method);
    CHECK(back.stream.seed == 77);
    CHECK(back.stream.stream_id == 2);
    CHECK(back.source == "b1_2");
    CHECK((back.points - batch.points).cwiseAbs().maxCoeff() == 0.0);

    std::filesystem::remove_all(dir);
}
