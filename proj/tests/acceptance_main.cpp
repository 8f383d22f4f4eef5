// Acceptance gate: one line per criterion, [PASS]/[FAIL], nonzero exit on any
// failure. Tolerances are pinned here and nowhere else; all seeds are fixed,
// so every number below is reproducible bit for bit.

#include "isonorm/experiments.hpp"
#include "isonorm/functionals.hpp"
#include "isonorm/isotropy.hpp"
#include "isonorm/multinorm.hpp"
#include "isonorm/positioning.hpp"
#include "isonorm/samplers.hpp"
#include "isonorm/special.hpp"

#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace isonorm;

namespace {

constexpr std::uint64_t kSeed = 20260813;

int failures = 0;

void record(int id, const char* name, bool pass, const std::string& detail)
{
    failures += pass ? 0 : 1;
    std::printf("[%s] %2d %-24s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
}

RngKey key(int criterion, std::uint64_t sub = 0)
{
    return RngKey{kSeed, (static_cast<std::uint64_t>(criterion) << 8) + sub};
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

/// Symmetric random polytope: 2m unit facet normals in +- pairs, offsets 1.
Body random_polytope(int n, int m, RngKey k)
{
    Rng rng(k, 0);
    Mat a(2 * m, n);
    Vec row(n);
    for (int i = 0; i < m; ++i) {
        gaussian_point(rng, row);
        row /= row.norm();
        a.row(2 * i) = row.transpose();
        a.row(2 * i + 1) = -row.transpose();
    }
    return Body::polytope(a, Vec::Constant(2 * m, 1.0));
}

Body planted_image(int n, RngKey k, Mat& t0_out)
{
    Rng rng(k, 0);
    Mat s0(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s0(i, j) = 0.25 * rng.normal();
    s0(n - 1, n - 1) -= s0.trace();
    Mat t0 = s0.exp();
    t0 *= std::pow(t0.determinant(), -1.0 / n);
    t0_out = t0;
    return Body::linear_image(t0.inverse(), Body::cube(n));
}

// --- criteria ---------------------------------------------------------------

void criterion_1_selfgauge()
{
    bool pass = true;
    double worst_ks = 0.0, worst_z = 0.0;
    int sub = 0;
    for (const int n : {2, 3, 5}) {
        const Body bodies[] = {Body::cube(n), Body::p_ball(n, 1.0), Body::euclidean_ball(n),
                               random_polytope(n, 4 * n, key(1, 100 + n))};
        for (const auto& body : bodies) {
            const auto batch =
                sample_measure(MeasureSpec::uniform_on(body), 100000, key(1, sub));
            std::vector<double> gauges(100000);
            for (std::int64_t i = 0; i < batch.count(); ++i)
                gauges[static_cast<std::size_t>(i)] = body.gauge(batch.points.row(i).transpose());
            const double ks = ks_statistic(gauges, [n](double u) {
                return std::clamp(std::pow(u, n), 0.0, 1.0);
            });
            const auto mean = mean_gauge_rows(batch.points, body, key(1, sub));
            const double z =
                std::abs(mean.value - oracles::selfgauge_mean(n)) / mean.std_error;
            worst_ks = std::max(worst_ks, ks);
            worst_z = std::max(worst_z, z);
            pass = pass && ks < 0.01 && z <= 3.0;
            ++sub;
        }
    }
    record(1, "self_gauge_law", pass,
           fmt("12 bodies x 1e5: max KS %.4f (<0.01), max |z| %.2f (<=3)", worst_ks, worst_z));
}

void criterion_2_big_m()
{
    const auto m5 = big_m(Body::euclidean_ball(5), key(2, 0), 1000000);
    const auto mb1 = big_m(Body::p_ball(2, 1.0), key(2, 1), 1000000);
    const auto mcube = big_m(Body::cube(2), key(2, 2), 1000000);
    const bool pass = std::abs(m5.value - 1.0) <= 3.0 * m5.std_error + 1e-12
                      && m5.std_error < 1e-3
                      && std::abs(mb1.value - oracles::m_b1_2()) <= 3.0 * mb1.std_error
                      && std::abs(mcube.value - oracles::m_cube_2()) <= 3.0 * mcube.std_error;
    record(2, "m_of_k_oracles", pass,
           fmt("M(B2^5)=%.6f se %.1e; B1/cube devs %.2f se", m5.value, m5.std_error,
               std::abs(mcube.value - oracles::m_cube_2()) / mcube.std_error));
}

void criterion_3_isotropic_constant()
{
    bool pass = true;
    double worst_rel = 0.0;
    for (int n = 2; n <= 6; ++n) {
        const auto l = isotropic_constant(Body::cube(n), key(3, std::uint64_t(n)));
        const double rel = std::abs(l.value - oracles::l_cube()) / oracles::l_cube();
        worst_rel = std::max(worst_rel, rel);
        pass = pass && rel <= 0.01;
    }
    // SL(3)-image invariance.
    Mat t0;
    (void)planted_image(3, key(3, 50), t0);
    const auto base = isotropic_constant(Body::cube(3), key(3, 51));
    const auto image = isotropic_constant(Body::linear_image(t0, Body::cube(3)), key(3, 52));
    const double z = std::abs(base.value - image.value)
                     / combined_se(base.std_error, image.std_error);
    pass = pass && z <= 2.0;
    record(3, "isotropic_constant", pass,
           fmt("cube L rel dev max %.4f (<=0.01); SL-image |z| %.2f (<=2)", worst_rel, z));
}

void criterion_4_covariance()
{
    auto ctx = make_context(Body::cube(3).with_isotropic_flag(), Body::euclidean_ball(3),
                            key(4, 0));
    Vec t(5);
    {
        Rng rng(key(4, 1), 0);
        gaussian_point(rng, t);
        t /= t.norm();
    }
    const auto rep = covariance_check_nu_t(ctx, t, key(4, 2), 1000000);
    const bool pass = rep.max_diag_rel_dev <= 0.02 && rep.max_offdiag_se_units <= 3.0;
    record(4, "nu_t_covariance", pass,
           fmt("diag rel dev %.4f (<=0.02), offdiag %.2f se (<=3)", rep.max_diag_rel_dev,
               rep.max_offdiag_se_units));
}

void criterion_5_basic_identity()
{
    bool pass = true;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int n = 1 + i % 4;
        const int s = 2 + (7 * i) % 15;
        const int ckind = i % 3;
        const Body c = ckind == 0   ? Body::cube(n).with_isotropic_flag()
                       : ckind == 1 ? Body::p_ball(n, 1.0)
                                    : Body::euclidean_ball(n);
        const int kkind = (i / 3) % 3;
        const Body k = kkind == 0   ? Body::euclidean_ball(n)
                       : kkind == 1 ? Body::cube(n, 1.0)
                                    : Body::p_ball(n, 1.0);
        auto ctx = make_context(c, k, key(5, std::uint64_t(10 + i)));
        Rng rng(key(5, std::uint64_t(40 + i)), 0);
        Vec t(s);
        gaussian_point(rng, t);
        t /= t.norm();
        const auto rep = identity_check(ctx, t, key(5, std::uint64_t(70 + i)), 120000);
        worst = std::max(worst, std::abs(rep.gap_se_units));
        pass = pass && std::abs(rep.gap_se_units) <= 3.0;
    }
    record(5, "basic_identity_20", pass, fmt("max |gap| %.2f combined-se (<=3)", worst));
}

void criterion_6_closed_form()
{
    auto ctx = make_context(Body::cube(1).with_isotropic_flag(), Body::cube(1), key(6, 0));
    Vec t(2);
    t << 1.0, 1.0;
    const auto est = multi_norm(ctx, t, key(6, 1), 10000000);
    const double dev = std::abs(est.value - 2.0 / 3.0);
    record(6, "closed_form_2_3", dev <= 1e-3,
           fmt("|norm(1,1) - 2/3| = %.2e (<=1e-3), se %.1e", dev, est.std_error));
}

void criterion_7_gaussian_polar()
{
    const auto b1 = gaussian_mean_gauge(Body::p_ball(4, 1.0), key(7, 0), 500000);
    const auto cube = gaussian_mean_gauge(Body::cube(4), key(7, 1), 500000);
    const bool pass = std::abs(b1.gap_se_units) <= 3.0 && std::abs(cube.gap_se_units) <= 3.0;
    record(7, "gaussian_polar", pass,
           fmt("B1^4 gap %.2f se, cube_4 gap %.2f se (<=3)", b1.gap_se_units,
               cube.gap_se_units));
}

void criterion_8_rotation_average()
{
    const auto rep = rotation_average_check(
        MeasureSpec::uniform_on(Body::cube(3).with_isotropic_flag()), Body::cube(3, 1.0), 200,
        key(8, 0), 20000);
    record(8, "rotation_average", std::abs(rep.gap_se_units) <= 3.0,
           fmt("lhs %.5f vs rhs %.5f, gap %.2f se (<=3)", rep.lhs.value, rep.rhs.value,
               rep.gap_se_units));
}

void criterion_9_milman_pajor()
{
    struct Pair {
        Body c;
        Body k;
    };
    const Pair pairs[] = {
        {Body::cube(3), Body::euclidean_ball(3)},
        {Body::euclidean_ball(4), Body::cube(4, 1.0)},
        {Body::p_ball(3, 1.0), Body::euclidean_ball(3)},
        {Body::cube(2), Body::p_ball(2, 1.0)},
    };
    bool pass = true;
    double worst = 1e9;
    int sub = 0;
    for (const auto& pr : pairs) {
        const auto rep = milman_pajor_check(pr.c, pr.k, key(9, std::uint64_t(sub++)), 200000);
        pass = pass && rep.floor_ok;
        worst = std::min(worst, rep.gap_se_units);
    }
    const auto eq = milman_pajor_check(Body::cube(3), Body::cube(3), key(9, 50), 200000);
    pass = pass && eq.floor_ok && std::abs(eq.gap_se_units) <= 3.0;
    record(9, "milman_pajor_floor", pass,
           fmt("4 pairs floor ok, min signed gap %.2f se; C=K gap %.2f se (<=3)", worst,
               eq.gap_se_units));
}

void criterion_10_alpt()
{
    auto ctx = make_context(Body::cube(5).with_isotropic_flag(), Body::euclidean_ball(5),
                            key(10, 0));
    const auto rep = alpt_spectral_check(ctx, 200, 100, key(10, 1));
    record(10, "alpt_spectral_band", rep.in_band >= 95,
           fmt("%.0f/100 trials in [0.5,1.5] (>=95); eig range [%.3f, %.3f]",
               double(rep.in_band), rep.min_eigenvalue, rep.max_eigenvalue));
}

void criterion_11_one_symmetry()
{
    auto ctx = make_context(Body::cube(2).with_isotropic_flag(), Body::euclidean_ball(2),
                            key(11, 0));
    const auto rep = symmetry_check(ctx, 4, 50, key(11, 1), 30000);
    const bool pass = rep.max_dev_se_units <= 3.0 && rep.max_triangle_excess_se <= 3.0;
    record(11, "one_symmetry", pass,
           fmt("50 trials max dev %.2f se (<=3); 100 pairs triangle excess %.2f se (<=3)",
               rep.max_dev_se_units, rep.max_triangle_excess_se));
}

void criterion_12_m_bs_routes()
{
    auto ctx = make_context(Body::cube(2).with_isotropic_flag(), Body::euclidean_ball(2),
                            key(12, 0));
    bool pass = true;
    double worst = 0.0;
    for (const int s : {4, 8, 16}) {
        const auto rep = m_of_ball(ctx, s, key(12, std::uint64_t(s)), 128, 2000);
        worst = std::max(worst, std::abs(rep.gap_se_units));
        pass = pass && std::abs(rep.gap_se_units) <= 3.0;
    }
    record(12, "m_bs_two_routes", pass, fmt("s in {4,8,16}: max |gap| %.2f se (<=3)", worst));
}

void criterion_13_zq_suite()
{
    const Body cube3 = Body::cube(3).with_isotropic_flag();
    const auto batch = sample_measure(MeasureSpec::uniform_on(cube3), 500000, key(13, 0));
    const auto z2 = zq_support(batch, 2.0, Vec::Unit(3, 0));
    const double rel = std::abs(z2.value - oracles::l_cube()) / oracles::l_cube();

    const auto incl_12 = zq_inclusion_check(batch, 1.0, 2.0, 64, key(13, 1));
    const auto incl_24 = zq_inclusion_check(batch, 2.0, 4.0, 64, key(13, 1));
    const double incl_worst =
        std::max(incl_12.max_monotone_violation_se, incl_24.max_monotone_violation_se);

    const auto nested = i1_zq_polar(cube3, 2.0, key(13, 2), 20000, 500);
    const auto pts = sample_measure(MeasureSpec::uniform_on(cube3), 200000, key(13, 3));
    double total = 0.0;
    for (std::int64_t i = 0; i < pts.count(); ++i) total += pts.points.row(i).norm();
    const auto norm_mean = mean_gauge_rows(pts.points, Body::euclidean_ball(3), key(13, 3));
    const double rhs = oracles::l_cube() * norm_mean.value;
    const double rhs_se = oracles::l_cube() * norm_mean.std_error;
    const double z = std::abs(nested.value - rhs) / combined_se(nested.std_error, rhs_se);

    const bool pass = rel <= 0.02 && incl_worst <= 3.0 && z <= 3.0;
    record(13, "zq_suite", pass,
           fmt("h_Z2 rel dev %.4f (<=0.02); monotone (1,2),(2,4) %.2f se; nested-vs-L*E||x|| %.2f se",
               rel, incl_worst, z));
    (void)total;
}

void criterion_14_position_search()
{
    bool pass = true;
    double worst_ratio_excess = 0.0, worst_det = 0.0;
    for (const int n : {2, 3, 4}) {
        Mat t0;
        const Body k = planted_image(n, key(14, std::uint64_t(n)), t0);
        const auto rep = optimize_position(Body::cube(n), k, key(14, std::uint64_t(10 + n)),
                                           n == 4 ? 4000 : 2000, 8, 8000);
        const double floor = n / (n + 1.0);
        worst_ratio_excess = std::max(worst_ratio_excess, rep.ratio / floor);
        worst_det = std::max(worst_det, std::abs(rep.det_t - 1.0));
        pass = pass && rep.ratio <= 1.10 * floor && std::abs(rep.det_t - 1.0) <= 1e-9
               && rep.ratio >= floor - 3.0 * rep.objective.std_error;
    }
    record(14, "position_search", pass,
           fmt("n in {2,3,4}: max ratio/floor %.4f (<=1.10); max |det-1| %.1e (<=1e-9)",
               worst_ratio_excess, worst_det));
}

void criterion_15_determinism()
{
    const nlohmann::json cfg{
        {"experiment", "identity_suite"},
        {"seed", 11},
        {"budgets", {{"count", 15000}, {"closed_form_count", 60000}, {"cov_count", 60000}}},
    };
    const auto dir = std::filesystem::temp_directory_path() / "isonorm_acceptance_det";
    std::filesystem::remove_all(dir);
    std::string reports[3];
    const char* threads[3] = {"1", "4", "16"};
    bool ran = true;
    for (int i = 0; i < 3; ++i) {
        setenv("ISONORM_THREADS", threads[i], 1);
        ExperimentReport rep;
        ran = ran && run_experiment_config(cfg, dir, rep) == 0;
        std::ifstream in(dir / "report.json", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        reports[i] = ss.str();
    }
    unsetenv("ISONORM_THREADS");
    const bool pass = ran && !reports[0].empty() && reports[0] == reports[1]
                      && reports[0] == reports[2];
    record(15, "report_determinism", pass,
           fmt("workers 1/4/16: %.0f bytes each, byte-identical = %.0f",
               double(reports[0].size()), double(pass)));
}

void criterion_16_ratio_grids()
{
    const nlohmann::json cfg{
        {"experiment", "ratio_grids"},
        {"seed", 3},
        {"budgets",
         {{"i1_count", 20000},
          {"m_count", 20000},
          {"gm_dirs", 16},
          {"gm_count", 1500},
          {"mb_outer", 32},
          {"mb_inner", 800},
          {"b_dirs", 8},
          {"b_count", 1500}}},
    };
    const auto dir = std::filesystem::temp_directory_path() / "isonorm_acceptance_grids";
    std::filesystem::remove_all(dir);
    ExperimentReport rep;
    const int code = run_experiment_config(cfg, dir, rep);

    // Every tabulated constant must be finite and positive, for all n in 2..8.
    std::ifstream in(dir / "ratio_grids.csv");
    std::string line;
    std::getline(in, line); // header
    int rows = 0;
    bool ok = in.good() && code == 0;
    int seen_n[9] = {0};
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string n_s, s_s, q, v_s, se_s;
        std::getline(ss, n_s, ',');
        std::getline(ss, s_s, ',');
        std::getline(ss, q, ',');
        std::getline(ss, v_s, ',');
        std::getline(ss, se_s, ',');
        const double v = std::strtod(v_s.c_str(), nullptr);
        ok = ok && std::isfinite(v) && v > 0.0;
        const int n = std::atoi(n_s.c_str());
        if (n >= 2 && n <= 8) seen_n[n] += 1;
        ++rows;
    }
    for (int n = 2; n <= 8; ++n) ok = ok && seen_n[n] >= 5;
    record(16, "ratio_grids_csv", ok && rows >= 35,
           fmt("%.0f grid rows over n=2..8, all finite and positive (exit %.0f)", double(rows),
               double(code)));
}

} // namespace

int main()
{
    std::printf("acceptance gate, seed %llu\n", static_cast<unsigned long long>(kSeed));
    criterion_1_selfgauge();
    criterion_2_big_m();
    criterion_3_isotropic_constant();
    criterion_4_covariance();
    criterion_5_basic_identity();
    criterion_6_closed_form();
    criterion_7_gaussian_polar();
    criterion_8_rotation_average();
    criterion_9_milman_pajor();
    criterion_10_alpt();
    criterion_11_one_symmetry();
    criterion_12_m_bs_routes();
    criterion_13_zq_suite();
    criterion_14_position_search();
    criterion_15_determinism();
    criterion_16_ratio_grids();
    std::printf("%d of 16 criteria passed\n", 16 - failures);
    return failures == 0 ? 0 : 1;
}
