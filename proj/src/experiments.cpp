#include "isonorm/experiments.hpp"

#include "isonorm/functionals.hpp"
#include "isonorm/isotropy.hpp"
#include "isonorm/multinorm.hpp"
#include "isonorm/parallel.hpp"
#include "isonorm/positioning.hpp"
#include "isonorm/samplers.hpp"
#include "isonorm/special.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace isonorm {

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct ExpCtx {
    const nlohmann::json& cfg;
    RngKey root;
    std::filesystem::path out;
    ExperimentReport& rep;

    std::int64_t budget(const char* key, std::int64_t dflt) const
    {
        if (auto it = cfg.find("budgets"); it != cfg.end()) return it->value(key, dflt);
        return dflt;
    }
    void artifact(const std::string& name) { rep.artifacts.push_back(name); }
};

CheckRecord& push(ExpCtx& c)
{
    c.rep.checks.emplace_back();
    return c.rep.checks.back();
}

/// Estimate vs closed-form oracle, |dev| <= tol_se * SE + abs_floor.
void check_estimate(ExpCtx& c, const std::string& name, const std::string& anchor,
                    const Estimate& est, double oracle, double tol_se, double abs_floor = 0.0)
{
    const double dev = std::abs(est.value - oracle);
    auto& r = push(c);
    r.name = name;
    r.anchor = anchor;
    r.value = est.value;
    r.se = est.std_error;
    r.threshold = tol_se;
    r.verdict = dev <= tol_se * est.std_error + abs_floor ? "pass" : "fail";
    r.count = est.count;
    r.seed = est.stream.seed;
    r.stream = est.stream.stream_id;
    r.details = "oracle " + fmt(oracle) + ", |dev| " + fmt(dev);
}

/// Two-route gap measured in combined-SE units.
void check_gap(ExpCtx& c, const std::string& name, const std::string& anchor, double gap_se_units,
               double combined, double tol_se, std::int64_t count, RngKey key,
               const std::string& details = {})
{
    auto& r = push(c);
    r.name = name;
    r.anchor = anchor;
    r.value = gap_se_units;
    r.se = combined;
    r.threshold = tol_se;
    r.verdict = std::abs(gap_se_units) <= tol_se ? "pass" : "fail";
    r.count = count;
    r.seed = key.seed;
    r.stream = key.stream_id;
    r.details = details.empty() ? "combined-SE units" : details;
}

/// Free-form bound with an absolute threshold; pass decided by the caller.
void check_bound(ExpCtx& c, const std::string& name, const std::string& anchor, double value,
                 double se, double threshold, bool pass, std::int64_t count, RngKey key,
                 const std::string& details)
{
    auto& r = push(c);
    r.name = name;
    r.anchor = anchor;
    r.value = value;
    r.se = se;
    r.threshold = threshold;
    r.verdict = pass ? "pass" : "fail";
    r.count = count;
    r.seed = key.seed;
    r.stream = key.stream_id;
    r.details = details;
}

void report_only(ExpCtx& c, const std::string& name, const std::string& anchor, double value,
                 double se, std::int64_t count, RngKey key, const std::string& details)
{
    auto& r = push(c);
    r.name = name;
    r.anchor = anchor;
    r.value = value;
    r.se = se;
    r.threshold = 0.0;
    r.verdict = "report-only";
    r.count = count;
    r.seed = key.seed;
    r.stream = key.stream_id;
    r.details = details;
}

/// Grid CSV in the fixed (n, s, quantity, value, se) schema.
class GridCsv {
public:
    GridCsv(ExpCtx& c, const std::string& filename) : out_(c.out / filename, std::ios::binary)
    {
        out_ << "n,s,quantity,value,se\n";
        c.artifact(filename);
    }
    void row(int n, int s, const std::string& quantity, double value, double se)
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d,%d,%s,%.12g,%.12g\n", n, s, quantity.c_str(), value,
                      se);
        out_ << buf;
    }

private:
    std::ofstream out_;
};

Vec random_unit(int dim, RngKey key)
{
    Rng rng(key, 0);
    Vec t(dim);
    gaussian_point(rng, t);
    return t / t.norm();
}

Body flagged_cube(int n)
{
    // Volume 1 and covariance exactly I/12: isotropic without estimation.
    return Body::cube(n).with_isotropic_flag();
}

Estimate mean_norm_rows(const Mat& points, RngKey key)
{
    const auto rb = row_blocks(points.rows());
    std::vector<double> blocks(static_cast<std::size_t>(rb.batches));
    for (int b = 0; b < rb.batches; ++b) {
        double acc = 0.0;
        for (std::int64_t i = rb.edges[static_cast<std::size_t>(b)];
             i < rb.edges[static_cast<std::size_t>(b) + 1]; ++i)
            acc += points.row(i).norm();
        blocks[static_cast<std::size_t>(b)] =
            acc / static_cast<double>(rb.edges[static_cast<std::size_t>(b) + 1]
                                      - rb.edges[static_cast<std::size_t>(b)]);
    }
    double total = 0.0;
    for (std::int64_t i = 0; i < points.rows(); ++i) total += points.row(i).norm();
    return Estimate{total / static_cast<double>(points.rows()), se_of_batch_means(blocks),
                    points.rows(), key};
}

// ---------------------------------------------------------------------------
// identity_suite: the norm identity and the moment structure of nu_t.
// ---------------------------------------------------------------------------
void run_identity_suite(ExpCtx& c)
{
    const std::int64_t count = c.budget("count", 150000);

    // 1-d closed form: C = K = [-1/2, 1/2], t = (1, 1) gives 2/3.
    auto ctx1 = make_context(flagged_cube(1), Body::cube(1), c.root.derive(10));
    Vec t2(2);
    t2 << 1.0, 1.0;
    const RngKey closed_key = c.root.derive(11);
    const std::int64_t closed_count = c.budget("closed_form_count", 2000000);
    const Estimate closed = multi_norm(ctx1, t2, closed_key, closed_count);
    check_estimate(c, "closed_form_norm_1d", "sec4", closed, 2.0 / 3.0, 3.0);

    // Exact 1-homogeneity: same stream, doubled weights, doubled value.
    const Estimate doubled = multi_norm(ctx1, (2.0 * t2).eval(), closed_key, closed_count);
    const double rel = std::abs(doubled.value - 2.0 * closed.value) / (2.0 * closed.value);
    check_bound(c, "homogeneity_exact", "sec4", rel, 0.0, 1e-12, rel <= 1e-12, closed_count,
                closed_key, "relative |norm(2t) - 2 norm(t)| on the shared stream");

    // Independent-stream LHS/RHS of the basic identity over (C, K, s) cases.
    struct Case {
        int n;
        int s;
        int k_kind; // 0 ball, 1 unit-half-width cube, 2 cross-polytope
    };
    const Case cases[] = {{3, 2, 0}, {3, 5, 1}, {4, 8, 0}, {2, 3, 2}};
    GridCsv csv(c, "identity_gaps.csv");
    int idx = 0;
    for (const auto& cs : cases) {
        const Body k = cs.k_kind == 0   ? Body::euclidean_ball(cs.n)
                       : cs.k_kind == 1 ? Body::cube(cs.n, 1.0)
                                        : Body::p_ball(cs.n, 1.0);
        auto ctx = make_context(flagged_cube(cs.n), k, c.root.derive(20 + idx));
        const Vec t = random_unit(cs.s, c.root.derive(30 + idx));
        const auto rep = identity_check(ctx, t, c.root.derive(40 + idx), count);
        const double comb = combined_se(rep.lhs.std_error, rep.rhs.std_error);
        check_gap(c, "identity_gap_" + k.label() + "_s" + std::to_string(cs.s), "sec4,eq1.3",
                  rep.gap_se_units, comb, 3.0, count, c.root.derive(40 + idx),
                  "lhs " + fmt(rep.lhs.value) + ", rhs " + fmt(rep.rhs.value));
        csv.row(cs.n, cs.s, "identity_gap_se", rep.gap_se_units, comb);
        ++idx;
    }

    // Cov(nu_t) = L^2 I for unit t.
    auto ctxc = make_context(flagged_cube(3), Body::euclidean_ball(3), c.root.derive(50));
    const Vec tc = random_unit(5, c.root.derive(51));
    const auto cov = covariance_check_nu_t(ctxc, tc, c.root.derive(52),
                                           c.budget("cov_count", 400000));
    check_bound(c, "cov_diag_rel_dev", "sec4", cov.max_diag_rel_dev, 0.0, 0.02,
                cov.max_diag_rel_dev <= 0.02, c.budget("cov_count", 400000), c.root.derive(52),
                "max relative |Cov_ii - L^2|, L^2 = " + fmt(cov.l_squared));
    check_bound(c, "cov_offdiag_se", "sec4", cov.max_offdiag_se_units, 0.0, 4.0,
                cov.max_offdiag_se_units <= 4.0, c.budget("cov_count", 400000), c.root.derive(52),
                "max off-diagonal |Cov_ij| in SE units");
}

// ---------------------------------------------------------------------------
// functional_suite: sphere functionals vs quadrature/closed-form oracles.
// ---------------------------------------------------------------------------
void run_functional_suite(ExpCtx& c)
{
    const std::int64_t count = c.budget("count", 200000);
    const double pi = 3.14159265358979323846;

    check_estimate(c, "m_ball2_5", "sec2", big_m(Body::euclidean_ball(5), c.root.derive(10), count),
                   1.0, 3.0, 1e-12);
    check_estimate(c, "m_b1_2", "sec2", big_m(Body::p_ball(2, 1.0), c.root.derive(11), count),
                   4.0 / pi, 3.0);
    check_estimate(c, "m_cube_2", "sec2", big_m(Body::cube(2), c.root.derive(12), count),
                   4.0 * std::sqrt(2.0) / pi, 3.0);
    check_estimate(c, "w_cube_2", "sec2", mean_width(Body::cube(2), c.root.derive(13), count),
                   2.0 / pi, 3.0);

    const auto vr = vrad(Body::cube(2), c.root.derive(14), count);
    if (vr.volume_route) {
        const double dev = std::abs(vr.volume_route->value - 1.0 / std::sqrt(pi));
        check_bound(c, "vrad_cube2_volume", "sec2", vr.volume_route->value,
                    vr.volume_route->std_error, 1e-12, dev <= 1e-12, count, c.root.derive(14),
                    "closed-form volume route, oracle pi^{-1/2}");
    }
    check_estimate(c, "vrad_cube2_polar", "sec2", vr.polar_route, 1.0 / std::sqrt(pi), 3.0);
    check_bound(c, "vrad_cube2_stable", "sec2", vr.unstable ? 1.0 : 0.0, 0.0, 0.0, !vr.unstable,
                count, c.root.derive(14), "median-of-means spread flag clear");

    // Self-gauge law: E gauge = n/(n+1) and gauge^n uniform on [0, 1].
    const std::int64_t sg_count = c.budget("selfgauge_count", 100000);
    const Body sg_bodies[] = {Body::cube(3), Body::p_ball(3, 1.0), Body::euclidean_ball(5)};
    int idx = 0;
    for (const auto& body : sg_bodies) {
        const int n = body.dim();
        const auto batch =
            sample_measure(MeasureSpec::uniform_on(body), sg_count, c.root.derive(20 + idx));
        const auto mean = mean_gauge_rows(batch.points, body, c.root.derive(20 + idx));
        check_estimate(c, "selfgauge_mean_" + body.label(), "sec2", mean,
                       static_cast<double>(n) / (n + 1.0), 3.0);
        std::vector<double> gauges(static_cast<std::size_t>(batch.count()));
        for (std::int64_t i = 0; i < batch.count(); ++i)
            gauges[static_cast<std::size_t>(i)] = body.gauge(batch.points.row(i).transpose());
        const double ks = ks_statistic(std::move(gauges), [n](double u) {
            return std::clamp(std::pow(u, n), 0.0, 1.0);
        });
        check_bound(c, "selfgauge_ks_" + body.label(), "sec2", ks, 0.0, 0.01, ks < 0.01, sg_count,
                    c.root.derive(20 + idx), "KS distance against F(u) = u^n");
        ++idx;
    }

    // Gaussian polar factorization: E gauge(K, g) = E||g||_2 * M(K).
    const auto gg = gaussian_mean_gauge(Body::p_ball(4, 1.0), c.root.derive(30), count);
    check_gap(c, "gaussian_polar_b1_4", "sec3", gg.gap_se_units,
              combined_se(gg.direct.std_error, gg.via_m.std_error), 3.0, count, c.root.derive(30),
              "direct " + fmt(gg.direct.value) + " vs via-M " + fmt(gg.via_m.value));

    // Thin shell of the standard Gaussian (exact variance of ||g||_2).
    const int tn = 50;
    const double mean_norm = gaussian_norm_mean(tn);
    const double sigma_oracle = std::sqrt(tn - mean_norm * mean_norm);
    check_estimate(c, "thinshell_gaussian_50", "sec3",
                   thin_shell_sigma(MeasureSpec::gaussian(tn), c.root.derive(31),
                                    c.budget("thinshell_count", 200000)),
                   sigma_oracle, 3.0);

    // tau vanishes for even measures; the scan maximizes, so report only.
    const auto tau = tau_statistic(MeasureSpec::gaussian(3), c.root.derive(32),
                                   c.budget("tau_count", 100000));
    report_only(c, "tau_gaussian_3", "sec3", tau.value, tau.std_error, tau.count, tau.stream,
                "max over candidate directions (selection biases upward); oracle 0");
}

// ---------------------------------------------------------------------------
// bs_geometry: the unit ball B_s of the norm in the weight space.
// ---------------------------------------------------------------------------
void run_bs_geometry(ExpCtx& c)
{
    auto ctx = make_context(flagged_cube(2), Body::euclidean_ball(2), c.root.derive(10));
    GridCsv csv(c, "bs_geometry_grid.csv");
    const std::int64_t outer = c.budget("outer", 96);
    const std::int64_t inner = c.budget("inner", 1500);
    for (const int s : {2, 4, 8, 16}) {
        const auto rep = m_of_ball(ctx, s, c.root.derive(20 + s), outer, inner);
        const double comb =
            combined_se(rep.sphere_route.std_error, rep.gaussian_route.std_error);
        csv.row(2, s, "m_bs_sphere", rep.sphere_route.value, rep.sphere_route.std_error);
        csv.row(2, s, "m_bs_gap_se", rep.gap_se_units, comb);
        if (s >= 4) {
            check_gap(c, "m_bs_routes_s" + std::to_string(s), "sec5", rep.gap_se_units, comb, 3.0,
                      outer * inner, c.root.derive(20 + s),
                      "sphere " + fmt(rep.sphere_route.value) + " vs gaussian "
                          + fmt(rep.gaussian_route.value));
        } else {
            report_only(c, "m_bs_sphere_s2", "sec5", rep.sphere_route.value,
                        rep.sphere_route.std_error, outer * inner, c.root.derive(22), "M(B_2)");
        }
    }

    const int trials = static_cast<int>(c.budget("trials", 24));
    const auto sym = symmetry_check(ctx, 5, trials, c.root.derive(30),
                                    c.budget("sym_count", 40000));
    check_bound(c, "one_symmetry_max_dev", "sec5", sym.max_dev_se_units, 0.0, 3.5,
                sym.max_dev_se_units <= 3.5, c.budget("sym_count", 40000), c.root.derive(30),
                "max shared-stream |dev| over " + std::to_string(trials)
                    + " random (t, perm, signs), SE units");
    check_bound(c, "triangle_inequality", "sec5", sym.max_triangle_excess_se, 0.0, 3.0,
                sym.max_triangle_excess_se <= 3.0, c.budget("sym_count", 40000), c.root.derive(30),
                "max (||t+u|| - ||t|| - ||u||) in SE units over shared-stream pairs");

    const auto cd = critical_dimension_report(ctx, 16, c.root.derive(40));
    const double k_se =
        cd.k_hat
        * std::sqrt(4.0 * std::pow(cd.m_bs.std_error / cd.m_bs.value, 2)
                    + 4.0 * std::pow(cd.b_hat.std_error / std::max(cd.b_hat.value, 1e-300), 2));
    check_bound(c, "critical_dim_finite", "sec5,rem5.5", cd.k_hat, k_se, 0.0,
                std::isfinite(cd.k_hat) && cd.k_hat > 0.0, cd.m_bs.count, c.root.derive(40),
                "k_hat = s (M/b)^2 at s = 16; M " + fmt(cd.m_bs.value) + ", b " + fmt(cd.b_hat.value));
    csv.row(2, 16, "k_hat", cd.k_hat, k_se);
}

// ---------------------------------------------------------------------------
// alpt: empirical-covariance spectral sandwich.
// ---------------------------------------------------------------------------
void run_alpt(ExpCtx& c)
{
    GridCsv csv(c, "alpt_grid.csv");
    const int trials = static_cast<int>(c.budget("trials", 100));
    int idx = 0;
    for (const int n : {3, 5}) {
        auto ctx = make_context(flagged_cube(n), Body::euclidean_ball(n), c.root.derive(10 + n));
        for (const int s : {16, 64, 200}) {
            const auto rep = alpt_spectral_check(ctx, s, trials, c.root.derive(100 + idx));
            const double frac = static_cast<double>(rep.in_band) / rep.trials;
            const double se = std::sqrt(std::max(frac * (1.0 - frac), 0.0) / rep.trials);
            csv.row(n, s, "alpt_in_band", frac, se);
            const std::string tag = "n" + std::to_string(n) + "_s" + std::to_string(s);
            if (n == 5 && s == 200) {
                check_bound(c, "alpt_band_" + tag, "sec5", frac, se, 0.95, frac >= 0.95,
                            static_cast<std::int64_t>(trials) * s, c.root.derive(100 + idx),
                            "fraction of trials with spectrum in [0.5, 1.5]; eig range ["
                                + fmt(rep.min_eigenvalue) + ", " + fmt(rep.max_eigenvalue) + "]");
                check_bound(c, "alpt_matrix_dev_" + tag, "sec5", rep.mean_matrix_dev_se, 0.0, 4.0,
                            rep.mean_matrix_dev_se <= 4.0,
                            static_cast<std::int64_t>(trials) * s, c.root.derive(100 + idx),
                            "max entry |mean - identity| in SE units");
            } else {
                report_only(c, "alpt_band_" + tag, "sec5", frac, se,
                            static_cast<std::int64_t>(trials) * s, c.root.derive(100 + idx),
                            "fraction in band; trend toward 1 as s grows");
            }
            ++idx;
        }
    }
}

// ---------------------------------------------------------------------------
// milman_pajor: explicit n/(n+1) volume-ratio floor.
// ---------------------------------------------------------------------------
void run_milman_pajor(ExpCtx& c)
{
    const std::int64_t count = c.budget("count", 200000);
    struct Pair {
        Body cbody;
        Body kbody;
    };
    const Pair pairs[] = {
        {Body::cube(3), Body::euclidean_ball(3)},
        {Body::euclidean_ball(4), Body::cube(4, 1.0)},
        {Body::p_ball(3, 1.0), Body::euclidean_ball(3)},
        {Body::cube(3), Body::cube(3)},
    };
    int idx = 0;
    for (const auto& pr : pairs) {
        const auto rep = milman_pajor_check(pr.cbody, pr.kbody, c.root.derive(10 + idx), count);
        const std::string tag = pr.cbody.label() + "_vs_" + pr.kbody.label();
        check_bound(c, "mp_floor_" + tag, "sec6", rep.lhs.value, rep.lhs.std_error, rep.rhs,
                    rep.floor_ok, count, c.root.derive(10 + idx),
                    "floor (n/(n+1))(vol C/vol K)^{1/n} = " + fmt(rep.rhs) + ", signed gap "
                        + fmt(rep.gap_se_units) + " SE");
        ++idx;
    }
    // Equality case C = K: the floor is attained up to MC noise.
    const auto eq = milman_pajor_check(Body::cube(3), Body::cube(3), c.root.derive(20), count);
    check_gap(c, "mp_equality_cube3", "sec6", eq.gap_se_units,
              combined_se(eq.lhs.std_error, eq.rhs_se), 3.0, count, c.root.derive(20),
              "lhs " + fmt(eq.lhs.value) + " vs floor " + fmt(eq.rhs));
}

// ---------------------------------------------------------------------------
// position_search: SL(n) search with a planted optimum.
// ---------------------------------------------------------------------------
void run_position_search(ExpCtx& c)
{
    c.rep.extra = Json::object();
    for (const int n : {2, 3}) {
        // Plant the optimum: K = T0^{-1}(C), so F is minimized at T = T0.
        Rng rng(c.root.derive(60 + n), 0);
        Mat s0(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s0(i, j) = 0.3 * rng.normal();
        s0(n - 1, n - 1) = s0(n - 1, n - 1) - s0.trace();
        Mat t0 = s0.exp();
        t0 *= std::pow(t0.determinant(), -1.0 / n);
        const Body cbody = Body::cube(n);
        const Body kbody = Body::linear_image(t0.inverse(), cbody);

        const auto rep = optimize_position(cbody, kbody, c.root.derive(70 + n),
                                           c.budget("nm_budget", n == 3 ? 2400 : 1200),
                                           static_cast<int>(c.budget("restarts", 8)),
                                           c.budget("crn", 8000));
        const double floor = n / (n + 1.0);
        const std::string tag = "n" + std::to_string(n);
        check_bound(c, "planted_recovery_" + tag, "sec6,thm1.5", rep.ratio,
                    rep.objective.std_error, 1.10 * floor, rep.ratio <= 1.10 * floor,
                    rep.objective.count, c.root.derive(70 + n),
                    "objective ratio vs planted optimum n/(n+1) = " + fmt(floor));
        check_bound(c, "ratio_floor_" + tag, "sec6,thm1.5", rep.ratio, rep.objective.std_error,
                    floor, rep.ratio >= floor - 3.0 * rep.objective.std_error,
                    rep.objective.count, c.root.derive(70 + n), "ratio >= n/(n+1) - 3 SE");
        check_bound(c, "det_one_" + tag, "sec6,thm1.5", rep.det_t, 0.0, 1e-9,
                    std::abs(rep.det_t - 1.0) <= 1e-9, 0, c.root.derive(70 + n),
                    "|det T* - 1|, renormalized search parametrization");
        bool monotone = true;
        for (std::size_t i = 1; i < rep.trace.size(); ++i)
            monotone = monotone && rep.trace[i] <= rep.trace[i - 1] + 1e-12;
        check_bound(c, "trace_monotone_" + tag, "sec6,thm1.5", monotone ? 1.0 : 0.0, 0.0, 0.0,
                    monotone, static_cast<std::int64_t>(rep.trace.size()), c.root.derive(70 + n),
                    "best CRN objective non-increasing per accepted iteration");

        // Winner trace as CSV; T* row-major into the report payload.
        const std::string trace_name = "position_trace_" + tag + ".csv";
        std::ofstream trace(c.out / trace_name, std::ios::binary);
        trace << "iteration,best_objective\n";
        for (std::size_t i = 0; i < rep.trace.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i, rep.trace[i]);
            trace << buf;
        }
        c.artifact(trace_name);
        Json tstar = Json::array();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) tstar.push_back(rep.t_star(i, j));
        c.rep.extra["t_star_" + tag] = std::move(tstar);
        c.rep.extra["crn_objective_" + tag] = rep.crn_objective;
        c.rep.extra["winner_restart_" + tag] = rep.winner_restart;
    }

    // C = K: the identity is optimal, ratio should sit at n/(n+1).
    const auto self = optimize_position(Body::cube(3), Body::cube(3), c.root.derive(80),
                                        c.budget("nm_budget", 2400),
                                        static_cast<int>(c.budget("restarts", 8)),
                                        c.budget("crn", 8000));
    report_only(c, "self_position_cube3", "sec6,thm1.5", self.ratio, self.objective.std_error,
                self.objective.count, c.root.derive(80),
                "C = K case; expected near 3/4, found det " + fmt(self.det_t));
}

// ---------------------------------------------------------------------------
// zq_suite: L_q-centroid bodies.
// ---------------------------------------------------------------------------
void run_zq_suite(ExpCtx& c)
{
    const Body cube3 = flagged_cube(3);
    const std::int64_t batch_count = c.budget("batch_count", 300000);
    const auto batch =
        sample_measure(MeasureSpec::uniform_on(cube3), batch_count, c.root.derive(10));
    const double l_cube = 1.0 / std::sqrt(12.0);
    const Vec e1 = Vec::Unit(3, 0);

    const auto z2 = zq_support(batch, 2.0, e1);
    check_bound(c, "zq2_equals_L", "sec2", z2.value, z2.std_error, 0.02,
                std::abs(z2.value - l_cube) <= 0.02 * l_cube, z2.count, c.root.derive(10),
                "h_{Z_2}(e1) vs L = 12^{-1/2}, 2% relative tolerance");
    check_estimate(c, "zq4_moment_oracle", "sec2", zq_support(batch, 4.0, e1),
                   std::pow(1.0 / 80.0, 0.25), 3.0);

    const auto incl = zq_inclusion_check(batch, 2.0, 4.0, 64, c.root.derive(20));
    check_bound(c, "zq_monotone_2_4", "sec2", incl.max_monotone_violation_se, 0.0, 3.0,
                incl.max_monotone_violation_se <= 3.0, batch_count, c.root.derive(20),
                "max (h_{Z_2} - h_{Z_4}) in SE units over 64 directions");
    report_only(c, "zq_ratio_c1", "sec2", incl.max_ratio, 0.0, batch_count, c.root.derive(20),
                "max h_{Z_4}/((4/2) h_{Z_2}): empirical reverse-inclusion constant");

    // 1-d closed form: I_1(K, Z_q(K) polar) = h^2 / (2 (q+1)^{1/q}).
    const std::int64_t outer = c.budget("outer", 20000);
    const std::int64_t inner = c.budget("inner", 400);
    const auto izq1 = i1_zq_polar(flagged_cube(1), 2.0, c.root.derive(30), outer, inner);
    check_estimate(c, "izq_polar_1d", "sec6", izq1, 1.0 / (8.0 * std::sqrt(3.0)), 3.0);

    // Z_2 cross-check in dimension 3: h_{Z_2}(x) = L ||x||_2 exactly.
    const auto izq3 = i1_zq_polar(cube3, 2.0, c.root.derive(40), outer, inner);
    const auto norms = sample_measure(MeasureSpec::uniform_on(cube3), outer, c.root.derive(41));
    const auto en = mean_norm_rows(norms.points, c.root.derive(41));
    const double rhs = l_cube * en.value;
    const double rhs_se = l_cube * en.std_error;
    const double gap = (izq3.value - rhs) / std::max(combined_se(izq3.std_error, rhs_se), 1e-15);
    check_gap(c, "izq_z2_crosscheck", "sec6", gap, combined_se(izq3.std_error, rhs_se), 3.0, outer,
              c.root.derive(40),
              "nested " + fmt(izq3.value) + " vs L E||x|| = " + fmt(rhs));

    GridCsv csv(c, "zq_growth.csv");
    for (const double q : {1.0, 2.0, 4.0, 8.0}) {
        const auto hq = zq_support(batch, q, e1);
        csv.row(3, static_cast<int>(q), "zq_support_e1", hq.value, hq.std_error);
    }
}

// ---------------------------------------------------------------------------
// ratio_grids: report-only empirical constants across n = 2..8.
// ---------------------------------------------------------------------------
void run_ratio_grids(ExpCtx& c)
{
    GridCsv csv(c, "ratio_grids.csv");
    bool all_ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= 8; ++n) {
        const Body k = Body::p_ball(n, 1.0);
        auto ctx = make_context(flagged_cube(n), k, c.root.derive(n));
        const int s = 2 * n;

        // I_1 / (sqrt(n) M(K)) for the isotropic cube.
        const auto i1v = i1(MeasureSpec::uniform_on(ctx.c), k, c.root.derive(100 + n),
                            c.budget("i1_count", 40000));
        const auto mk = big_m(k, c.root.derive(200 + n), c.budget("m_count", 40000));
        const double r12 = i1v.value / (std::sqrt(double(n)) * mk.value);
        const double r12_se = r12
                              * std::sqrt(std::pow(i1v.std_error / i1v.value, 2)
                                          + std::pow(mk.std_error / mk.value, 2));
        csv.row(n, 0, "thm12_i1_ratio", r12, r12_se);

        // Gluskin-Milman scan: min norm over unit weights and its normalization.
        const auto gm = gm_lower_bound_scan(ctx, s, static_cast<int>(c.budget("gm_dirs", 24)),
                                            c.root.derive(300 + n), c.budget("gm_count", 2500));
        const double gm_norm_se = gm.min_norm.std_error
                                  * (gm.empirical_c > 0.0
                                         ? gm.normalized_constant / gm.empirical_c
                                         : 0.0);
        csv.row(n, s, "gm_min_norm", gm.min_norm.value, gm.min_norm.std_error);
        csv.row(n, s, "gm_normalized_c", gm.normalized_constant, gm_norm_se);

        // Two-sided ratio M(B_s) / (L sqrt(n) M(K)).
        const auto mb = m_of_ball(ctx, s, c.root.derive(400 + n), c.budget("mb_outer", 48),
                                  c.budget("mb_inner", 1200));
        const double denom = ctx.l.value * std::sqrt(double(n)) * mk.value;
        const double r54 = mb.sphere_route.value / denom;
        const double r54_se =
            r54
            * std::sqrt(std::pow(mb.sphere_route.std_error / mb.sphere_route.value, 2)
                        + std::pow(mk.std_error / mk.value, 2)
                        + std::pow(ctx.l.std_error / ctx.l.value, 2));
        csv.row(n, s, "thm54_ratio", r54, r54_se);

        // Critical-dimension proxy from the same M(B_s) and a small b-scan.
        double b_hat = 0.0;
        double b_se = 0.0;
        const int scan_dirs = static_cast<int>(c.budget("b_dirs", 16));
        for (int d = -2; d < scan_dirs; ++d) {
            Vec t;
            if (d == -2)
                t = Vec::Unit(s, 0);
            else if (d == -1)
                t = Vec::Constant(s, 1.0 / std::sqrt(double(s)));
            else
                t = random_unit(s, c.root.derive(600 + n).derive(static_cast<std::uint64_t>(d)));
            const auto nt = multi_norm(ctx, t, c.root.derive(700 + n).derive(
                                                    static_cast<std::uint64_t>(d + 2)),
                                       c.budget("b_count", 2500));
            if (nt.value > b_hat) {
                b_hat = nt.value;
                b_se = nt.std_error;
            }
        }
        const double k_hat = s * std::pow(mb.sphere_route.value / b_hat, 2);
        const double k_se = k_hat
                            * std::sqrt(4.0
                                            * std::pow(mb.sphere_route.std_error
                                                           / mb.sphere_route.value,
                                                       2)
                                        + 4.0 * std::pow(b_se / b_hat, 2));
        csv.row(n, s, "crit_dim_khat", k_hat, k_se);

        for (const double v : {r12, gm.empirical_c, gm.normalized_constant, r54, k_hat}) {
            all_ok = all_ok && std::isfinite(v) && v > 0.0;
            worst = std::min(worst, v);
        }
    }
    check_bound(c, "grids_finite_positive", "thm1.1,thm1.2,thm5.4,rem5.5", worst, 0.0, 0.0,
                all_ok, 0, c.root, "smallest tabulated constant; all entries finite and > 0");
}

// ---------------------------------------------------------------------------

struct RunnerEntry {
    const char* name;
    const char* anchor;
    const char* summary;
    void (*fn)(ExpCtx&);
};

const RunnerEntry kRunners[] = {
    {"identity_suite", "sec4", "norm identity, closed forms, nu_t moments", run_identity_suite},
    {"functional_suite", "sec2,sec3", "M, width, vrad, self-gauge, Gaussian routes",
     run_functional_suite},
    {"bs_geometry", "sec5", "M(B_s) routes, 1-symmetry, critical dimension", run_bs_geometry},
    {"alpt", "sec5", "empirical-covariance spectral sandwich", run_alpt},
    {"milman_pajor", "sec6", "n/(n+1) volume-ratio floor", run_milman_pajor},
    {"position_search", "sec6,thm1.5", "SL(n) positioning with planted optimum",
     run_position_search},
    {"zq_suite", "sec2,sec6", "L_q-centroid supports, inclusion, nested I1", run_zq_suite},
    {"ratio_grids", "thm1.1,thm1.2,thm5.4", "report-only constants across n = 2..8",
     run_ratio_grids},
};

void write_text(const std::filesystem::path& file, const std::string& text)
{
    std::ofstream out(file, std::ios::binary);
    out << text;
}

} // namespace

int ExperimentReport::failures() const
{
    int n = 0;
    for (const auto& ch : checks) n += ch.verdict == "fail" ? 1 : 0;
    return n;
}

const std::vector<RegistryEntry>& registry_list()
{
    static const std::vector<RegistryEntry> entries = [] {
        std::vector<RegistryEntry> out;
        for (const auto& r : kRunners) out.push_back({r.name, r.anchor, r.summary});
        return out;
    }();
    return entries;
}

Json report_to_json(const ExperimentReport& report)
{
    Json j;
    j["format"] = "isonorm_report";
    j["version"] = 1;
    j["experiment"] = report.experiment;
    j["anchor"] = report.anchor;
    j["seed"] = report.seed;
    j["config"] = report.config_echo;
    Json checks = Json::array();
    for (const auto& ch : report.checks) {
        checks.push_back(Json{{"name", ch.name},
                              {"anchor", ch.anchor},
                              {"value", ch.value},
                              {"se", ch.se},
                              {"threshold", ch.threshold},
                              {"verdict", ch.verdict},
                              {"count", ch.count},
                              {"seed", ch.seed},
                              {"stream", ch.stream},
                              {"details", ch.details}});
    }
    j["checks"] = std::move(checks);
    j["failures"] = report.failures();
    j["artifacts"] = report.artifacts;
    if (!report.extra.is_null()) j["extra"] = report.extra;
    if (!report.error.empty()) j["error"] = report.error;
    return j;
}

int run_experiment_config(const nlohmann::json& config, const std::filesystem::path& out_dir,
                          ExperimentReport& report)
{
    if (!config.is_object()) {
        std::cerr << "config: expected a JSON object\n";
        return 2;
    }
    const auto name_it = config.find("experiment");
    if (name_it == config.end() || !name_it->is_string()) {
        std::cerr << "config: missing string field 'experiment'\n";
        return 2;
    }
    const std::string name = name_it->get<std::string>();
    const RunnerEntry* entry = nullptr;
    for (const auto& r : kRunners)
        if (name == r.name) entry = &r;
    if (entry == nullptr) {
        std::cerr << "config: unknown experiment '" << name << "' (see `isonorm-lab list`)\n";
        return 2;
    }
    if (auto it = config.find("seed");
        it != config.end() && !it->is_number_integer() && !it->is_number_unsigned()) {
        std::cerr << "config: 'seed' must be an integer\n";
        return 2;
    }
    if (auto it = config.find("budgets"); it != config.end() && !it->is_object()) {
        std::cerr << "config: 'budgets' must be an object\n";
        return 2;
    }

    report = ExperimentReport{};
    report.experiment = name;
    report.anchor = entry->anchor;
    report.seed = config.value("seed", std::uint64_t{1});
    report.config_echo = config;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        ExpCtx ctx{config, RngKey{report.seed, 0}, out_dir, report};
        entry->fn(ctx);
    } catch (const std::exception& e) {
        report.error = e.what();
        code = 3;
    }
    if (code == 0 && report.failures() > 0) code = 1;

    write_text(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json timing;
    timing["experiment"] = name;
    timing["wall_seconds"] = wall;
    timing["workers"] = worker_count();
    timing["written_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::system_clock::now().time_since_epoch())
                                    .count();
    write_text(out_dir / "report.timing.json", timing.dump(2) + "\n");
    return code;
}

int run_experiment(const std::string& config_path)
{
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "config not found: " << config_path << "\n";
        return 2;
    }
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    }
    std::filesystem::path out = "reports";
    if (config.is_object()) {
        out = config.value("output_dir",
                           std::string("reports/") + config.value("experiment", std::string()));
    }
    ExperimentReport report;
    const int code = run_experiment_config(config, out, report);
    if (code == 0 || code == 1) {
        std::cout << report.experiment << ": " << report.checks.size() << " checks, "
                  << report.failures() << " failures -> " << (out / "report.json").string()
                  << "\n";
    }
    return code;
}

} // namespace isonorm
