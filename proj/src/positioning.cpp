#include "isonorm/positioning.hpp"

#include "isonorm/functionals.hpp"
#include "isonorm/parallel.hpp"
#include "isonorm/samplers.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace isonorm {

namespace {

// Traceless parameterization: v in R^{n^2-1} fills S row-major, with the
// last diagonal entry balancing the trace.
Mat traceless_from(const Vec& v, int n)
{
    Mat s(n, n);
    int idx = 0;
    double diag_sum = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (r == n - 1 && c == n - 1) continue;
            s(r, c) = v[idx++];
            if (r == c) diag_sum += s(r, c);
        }
    s(n - 1, n - 1) = -diag_sum;
    return s;
}

Mat sl_from(const Vec& v, int n)
{
    Mat t = traceless_from(v, n).exp();
    return t * std::pow(t.determinant(), -1.0 / n); // round-off cleanup
}

struct SimplexResult {
    Vec best_point;
    double best_value = 0.0;
    bool converged = false;
    std::vector<double> trace;
};

// Nelder-Mead with standard coefficients; stops on simplex collapse or when
// the evaluation budget runs out.
template <typename Fn>
SimplexResult nelder_mead(const Vec& start, double step, std::int64_t budget, Fn&& f)
{
    const int d = static_cast<int>(start.size());
    std::vector<Vec> pts(static_cast<std::size_t>(d) + 1, start);
    std::vector<double> vals(static_cast<std::size_t>(d) + 1);
    std::int64_t evals = 0;
    auto eval = [&](const Vec& x) {
        ++evals;
        return f(x);
    };
    for (int i = 1; i <= d; ++i) pts[static_cast<std::size_t>(i)][i - 1] += step;
    for (int i = 0; i <= d; ++i) vals[static_cast<std::size_t>(i)] = eval(pts[static_cast<std::size_t>(i)]);

    SimplexResult res;
    auto order = [&] {
        std::vector<int> idx(static_cast<std::size_t>(d) + 1);
        for (int i = 0; i <= d; ++i) idx[static_cast<std::size_t>(i)] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)];
        });
        std::vector<Vec> p2;
        std::vector<double> v2;
        for (int i : idx) {
            p2.push_back(pts[static_cast<std::size_t>(i)]);
            v2.push_back(vals[static_cast<std::size_t>(i)]);
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };

    while (true) {
        order();
        res.trace.push_back(vals[0]);
        if (evals >= budget) break;
        double spread = 0.0;
        for (int i = 1; i <= d; ++i)
            spread = std::max(spread, (pts[static_cast<std::size_t>(i)] - pts[0]).norm());
        if (spread < 1e-6 ||
            std::abs(vals[static_cast<std::size_t>(d)] - vals[0]) < 1e-10 * (1.0 + std::abs(vals[0]))) {
            res.converged = true;
            break;
        }

        Vec centroid = Vec::Zero(d);
        for (int i = 0; i < d; ++i) centroid += pts[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(d);
        const Vec& worst = pts[static_cast<std::size_t>(d)];

        Vec refl = centroid + (centroid - worst);
        double f_refl = eval(refl);
        if (f_refl < vals[0]) {
            Vec expd = centroid + 2.0 * (centroid - worst);
            double f_exp = eval(expd);
            if (f_exp < f_refl) {
                pts[static_cast<std::size_t>(d)] = expd;
                vals[static_cast<std::size_t>(d)] = f_exp;
            } else {
                pts[static_cast<std::size_t>(d)] = refl;
                vals[static_cast<std::size_t>(d)] = f_refl;
            }
            continue;
        }
        if (f_refl < vals[static_cast<std::size_t>(d) - 1]) {
            pts[static_cast<std::size_t>(d)] = refl;
            vals[static_cast<std::size_t>(d)] = f_refl;
            continue;
        }
        Vec contr = centroid + 0.5 * (worst - centroid);
        double f_con = eval(contr);
        if (f_con < vals[static_cast<std::size_t>(d)]) {
            pts[static_cast<std::size_t>(d)] = contr;
            vals[static_cast<std::size_t>(d)] = f_con;
            continue;
        }
        for (int i = 1; i <= d; ++i) { // shrink
            pts[static_cast<std::size_t>(i)] = pts[0] + 0.5 * (pts[static_cast<std::size_t>(i)] - pts[0]);
            vals[static_cast<std::size_t>(i)] = eval(pts[static_cast<std::size_t>(i)]);
        }
    }
    res.best_point = pts[0];
    res.best_value = vals[0];
    return res;
}

double volume_ratio_root(const Body& c, const Body& k, double& rel_se)
{
    if (!c.volume() || !k.volume())
        throw std::invalid_argument("positioning: both volumes must be available");
    const int n = c.dim();
    const double ratio = std::pow(c.volume()->value / k.volume()->value, 1.0 / n);
    rel_se = combined_se(c.volume()->rel_se, k.volume()->rel_se) / n;
    return ratio;
}

} // namespace

MilmanPajorReport milman_pajor_check(const Body& c, const Body& k, RngKey stream,
                                     std::int64_t count)
{
    if (c.dim() != k.dim()) throw std::invalid_argument("milman_pajor_check: dims differ");
    const int n = c.dim();
    MilmanPajorReport rep;
    rep.lhs = i1(MeasureSpec::uniform_on(c), k, stream.derive(1), count);

    double rel_se = 0.0;
    const double root = volume_ratio_root(c, k, rel_se);
    rep.rhs = (static_cast<double>(n) / (n + 1.0)) * root;
    rep.rhs_se = rep.rhs * rel_se;
    const double se = std::max(combined_se(rep.lhs.std_error, rep.rhs_se), 1e-15);
    rep.gap_se_units = (rep.lhs.value - rep.rhs) / se;
    rep.floor_ok = rep.lhs.value >= rep.rhs - 3.0 * rep.lhs.std_error - 3.0 * rep.rhs_se;
    return rep;
}

PositionSearchReport optimize_position(const Body& c, const Body& k, RngKey stream,
                                       std::int64_t budget, int restarts,
                                       std::int64_t crn_batch)
{
    if (c.dim() != k.dim()) throw std::invalid_argument("optimize_position: dims differ");
    if (restarts < 1) throw std::invalid_argument("optimize_position: restarts must be >= 1");
    const int n = c.dim();
    const int d = n * n - 1;

    // The search objective reuses one fixed batch (common random numbers):
    // deterministic in T, so the optimizer sees a smooth landscape.
    SampleBatch crn = sample_measure(MeasureSpec::uniform_on(c), crn_batch, stream.derive(1));
    auto objective = [&](const Vec& v) {
        Mat t = sl_from(v, n);
        Eigen::PartialPivLU<Mat> lu(t);
        double acc = 0.0;
        for (std::int64_t i = 0; i < crn.count(); ++i)
            acc += k.gauge(lu.solve(crn.points.row(i).transpose()));
        return acc / static_cast<double>(crn.count());
    };

    const std::int64_t per_restart = std::max<std::int64_t>(budget / restarts, d + 2);
    std::vector<SimplexResult> results(static_cast<std::size_t>(restarts));
    const RngKey start_key = stream.derive(2);
    parallel_for(restarts, [&](std::int64_t r) {
        Vec v0 = Vec::Zero(d);
        if (r > 0) {
            Rng rng(start_key, static_cast<std::uint32_t>(r));
            for (int i = 0; i < d; ++i) v0[i] = 0.3 * rng.normal();
        }
        results[static_cast<std::size_t>(r)] = nelder_mead(v0, 0.2, per_restart, objective);
    });

    int winner = 0;
    for (int r = 1; r < restarts; ++r)
        if (results[static_cast<std::size_t>(r)].best_value <
            results[static_cast<std::size_t>(winner)].best_value)
            winner = r;
    const SimplexResult& best = results[static_cast<std::size_t>(winner)];

    PositionSearchReport rep;
    rep.t_star = sl_from(best.best_point, n);
    rep.det_t = rep.t_star.determinant();
    rep.crn_objective = best.best_value;
    rep.converged = best.converged;
    rep.winner_restart = winner;
    rep.trace = best.trace;

    // Fresh, unbiased estimate at T*.
    SampleBatch fresh = sample_measure(MeasureSpec::uniform_on(c), crn_batch, stream.derive(3));
    Eigen::PartialPivLU<Mat> lu(rep.t_star);
    Mat mapped(fresh.count(), n);
    for (std::int64_t i = 0; i < fresh.count(); ++i)
        mapped.row(i) = lu.solve(fresh.points.row(i).transpose()).transpose();
    rep.objective = mean_gauge_rows(mapped, k, stream.derive(3));

    double rel_se = 0.0;
    rep.ratio = rep.objective.value / volume_ratio_root(c, k, rel_se);
    return rep;
}

} // namespace isonorm
