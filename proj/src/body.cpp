#include "isonorm/body.hpp"

#include "isonorm/rng.hpp"
#include "isonorm/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace isonorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dual_exponent(double p)
{
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

double p_norm(const Vec& x, double p)
{
    if (std::isinf(p)) return x.lpNorm<Eigen::Infinity>();
    if (p == 1.0) return x.lpNorm<1>();
    if (p == 2.0) return x.norm();
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
    return std::pow(s, 1.0 / p);
}

// How far the p-unit-ball radius can differ from the Euclidean one:
// max(1, n^{1/2 - 1/p}) and min(1, n^{1/2 - 1/p}) bound the distortion.
double p_ball_distortion(int dim, double p)
{
    double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    return std::pow(static_cast<double>(dim), 0.5 - inv_p);
}

// Enumerate combinations of `k` indices out of `m`, calling `fn` on each.
template <typename Fn>
void for_each_combination(int m, int k, Fn&& fn)
{
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == m - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

double binomial_bound(int m, int k)
{
    double v = 1.0;
    for (int i = 0; i < k; ++i) {
        v *= static_cast<double>(m - i) / static_cast<double>(i + 1);
        if (v > 1e18) return v;
    }
    return v;
}

// Vertices of {Ax <= b}: basic solutions of n active constraints that
// satisfy the remaining inequalities. Feasible only for small sizes.
Mat enumerate_vertices(const Mat& A, const Vec& b)
{
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    std::vector<Vec> verts;
    Mat sub(n, n);
    Vec rhs(n);
    for_each_combination(m, n, [&](const std::vector<int>& idx) {
        for (int i = 0; i < n; ++i) {
            sub.row(i) = A.row(idx[i]);
            rhs[i] = b[idx[i]];
        }
        Eigen::FullPivLU<Mat> lu(sub);
        if (!lu.isInvertible()) return;
        Vec v = lu.solve(rhs);
        if (((A * v).array() > b.array() + 1e-9 * (1.0 + b.array().abs())).any())
            return;
        for (const Vec& w : verts)
            if ((w - v).lpNorm<Eigen::Infinity>() < 1e-9 * (1.0 + v.lpNorm<Eigen::Infinity>()))
                return;
        verts.push_back(std::move(v));
    });
    Mat out(n, static_cast<int>(verts.size()));
    for (int j = 0; j < out.cols(); ++j) out.col(j) = verts[static_cast<size_t>(j)];
    return out;
}

} // namespace

Body Body::euclidean_ball(int dim, double radius)
{
    if (dim < 1) throw std::invalid_argument("euclidean_ball: dim must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("euclidean_ball: radius must be > 0");
    Body body;
    body.spec_ = std::make_shared<const Spec>(BallSpec{radius});
    body.dim_ = dim;
    body.inradius_ = radius;
    body.circumradius_ = radius;
    body.volume_ = VolumeInfo{std::pow(radius, dim) * unit_ball_volume(dim), 0.0, true};
    body.label_ = "ball" + std::to_string(dim);
    return body;
}

Body Body::p_ball(int dim, double p, double radius)
{
    if (dim < 1) throw std::invalid_argument("p_ball: dim must be >= 1");
    if (!(p >= 1.0)) throw std::invalid_argument("p_ball: p must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("p_ball: radius must be > 0");
    Body body;
    body.spec_ = std::make_shared<const Spec>(PBallSpec{p, radius});
    body.dim_ = dim;
    double d = p_ball_distortion(dim, p);
    body.inradius_ = radius * std::min(1.0, d);
    body.circumradius_ = radius * std::max(1.0, d);
    body.volume_ = VolumeInfo{p_ball_volume(dim, p, radius), 0.0, true};
    char ptext[32];
    std::snprintf(ptext, sizeof ptext, "%g", p);
    body.label_ = "pball" + std::string(ptext) + "_" + std::to_string(dim);
    return body;
}

Body Body::cube(int dim, double half_width)
{
    if (dim < 1) throw std::invalid_argument("cube: dim must be >= 1");
    if (!(half_width > 0.0)) throw std::invalid_argument("cube: half_width must be > 0");
    Body body;
    body.spec_ = std::make_shared<const Spec>(CubeSpec{half_width});
    body.dim_ = dim;
    body.inradius_ = half_width;
    body.circumradius_ = half_width * std::sqrt(static_cast<double>(dim));
    body.volume_ = VolumeInfo{std::pow(2.0 * half_width, dim), 0.0, true};
    body.label_ = "cube" + std::to_string(dim);
    return body;
}

Body Body::polytope(Mat A, Vec b)
{
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (m < 2 || n < 1 || b.size() != m)
        throw std::invalid_argument("polytope: need A (m x n) and b of length m");
    if (!(b.array() > 0.0).all())
        throw std::invalid_argument("polytope: b must be > 0 (origin interior)");

    // Central symmetry: the normalized rows a_i/b_i must close under negation.
    Mat r = A.array().colwise() / b.array();
    for (int i = 0; i < m; ++i) {
        bool paired = false;
        for (int j = 0; j < m && !paired; ++j)
            paired = (r.row(i) + r.row(j)).norm() <= 1e-9 * (1.0 + r.row(i).norm());
        if (!paired)
            throw std::invalid_argument("polytope: facets are not centrally symmetric");
    }

    Eigen::JacobiSVD<Mat> svd(A);
    double sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    if (sigma_min <= 1e-12 * svd.singularValues()(0))
        throw std::invalid_argument("polytope: A is rank deficient (unbounded body)");

    PolytopeSpec spec{std::move(A), std::move(b), Mat(), 0.0};
    double inradius = kInf;
    for (int i = 0; i < m; ++i)
        inradius = std::min(inradius, spec.b[i] / spec.A.row(i).norm());

    double circumradius;
    if (n <= 8 && binomial_bound(m, n) <= 2e6) {
        spec.vertices = enumerate_vertices(spec.A, spec.b);
        if (spec.vertices.cols() == 0)
            throw std::invalid_argument("polytope: degenerate spec, no vertices found");
        circumradius = spec.vertices.colwise().norm().maxCoeff();
    } else {
        // Certified: ||x||_2 <= ||Ax||_2 / sigma_min(A) <= ||b||_2 / sigma_min(A).
        circumradius = spec.b.norm() / sigma_min;
    }

    Body body;
    body.dim_ = n;
    body.inradius_ = inradius;
    body.circumradius_ = circumradius;
    body.label_ = "polytope" + std::to_string(m) + "x" + std::to_string(n);
    body.spec_ = std::make_shared<const Spec>(std::move(spec));

    if (std::get<PolytopeSpec>(*body.spec_).vertices.cols() == 0) {
        // Metadata lower bound from boundary points along fixed directions.
        Rng rng(RngKey{0x1f0b5cUL, static_cast<uint64_t>(m) * 1000 + static_cast<uint64_t>(n)});
        double lb = 0.0;
        Vec theta(n);
        for (int k = 0; k < 1000; ++k) {
            for (int i = 0; i < n; ++i) theta[i] = rng.normal();
            theta.normalize();
            lb = std::max(lb, 1.0 / body.gauge(theta));
        }
        auto mut = std::make_shared<Spec>(*body.spec_);
        std::get<PolytopeSpec>(*mut).scan_circumradius_lb = lb;
        body.spec_ = std::move(mut);
    }
    return body;
}

Body Body::ellipsoid(Mat M)
{
    const int n = static_cast<int>(M.rows());
    if (n < 1 || M.cols() != n) throw std::invalid_argument("ellipsoid: M must be square");
    if ((M - M.transpose()).lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + M.lpNorm<Eigen::Infinity>()))
        throw std::invalid_argument("ellipsoid: M must be symmetric");
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(M);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("ellipsoid: M must be positive definite");
    EllipsoidSpec spec{M, Eigen::LLT<Mat>(M)};

    Body body;
    body.spec_ = std::make_shared<const Spec>(std::move(spec));
    body.dim_ = n;
    body.inradius_ = 1.0 / std::sqrt(eig.eigenvalues().maxCoeff());
    body.circumradius_ = 1.0 / std::sqrt(eig.eigenvalues().minCoeff());
    double det = eig.eigenvalues().prod();
    body.volume_ = VolumeInfo{unit_ball_volume(n) / std::sqrt(det), 0.0, true};
    body.label_ = "ellipsoid" + std::to_string(n);
    return body;
}

Body Body::linear_image(Mat T, const Body& inner)
{
    const int n = inner.dim();
    if (T.rows() != n || T.cols() != n)
        throw std::invalid_argument("linear_image: T must be n x n for the inner body");
    Eigen::PartialPivLU<Mat> lu(T);
    double abs_det = std::abs(lu.determinant());
    if (!(abs_det > 1e-300))
        throw std::invalid_argument("linear_image: T must be invertible");
    Eigen::JacobiSVD<Mat> svd(T);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 1e-12 * smax)
        throw std::invalid_argument("linear_image: T is numerically singular");

    Body body;
    body.dim_ = n;
    body.inradius_ = smin * inner.inradius_;
    body.circumradius_ = smax * inner.circumradius_;
    if (inner.volume_)
        body.volume_ = VolumeInfo{abs_det * inner.volume_->value, inner.volume_->rel_se,
                                  inner.volume_->exact};
    body.label_ = "T*" + inner.label_;
    body.spec_ = std::make_shared<const Spec>(
        LinearImageSpec{std::move(T), std::move(lu), abs_det, std::make_shared<const Body>(inner)});
    return body;
}

Body Body::scaled(double c, const Body& inner)
{
    if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
    Body body;
    body.dim_ = inner.dim_;
    body.inradius_ = c * inner.inradius_;
    body.circumradius_ = c * inner.circumradius_;
    if (inner.volume_)
        body.volume_ = VolumeInfo{std::pow(c, inner.dim_) * inner.volume_->value,
                                  inner.volume_->rel_se, inner.volume_->exact};
    body.label_ = "scaled*" + inner.label_;
    body.spec_ = std::make_shared<const Spec>(ScaledSpec{c, std::make_shared<const Body>(inner)});
    return body;
}

void Body::check_dim(const Vec& x) const
{
    if (x.size() != dim_) throw std::invalid_argument("body: vector has wrong dimension");
}

double Body::gauge(const Vec& x) const
{
    check_dim(x);
    struct Visitor {
        const Vec& x;
        const Body& self;
        double operator()(const BallSpec& s) const { return x.norm() / s.radius; }
        double operator()(const PBallSpec& s) const { return p_norm(x, s.p) / s.radius; }
        double operator()(const CubeSpec& s) const
        {
            return x.lpNorm<Eigen::Infinity>() / s.half_width;
        }
        double operator()(const PolytopeSpec& s) const
        {
            // gauge = max_i <a_i, x> / b_i (positive part suffices by symmetry)
            return ((s.A * x).array() / s.b.array()).maxCoeff();
        }
        double operator()(const EllipsoidSpec& s) const
        {
            return (s.llt.matrixU() * x).norm();
        }
        double operator()(const LinearImageSpec& s) const { return s.inner->gauge(s.lu.solve(x)); }
        double operator()(const ScaledSpec& s) const { return s.inner->gauge(x) / s.c; }
    };
    return std::visit(Visitor{x, *this}, *spec_);
}

bool Body::contains(const Vec& x, double tol) const { return gauge(x) <= 1.0 + tol; }

double Body::support(const Vec& y) const { return support_info(y).value; }

SupportEval Body::support_info(const Vec& y) const
{
    check_dim(y);
    SupportEval ev;
    ev.method = "closed_form";

    if (const auto* s = std::get_if<BallSpec>(spec_.get())) {
        ev.value = s->radius * y.norm();
    } else if (const auto* s = std::get_if<PBallSpec>(spec_.get())) {
        ev.value = s->radius * p_norm(y, dual_exponent(s->p));
    } else if (const auto* s = std::get_if<CubeSpec>(spec_.get())) {
        ev.value = s->half_width * y.lpNorm<1>();
    } else if (const auto* s = std::get_if<EllipsoidSpec>(spec_.get())) {
        ev.value = std::sqrt(y.dot(s->llt.solve(y)));
    } else if (const auto* s = std::get_if<LinearImageSpec>(spec_.get())) {
        SupportEval in = s->inner->support_info(s->T.transpose() * y);
        ev = in;
        return ev;
    } else if (const auto* s = std::get_if<ScaledSpec>(spec_.get())) {
        SupportEval in = s->inner->support_info(y);
        in.value *= s->c;
        in.lower *= s->c;
        in.upper *= s->c;
        return in;
    } else {
        const auto& poly = std::get<PolytopeSpec>(*spec_);
        if (poly.vertices.cols() > 0) {
            ev.value = (poly.vertices.transpose() * y).maxCoeff();
            ev.method = "vertices";
        } else {
            return support_ascent(y);
        }
    }
    ev.lower = ev.value;
    ev.upper = ev.value;
    ev.tolerance = 0.0;
    return ev;
}

// Projected supergradient ascent of <y, .> over the boundary, multi-start.
// Lower bound is the best boundary point reached; upper bound is the
// certified envelope circumradius_ub * ||y||_2.
SupportEval Body::support_ascent(const Vec& y) const
{
    const int n = dim_;
    SupportEval ev;
    ev.method = "ascent";
    double ynorm = y.norm();
    if (ynorm == 0.0) {
        ev.method = "closed_form";
        return ev;
    }

    auto boundary_value = [&](Vec theta, double& best, Vec& best_theta) {
        double g = gauge(theta);
        if (!(g > 0.0)) return;
        theta /= g;
        double v = y.dot(theta);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    };

    std::vector<Vec> starts;
    starts.push_back(y / ynorm);
    for (int i = 0; i < n; ++i) {
        starts.push_back(Vec::Unit(n, i));
        starts.push_back(-Vec::Unit(n, i));
    }
    Rng rng(RngKey{0xa5cead, static_cast<uint64_t>(n)});
    for (int k = 0; k < 16; ++k) {
        Vec theta(n);
        for (int i = 0; i < n; ++i) theta[i] = rng.normal();
        starts.push_back(theta.normalized());
    }

    double best = -kInf;
    Vec best_theta = starts[0];
    for (const Vec& s : starts) boundary_value(s, best, best_theta);

    // Push the current boundary point toward y, re-project, with a
    // geometrically decaying step relative to the circumradius scale.
    Vec theta = best_theta;
    double step = circumradius_;
    for (int it = 0; it < 200; ++it) {
        Vec cand = theta + (step / ynorm) * y;
        double before = best;
        boundary_value(cand, best, best_theta);
        if (best > before) {
            theta = best_theta;
        } else {
            step *= 0.5;
            if (step < 1e-14 * circumradius_) break;
        }
    }

    ev.lower = best;
    ev.upper = circumradius_ * ynorm;
    ev.value = best;
    ev.tolerance = (ev.upper - ev.lower) / std::max(std::abs(ev.lower), 1e-300);
    return ev;
}

Body Body::normalize_volume() const
{
    if (!volume_)
        throw std::logic_error("normalize_volume: body has no volume value attached");
    double v = volume_->value;
    if (!(v > 0.0)) throw std::logic_error("normalize_volume: non-positive volume");
    if (volume_->exact && std::abs(v - 1.0) < 1e-15) return *this;
    double c = std::pow(v, -1.0 / dim_);
    Body out = scaled(c, *this);
    out.volume_ = VolumeInfo{1.0, volume_->rel_se, volume_->exact};
    return out;
}

Body Body::with_volume(double value, double rel_se) const
{
    if (!(value > 0.0)) throw std::invalid_argument("with_volume: value must be > 0");
    Body out = *this;
    out.volume_ = VolumeInfo{value, rel_se, false};
    return out;
}

Body Body::with_isotropic_flag(bool flag) const
{
    Body out = *this;
    out.isotropic_ = flag;
    return out;
}

Body Body::with_label(std::string label) const
{
    Body out = *this;
    out.label_ = std::move(label);
    return out;
}

} // namespace isonorm
