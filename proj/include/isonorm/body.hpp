#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace isonorm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct VolumeInfo {
    double value = 0.0;
    double rel_se = 0.0; // 0 for closed forms
    bool exact = false;
};

struct SupportEval {
    double value = 0.0;
    double lower = 0.0; // certified bracket
    double upper = 0.0;
    std::string method; // "closed_form" | "vertices" | "ascent"
    double tolerance = 0.0;
};

/// A centrally symmetric convex body with exact gauge/support/membership
/// oracles. Immutable after construction; all oracles are pure.
class Body {
public:
    struct BallSpec {
        double radius;
    };
    struct PBallSpec {
        double p; // in [1, inf]
        double radius;
    };
    struct CubeSpec {
        double half_width;
    };
    struct PolytopeSpec {
        Mat A; // m x n, rows in +- pairs
        Vec b; // > 0 componentwise
        Mat vertices; // n x V; empty when enumeration was infeasible
        double scan_circumradius_lb = 0.0; // metadata for the no-vertex path
    };
    struct EllipsoidSpec {
        Mat M; // symmetric positive definite, body {x : x'Mx <= 1}
        Eigen::LLT<Mat> llt;
    };
    struct LinearImageSpec {
        Mat T;
        Eigen::PartialPivLU<Mat> lu; // T factored once
        double abs_det;
        std::shared_ptr<const Body> inner;
    };
    struct ScaledSpec {
        double c;
        std::shared_ptr<const Body> inner;
    };
    using Spec = std::variant<BallSpec, PBallSpec, CubeSpec, PolytopeSpec,
                              EllipsoidSpec, LinearImageSpec, ScaledSpec>;

    static Body euclidean_ball(int dim, double radius = 1.0);
    static Body p_ball(int dim, double p, double radius = 1.0);
    static Body cube(int dim, double half_width = 0.5);
    static Body polytope(Mat A, Vec b);
    static Body ellipsoid(Mat M);
    static Body linear_image(Mat T, const Body& inner);
    static Body scaled(double c, const Body& inner);

    int dim() const { return dim_; }
    double inradius_lb() const { return inradius_; }
    double circumradius_ub() const { return circumradius_; }
    const std::optional<VolumeInfo>& volume() const { return volume_; }
    bool isotropic_flag() const { return isotropic_; }
    const std::string& label() const { return label_; }
    const Spec& spec() const { return *spec_; }

    /// Minkowski functional: inf{t > 0 : x in tC}.
    double gauge(const Vec& x) const;
    /// h(y) = max_{x in C} <x,y>.
    double support(const Vec& y) const;
    SupportEval support_info(const Vec& y) const;
    /// Gauge of the polar body (duality: ||y||_{C°} = h_C(y)).
    double polar_gauge(const Vec& y) const { return support(y); }
    bool contains(const Vec& x, double tol = 1e-12) const;

    /// Homothetic copy of volume 1 (exact when the volume is closed-form).
    Body normalize_volume() const;
    Body with_volume(double value, double rel_se) const;
    Body with_isotropic_flag(bool flag = true) const;
    Body with_label(std::string label) const;

private:
    Body() = default;
    void check_dim(const Vec& x) const;
    SupportEval support_ascent(const Vec& y) const;

    std::shared_ptr<const Spec> spec_;
    int dim_ = 0;
    double inradius_ = 0.0;
    double circumradius_ = 0.0;
    std::optional<VolumeInfo> volume_;
    bool isotropic_ = false;
    std::string label_;
};

} // namespace isonorm
