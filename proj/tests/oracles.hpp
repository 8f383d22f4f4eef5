#pragma once

// Closed-form and quadrature reference values the Monte-Carlo estimators are
// tested against. Everything here is derived independently of the library
// code (direct integrals over explicit densities), so agreement is evidence,
// not tautology.

#include <cmath>
#include <functional>

namespace oracles {

inline constexpr double kPi = 3.14159265358979323846;

/// Composite Simpson on [a, b]; panels must be even.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels = 2048)
{
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Sphere average of a gauge in the plane: (1/2pi) integral over the angle.
inline double plane_sphere_mean(const std::function<double(double, double)>& gauge)
{
    return simpson([&](double phi) { return gauge(std::cos(phi), std::sin(phi)); }, 0.0,
                   2.0 * kPi)
           / (2.0 * kPi);
}

// --- sphere functionals -----------------------------------------------------

// M(B_1^2) = mean of ||theta||_1 on the circle = 4/pi.
inline double m_b1_2() { return 4.0 / kPi; }

// M(cube_2, half-width 1/2) = mean of 2 ||theta||_inf = 4 sqrt(2)/pi.
inline double m_cube_2() { return 4.0 * std::sqrt(2.0) / kPi; }

// w(cube_2, half-width 1/2) = mean of (1/2)||theta||_1 = 2/pi.
inline double w_cube_2() { return 2.0 / kPi; }

// vrad(cube_n) = (1 / vol(B_2^n))^{1/n}; n = 2 gives pi^{-1/2}.
inline double vrad_cube_2() { return 1.0 / std::sqrt(kPi); }

// --- isotropic constants ----------------------------------------------------

// Uniform on [-1/2, 1/2]^n: covariance I/12 in every dimension.
inline double l_cube() { return 1.0 / std::sqrt(12.0); }

// Volume-1 disk (radius pi^{-1/2}): Cov = r^2/4 I, so L = 1/(2 sqrt(pi)).
inline double l_disk() { return 1.0 / (2.0 * std::sqrt(kPi)); }

// --- self-gauge law -----------------------------------------------------------

// P(gauge_C(X) <= u) = u^n for X uniform on C; mean n/(n+1).
inline double selfgauge_mean(int n) { return n / (n + 1.0); }

// --- the 1-d multi-integral norm ---------------------------------------------

// C = K = [-1/2, 1/2], X, Y iid uniform: ||(a, b)|| = E 2|aX + bY|
// = (3 a^2 + b^2) / (6 a) for a >= b > 0. In particular ||(1,1)|| = 2/3.
inline double norm_1d(double a, double b)
{
    if (a < b) std::swap(a, b);
    return (3.0 * a * a + b * b) / (6.0 * a);
}

// Same value by direct quadrature over the trapezoidal density of aX + bY,
// used to cross-check the closed form once.
inline double norm_1d_quadrature(double a, double b)
{
    if (a < b) std::swap(a, b);
    // Density of aX + bY on [-(a+b)/2, (a+b)/2] (X, Y uniform on [-1/2,1/2]):
    // flat at 1/a for |x| <= (a-b)/2, linear down to 0 at (a+b)/2.
    auto density = [&](double x) {
        x = std::abs(x);
        if (x <= (a - b) / 2.0) return 1.0 / a;
        if (x >= (a + b) / 2.0) return 0.0;
        return ((a + b) / 2.0 - x) / (a * b);
    };
    return simpson([&](double x) { return 2.0 * std::abs(x) * density(x); },
                   -(a + b) / 2.0, (a + b) / 2.0, 4096);
}

// --- moments on the cube -------------------------------------------------------

// E |x_1|^q over the unit-volume cube: (1/2)^q / (q + 1).
inline double cube_abs_moment(double q) { return std::pow(0.5, q) / (q + 1.0); }

// h_{Z_q}(e_1) on the cube = (E|x_1|^q)^{1/q}.
inline double zq_cube_e1(double q) { return std::pow(cube_abs_moment(q), 1.0 / q); }

// I_1(K, Z_q(K) polar) for K = [-1/2, 1/2]: E|x| * (E|u|^q)^{1/q}
// = (1/4) * (1/2) (q+1)^{-1/q} = 1 / (8 (q+1)^{1/q}) at h = 1/2.
inline double izq_polar_1d(double q)
{
    return 0.25 * std::pow(cube_abs_moment(q), 1.0 / q);
}

// --- Gaussian facts -------------------------------------------------------------

// sqrt(Var ||g_n||_2) with E||g_n|| = sqrt(2) Gamma((n+1)/2)/Gamma(n/2).
inline double gaussian_thin_shell(int n)
{
    const double mean =
        std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (n + 1.0)) - std::lgamma(0.5 * n));
    return std::sqrt(n - mean * mean);
}

// vol(B_1^n) = 2^n / n!.
inline double b1_volume(int n)
{
    double v = 1.0;
    for (int i = 1; i <= n; ++i) v *= 2.0 / i;
    return v;
}

} // namespace oracles
