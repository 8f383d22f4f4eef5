#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace isonorm {

/// vol(B_2^n) = pi^{n/2} / Gamma(n/2 + 1).
inline double unit_ball_volume(int dim) {
    const double n = static_cast<double>(dim);
    return std::exp(0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0));
}

/// vol of the l_p ball of radius r: r^n (2 Gamma(1+1/p))^n / Gamma(1+n/p).
inline double p_ball_volume(int dim, double p, double radius) {
    const double n = static_cast<double>(dim);
    if (std::isinf(p)) return std::pow(2.0 * radius, n);
    const double log_v = n * (std::log(2.0) + std::lgamma(1.0 + 1.0 / p)) -
                         std::lgamma(1.0 + n / p);
    return std::pow(radius, n) * std::exp(log_v);
}

/// E ||g||_2 for g standard Gaussian in R^n: sqrt(2) Gamma((n+1)/2) / Gamma(n/2).
inline double gaussian_norm_mean(int dim) {
    const double n = static_cast<double>(dim);
    return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (n + 1.0)) - std::lgamma(0.5 * n));
}

/// E |g|^q for a standard normal scalar: 2^{q/2} Gamma((q+1)/2) / sqrt(pi).
inline double gaussian_abs_moment(double q) {
    return std::exp(0.5 * q * std::log(2.0) + std::lgamma(0.5 * (q + 1.0)) -
                    0.5 * std::log(M_PI));
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
        d = std::max(d, std::abs(static_cast<double>(i) / n - f));
    }
    return d;
}

} // namespace isonorm
