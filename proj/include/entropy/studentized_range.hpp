#pragma once

// Distribution of the studentized range Q = R / S, where R is the range of
// k independent standard normals and S^2 an independent chi-squared with
// df degrees of freedom divided by df. Critical values come from inverting
// the CDF numerically rather than from embedded tables, so any (k, df)
// combination is supported.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entropy/quadrature.hpp"
#include "entropy/special_functions.hpp"

namespace entropy {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

/// CDF of the range of k independent standard normals:
///   P(R <= r) = k Integral phi(u) [Phi(u) - Phi(u - r)]^(k-1) du.
inline double normal_range_cdf(double r, std::size_t k) {
    if (k < 2) throw std::invalid_argument("normal_range_cdf: k must be >= 2");
    if (!(r > 0.0)) return 0.0;

    constexpr double inv_sqrt_two_pi = 0.39894228040143267794;
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-9;
    spec.absolute_tolerance = 1e-13;
    spec.max_subdivisions = 100;

    const double kd = static_cast<double>(k);
    const double value = integrate(
        [&](double u) {
            const double phi = inv_sqrt_two_pi * std::exp(-0.5 * u * u);
            const double band = normal_cdf(u) - normal_cdf(u - r);
            return phi * std::pow(band, kd - 1.0);
        },
        -9.0, 9.0, spec);
    return std::min(1.0, kd * value);
}

/// CDF of the studentized range for k groups and df error degrees of
/// freedom. The scale variable S concentrates near one for large df, so
/// the outer integral runs over a window around its mode with the density
/// evaluated in log space.
inline double studentized_range_cdf(double q, std::size_t k, double df) {
    if (k < 2) throw std::invalid_argument("studentized_range_cdf: k must be >= 2");
    if (!(df >= 1.0)) throw std::invalid_argument("studentized_range_cdf: df must be >= 1");
    if (!(q > 0.0)) return 0.0;

    // log normalizing constant of the density of S = sqrt(chi2_df / df)
    const double log_norm = std::log(2.0) + 0.5 * df * std::log(0.5 * df) - log_gamma(0.5 * df);
    const double mode = df > 1.0 ? std::sqrt((df - 1.0) / df) : 0.5;
    const double width = 1.0 / std::sqrt(2.0 * df);
    const double lo = std::max(1e-12, mode - 14.0 * width);
    const double hi = mode + 14.0 * width;

    QuadratureSpec spec;
    spec.relative_tolerance = 1e-8;
    spec.absolute_tolerance = 1e-12;
    spec.max_subdivisions = 100;

    const double value = integrate(
        [&](double s) {
            const double log_density = log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
            return std::exp(log_density) * normal_range_cdf(q * s, k);
        },
        lo, hi, spec);
    return std::min(1.0, value);
}

/// Quantile of the studentized range (e.g. p = 0.95 for the 5% critical
/// value), by bisection on the CDF.
inline double studentized_range_quantile(double p, std::size_t k, double df) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("studentized_range_quantile: p must be in (0, 1)");
    }
    double lo = 0.0;
    double hi = 100.0;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (studentized_range_cdf(mid, k, df) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace entropy
