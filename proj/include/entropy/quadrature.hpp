#pragma once

// One-dimensional adaptive quadrature on finite intervals and the positive
// half-line. The rule is Gauss-Kronrod 7/15: the 15-point Kronrod value is
// the interval estimate and |K15 - G7| its error bound. Intervals are kept
// in a worklist and the one with the largest error bound is bisected until
// the summed bound meets the requested tolerances or the subdivision budget
// runs out. Half-line integrals substitute x = t/(1-t), which maps (0,inf)
// onto (0,1); the Kronrod nodes are interior, so the endpoints are never
// evaluated.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace entropy {

struct QuadratureSpec {
    double relative_tolerance = 1e-8;
    double absolute_tolerance = 1e-10;
    int max_subdivisions = 200;

    void validate() const {
        if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0)) {
            throw std::invalid_argument("QuadratureSpec: tolerances must be strictly positive");
        }
        if (max_subdivisions < 1) {
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
        }
    }
};

/// Thrown when the requested tolerances cannot be met within the
/// subdivision budget. Carries the best estimate and its error bound.
class quadrature_error : public std::runtime_error {
public:
    quadrature_error(double best_estimate, double error_bound)
        : std::runtime_error("quadrature did not converge: estimate " +
                             std::to_string(best_estimate) + " +- " + std::to_string(error_bound)),
          best_estimate_(best_estimate),
          error_bound_(error_bound) {}

    double best_estimate() const { return best_estimate_; }
    double error_bound() const { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

namespace detail {

// Nodes and weights of the 7-point Gauss / 15-point Kronrod pair on [-1,1].
// Values from the QUADPACK dqk15 tables.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct IntervalEstimate {
    double a = 0, b = 0;
    double value = 0;
    double error = 0;
};

template <class F>
IntervalEstimate gauss_kronrod_15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];

    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double flo = f(center - dx);
        const double fhi = f(center + dx);
        kronrod += kKronrodWeights[i] * (flo + fhi);
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * (flo + fhi);
        }
    }

    IntervalEstimate est;
    est.a = a;
    est.b = b;
    est.value = kronrod * half;
    est.error = std::abs((kronrod - gauss) * half);
    return est;
}

} // namespace detail

/// Integrate f over the finite interval [a, b] to the tolerances in `spec`.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw std::invalid_argument("integrate: interval endpoints out of order");
    }

    std::vector<detail::IntervalEstimate> work;
    work.push_back(detail::gauss_kronrod_15(f, a, b));

    double total = work.front().value;
    double total_error = work.front().error;

    for (int used = 0; used < spec.max_subdivisions; ++used) {
        if (total_error <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total))) {
            return total;
        }
        auto worst = std::max_element(work.begin(), work.end(),
                                      [](const auto& u, const auto& v) { return u.error < v.error; });
        const detail::IntervalEstimate cur = *worst;
        work.erase(worst);

        const double mid = 0.5 * (cur.a + cur.b);
        auto left = detail::gauss_kronrod_15(f, cur.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, cur.b);

        total += left.value + right.value - cur.value;
        total_error += left.error + right.error - cur.error;
        work.push_back(left);
        work.push_back(right);
    }

    if (total_error <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total))) {
        return total;
    }
    throw quadrature_error(total, total_error);
}

/// Integrate f over (0, inf) via the substitution x = t/(1-t).
template <class F>
double integrate_half_line(F&& f, const QuadratureSpec& spec = {}) {
    auto transformed = [&f](double t) {
        const double one_minus = 1.0 - t;
        const double x = t / one_minus;
        return f(x) / (one_minus * one_minus);
    };
    return integrate(transformed, 0.0, 1.0, spec);
}

} // namespace entropy
