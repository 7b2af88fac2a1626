#pragma once

// Entropy estimators over count histograms, each a pure function
// Histogram -> estimate in nats:
//
//   MLE   plug-in entropy of the empirical frequencies
//   MM    plug-in plus the additive (K-1)/(2N) bias correction
//   JACK  leave-one-out jackknife bias correction of the plug-in
//   HT    plug-in terms reweighted by estimated inclusion probabilities
//   CS    HT applied to coverage-rescaled probabilities (Good-Turing
//         coverage from the singleton count)
//   WW    posterior-mean entropy under a symmetric Dirichlet(alpha) prior,
//         closed form in digamma functions
//   NSB   mixture of WW estimates over a hyperprior on alpha chosen to
//         make the induced prior on entropy uniform
//
// Every estimator consumes the histogram through its count profile (the
// multiset of positive counts), so all of them are exactly invariant under
// permutation of class labels. The convention 0 ln 0 := 0 applies
// throughout.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "entropy/distribution.hpp"
#include "entropy/quadrature.hpp"
#include "entropy/special_functions.hpp"

namespace entropy {

enum class EstimatorKind {
    mle,
    miller_madow,
    jackknife,
    horvitz_thompson,
    chao_shen,
    wolpert_wolf,
    nsb,
};

/// Weight placed on alpha when mixing Wolpert-Wolf estimates into the NSB
/// value: the hyperprior density alone, or the hyperprior combined with the
/// Dirichlet-multinomial evidence of the data (the posterior over alpha).
enum class NsbWeighting {
    hyperprior,
    posterior,
};

struct EstimatorId {
    EstimatorKind kind = EstimatorKind::mle;
    double alpha = 1.0; // Wolpert-Wolf concentration parameter

    std::string name() const {
        switch (kind) {
            case EstimatorKind::mle: return "MLE";
            case EstimatorKind::miller_madow: return "MM";
            case EstimatorKind::jackknife: return "JACK";
            case EstimatorKind::horvitz_thompson: return "HT";
            case EstimatorKind::chao_shen: return "CS";
            case EstimatorKind::wolpert_wolf: return "WW";
            case EstimatorKind::nsb: return "NSB";
        }
        return "?";
    }

    static EstimatorId parse(const std::string& text, double ww_alpha = 1.0) {
        std::string lower;
        for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (lower == "mle") return {EstimatorKind::mle};
        if (lower == "mm") return {EstimatorKind::miller_madow};
        if (lower == "jack") return {EstimatorKind::jackknife};
        if (lower == "ht") return {EstimatorKind::horvitz_thompson};
        if (lower == "cs") return {EstimatorKind::chao_shen};
        if (lower == "ww") return {EstimatorKind::wolpert_wolf, ww_alpha};
        if (lower == "nsb") return {EstimatorKind::nsb};
        throw std::invalid_argument("unknown estimator '" + text + "'");
    }

    static std::vector<EstimatorId> all(double ww_alpha = 1.0) {
        return {{EstimatorKind::mle},          {EstimatorKind::miller_madow},
                {EstimatorKind::jackknife},    {EstimatorKind::horvitz_thompson},
                {EstimatorKind::chao_shen},    {EstimatorKind::wolpert_wolf, ww_alpha},
                {EstimatorKind::nsb}};
    }

    friend bool operator==(const EstimatorId& a, const EstimatorId& b) {
        return a.kind == b.kind && (a.kind != EstimatorKind::wolpert_wolf || a.alpha == b.alpha);
    }
};

struct EntropyEstimate {
    double value = 0.0;       // nats
    EstimatorId estimator;
    std::uint64_t sample_size = 0;
    std::size_t support_size = 0;
};

namespace detail {

// The multiset of positive counts, grouped by value. Classes with equal
// count contribute identical terms to every estimator, so summing over
// groups is both faster (O(distinct counts) instead of O(K)) and exactly
// label-permutation invariant.
struct CountProfile {
    std::uint64_t n = 0;            // total sample size
    std::size_t support = 0;        // declared K
    std::size_t observed = 0;       // classes with positive count
    std::uint64_t singletons = 0;   // f1
    std::vector<std::pair<std::uint64_t, std::size_t>> groups; // (count, multiplicity), ascending

    static CountProfile from(const Histogram& h) {
        h.validate();
        std::map<std::uint64_t, std::size_t> freq;
        CountProfile p;
        p.support = h.support_size;
        for (std::uint64_t c : h.counts) {
            if (c == 0) continue;
            p.n += c;
            ++freq[c];
        }
        p.groups.assign(freq.begin(), freq.end());
        for (const auto& [c, m] : p.groups) {
            p.observed += m;
            if (c == 1) p.singletons = m;
        }
        return p;
    }
};

inline void require_samples(const CountProfile& p, std::uint64_t min_n, const char* fn) {
    if (p.n < min_n) {
        throw std::invalid_argument(std::string(fn) + ": needs a sample of at least " +
                                    std::to_string(min_n) + ", histogram has " + std::to_string(p.n));
    }
}

inline double plug_in_entropy(const CountProfile& p) {
    const double n = static_cast<double>(p.n);
    NeumaierSum acc;
    for (const auto& [c, m] : p.groups) {
        const double phat = static_cast<double>(c) / n;
        if (phat < 1.0) acc.add(-static_cast<double>(m) * phat * std::log(phat));
    }
    const double h = acc.value();
    return h < 0.0 ? 0.0 : h;
}

// Sum of Horvitz-Thompson terms for per-class mass x (already coverage
// scaled when called from Chao-Shen): -x ln x / (1 - (1-x)^n).
inline double inclusion_weighted_sum(const CountProfile& p, double coverage) {
    const double n = static_cast<double>(p.n);
    NeumaierSum acc;
    for (const auto& [c, m] : p.groups) {
        const double x = coverage * (static_cast<double>(c) / n);
        if (x >= 1.0) continue; // whole mass in one class: -x ln x = 0
        const double miss = std::exp(n * std::log1p(-x)); // (1-x)^n
        acc.add(-static_cast<double>(m) * x * std::log(x) / (1.0 - miss));
    }
    const double h = acc.value();
    return h < 0.0 ? 0.0 : h;
}

// Posterior-mean entropy under Dirichlet(counts + alpha), grouped form.
inline double dirichlet_posterior_entropy(const CountProfile& p, double alpha) {
    const double k = static_cast<double>(p.support);
    const double total = static_cast<double>(p.n) + k * alpha;
    NeumaierSum acc;
    for (const auto& [c, m] : p.groups) {
        const double a = static_cast<double>(c) + alpha;
        acc.add(static_cast<double>(m) * (a / total) * digamma(a + 1.0));
    }
    const double unobserved = k - static_cast<double>(p.observed);
    if (unobserved > 0.0) {
        acc.add(unobserved * (alpha / total) * digamma(alpha + 1.0));
    }
    return digamma(total + 1.0) - acc.value();
}

// Log marginal likelihood of the counts under a symmetric Dirichlet(alpha)
// prior:  ln GAMMA(K a) - K ln GAMMA(a) + sum_k ln GAMMA(c_k + a)
//         - ln GAMMA(N + K a), with the zero-count classes cancelling.
inline double log_dirichlet_multinomial(const CountProfile& p, double alpha) {
    const double k = static_cast<double>(p.support);
    NeumaierSum acc;
    acc.add(log_gamma(k * alpha));
    acc.add(-log_gamma(static_cast<double>(p.n) + k * alpha));
    const double lg_alpha = log_gamma(alpha);
    for (const auto& [c, m] : p.groups) {
        acc.add(static_cast<double>(m) * (log_gamma(static_cast<double>(c) + alpha) - lg_alpha));
    }
    return acc.value();
}

} // namespace detail

/// Plug-in (maximum likelihood) entropy estimate.
inline EntropyEstimate estimate_mle(const Histogram& h) {
    auto p = detail::CountProfile::from(h);
    detail::require_samples(p, 1, "estimate_mle");
    return {detail::plug_in_entropy(p), {EstimatorKind::mle}, p.n, p.support};
}

/// Plug-in estimate plus the (K-1)/(2N) correction, K = declared support.
inline EntropyEstimate estimate_miller_madow(const Histogram& h) {
    auto p = detail::CountProfile::from(h);
    detail::require_samples(p, 1, "estimate_miller_madow");
    const double correction =
        (static_cast<double>(p.support) - 1.0) / (2.0 * static_cast<double>(p.n));
    return {detail::plug_in_entropy(p) + correction, {EstimatorKind::miller_madow}, p.n, p.support};
}

/// Leave-one-out jackknife correction of the plug-in estimate. The N
/// held-out estimates are grouped by class count: removing any of the c
/// samples of a class with count c yields the same histogram. The
/// correction can push the value above ln K (or below zero); by default it
/// is reported raw, with an opt-in clamp onto [0, ln K].
inline EntropyEstimate estimate_jackknife(const Histogram& h, bool clamp_to_range = false) {
    auto p = detail::CountProfile::from(h);
    detail::require_samples(p, 2, "estimate_jackknife");

    const double n = static_cast<double>(p.n);
    detail::NeumaierSum log_sum; // S = sum over classes of c ln c
    for (const auto& [c, m] : p.groups) {
        log_sum.add(static_cast<double>(m) * static_cast<double>(c) * std::log(static_cast<double>(c)));
    }
    const double s = log_sum.value();

    detail::NeumaierSum held_out; // sum of the N leave-one-out estimates
    for (const auto& [c, m] : p.groups) {
        const double cd = static_cast<double>(c);
        double s_removed = s - cd * std::log(cd);
        if (c > 1) s_removed += (cd - 1.0) * std::log(cd - 1.0);
        const double h_out = std::log(n - 1.0) - s_removed / (n - 1.0);
        held_out.add(static_cast<double>(m) * cd * h_out);
    }

    const double mle = detail::plug_in_entropy(p);
    double value = n * mle - (n - 1.0) / n * held_out.value();
    if (clamp_to_range) {
        value = std::clamp(value, 0.0, std::log(static_cast<double>(p.support)));
    }
    return {value, {EstimatorKind::jackknife}, p.n, p.support};
}

/// Horvitz-Thompson estimate: each plug-in term divided by the estimated
/// inclusion probability 1 - (1 - phat)^N.
inline EntropyEstimate estimate_horvitz_thompson(const Histogram& h) {
    auto p = detail::CountProfile::from(h);
    detail::require_samples(p, 1, "estimate_horvitz_thompson");
    return {detail::inclusion_weighted_sum(p, 1.0), {EstimatorKind::horvitz_thompson}, p.n, p.support};
}

/// Chao-Shen estimate: Horvitz-Thompson on coverage-rescaled probabilities,
/// with coverage 1 - f1/N and the f1 = N fallback to f1 = N - 1.
inline EntropyEstimate estimate_chao_shen(const Histogram& h) {
    auto p = detail::CountProfile::from(h);
    detail::require_samples(p, 1, "estimate_chao_shen");
    std::uint64_t f1 = p.singletons;
    if (f1 == p.n) f1 = p.n - 1;
    const double coverage = 1.0 - static_cast<double>(f1) / static_cast<double>(p.n);
    return {detail::inclusion_weighted_sum(p, coverage), {EstimatorKind::chao_shen}, p.n, p.support};
}

/// Wolpert-Wolf estimate: the posterior-mean entropy under a symmetric
/// Dirichlet prior with concentration alpha on all K declared classes,
/// observed or not. A prior-only histogram (N = 0) is allowed.
inline EntropyEstimate estimate_wolpert_wolf(const Histogram& h, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("estimate_wolpert_wolf: alpha must be a positive real");
    }
    auto p = detail::CountProfile::from(h);
    double value = 0.0;
    if (p.support > 1) value = detail::dirichlet_posterior_entropy(p, alpha);
    return {value, {EstimatorKind::wolpert_wolf, alpha}, p.n, p.support};
}

/// Density of the NSB hyperprior over alpha for support size K:
///   (K psi_1(K alpha + 1) - psi_1(alpha + 1)) / ln K.
/// It integrates to one over (0, inf) and makes the induced prior on
/// expected entropy uniform over [0, ln K].
inline double nsb_hyperprior_density(double alpha, std::size_t support_size) {
    if (support_size < 2) {
        throw std::invalid_argument("nsb_hyperprior_density: support size must be >= 2");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::domain_error("nsb_hyperprior_density: alpha must be a positive real");
    }
    const double k = static_cast<double>(support_size);
    return (k * trigamma(k * alpha + 1.0) - trigamma(alpha + 1.0)) / std::log(k);
}

/// Log marginal likelihood of the histogram under a symmetric
/// Dirichlet(alpha) prior (the evidence used by the posterior weighting).
inline double log_dirichlet_multinomial_evidence(const Histogram& h, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("log_dirichlet_multinomial_evidence: alpha must be positive");
    }
    return detail::log_dirichlet_multinomial(detail::CountProfile::from(h), alpha);
}

/// NSB estimate: the Wolpert-Wolf value averaged over alpha.
///
/// With NsbWeighting::hyperprior (the default) the weight is the hyperprior
/// density alone and the estimate is the plain integral over (0, inf).
/// With NsbWeighting::posterior the weight additionally carries the
/// Dirichlet-multinomial evidence of the data; the weight is computed in
/// log space, max-subtracted, and normalized, with the integral taken in
/// log-alpha over the region where the weight is non-negligible.
inline EntropyEstimate estimate_nsb(const Histogram& h, const QuadratureSpec& spec = {},
                                    NsbWeighting weighting = NsbWeighting::hyperprior) {
    auto p = detail::CountProfile::from(h);
    detail::require_samples(p, 1, "estimate_nsb");
    if (p.support < 2) {
        throw std::invalid_argument("estimate_nsb: support size must be >= 2");
    }
    const double k = static_cast<double>(p.support);
    const double log_k = std::log(k);

    double value = 0.0;
    if (weighting == NsbWeighting::hyperprior) {
        value = integrate_half_line(
            [&](double alpha) {
                const double density =
                    (k * trigamma(k * alpha + 1.0) - trigamma(alpha + 1.0)) / log_k;
                return detail::dirichlet_posterior_entropy(p, alpha) * density;
            },
            spec);
    } else {
        // log weight as a function of u = ln alpha, including the du jacobian
        auto log_weight = [&](double u) {
            const double alpha = std::exp(u);
            const double density = (k * trigamma(k * alpha + 1.0) - trigamma(alpha + 1.0)) / log_k;
            return std::log(density) + u + detail::log_dirichlet_multinomial(p, alpha);
        };

        // Locate the weight's peak on a coarse grid, then restrict the
        // integral to where the weight is within e^-45 of it.
        constexpr int kScanPoints = 257;
        constexpr double kLo = -18.42; // ln 1e-8
        constexpr double kHi = 18.42;  // ln 1e8
        double best_u = 0.0;
        double best_g = -std::numeric_limits<double>::infinity();
        std::array<double, kScanPoints> scan{};
        for (int i = 0; i < kScanPoints; ++i) {
            const double u = kLo + (kHi - kLo) * i / (kScanPoints - 1);
            scan[i] = log_weight(u);
            if (scan[i] > best_g) {
                best_g = scan[i];
                best_u = u;
            }
        }
        double lo = kLo;
        double hi = kHi;
        const double step = (kHi - kLo) / (kScanPoints - 1);
        for (int i = 0; i < kScanPoints; ++i) {
            const double u = kLo + step * i;
            if (u < best_u && scan[i] < best_g - 45.0) lo = u;
            if (u > best_u && scan[i] < best_g - 45.0) {
                hi = u;
                break;
            }
        }

        const double numerator = integrate(
            [&](double u) {
                return detail::dirichlet_posterior_entropy(p, std::exp(u)) *
                       std::exp(log_weight(u) - best_g);
            },
            lo, hi, spec);
        const double normalizer =
            integrate([&](double u) { return std::exp(log_weight(u) - best_g); }, lo, hi, spec);
        value = numerator / normalizer;
    }

    return {value, {EstimatorKind::nsb}, p.n, p.support};
}

/// Dispatch on the estimator id. The quadrature spec and weighting apply
/// to NSB only.
inline EntropyEstimate estimate(const Histogram& h, const EstimatorId& id,
                                const QuadratureSpec& spec = {},
                                NsbWeighting weighting = NsbWeighting::hyperprior) {
    switch (id.kind) {
        case EstimatorKind::mle: return estimate_mle(h);
        case EstimatorKind::miller_madow: return estimate_miller_madow(h);
        case EstimatorKind::jackknife: return estimate_jackknife(h);
        case EstimatorKind::horvitz_thompson: return estimate_horvitz_thompson(h);
        case EstimatorKind::chao_shen: return estimate_chao_shen(h);
        case EstimatorKind::wolpert_wolf: return estimate_wolpert_wolf(h, id.alpha);
        case EstimatorKind::nsb: return estimate_nsb(h, spec, weighting);
    }
    throw std::invalid_argument("estimate: unknown estimator kind");
}

} // namespace entropy
