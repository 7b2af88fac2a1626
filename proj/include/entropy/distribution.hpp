#pragma once

// Ground-truth categorical distributions, their exact entropy, and the
// samplers behind the three experiment families: symmetric Dirichlet draws,
// finite power-law (Zipf) distributions and renormalized empirical counts.
// Entropies are in nats throughout.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entropy/rng.hpp"

namespace entropy {

namespace detail {

// Neumaier compensated summation; keeps long accumulations at O(eps)
// instead of O(n eps).
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace detail

/// A known finite probability vector, optionally labeled. Invariants:
/// K >= 1, all probabilities non-negative, total within 1e-12 of one.
class CategoricalDistribution {
public:
    explicit CategoricalDistribution(std::vector<double> probabilities,
                                     std::vector<std::string> labels = {})
        : probabilities_(std::move(probabilities)), labels_(std::move(labels)) {
        if (probabilities_.empty()) {
            throw std::invalid_argument("CategoricalDistribution: needs at least one class");
        }
        if (!labels_.empty() && labels_.size() != probabilities_.size()) {
            throw std::invalid_argument("CategoricalDistribution: label/probability size mismatch");
        }
        detail::NeumaierSum total;
        for (double p : probabilities_) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw std::invalid_argument("CategoricalDistribution: probabilities must be >= 0");
            }
            total.add(p);
        }
        if (std::abs(total.value() - 1.0) > 1e-12) {
            throw std::invalid_argument("CategoricalDistribution: probabilities sum to " +
                                        std::to_string(total.value()) + ", not 1");
        }
    }

    std::size_t size() const { return probabilities_.size(); }
    double operator[](std::size_t k) const { return probabilities_[k]; }
    const std::vector<double>& probabilities() const { return probabilities_; }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<double> probabilities_;
    std::vector<std::string> labels_;
};

/// Exact Shannon entropy -sum p ln p in nats, with 0 ln 0 := 0.
inline double true_entropy(const CategoricalDistribution& dist) {
    detail::NeumaierSum acc;
    for (double p : dist.probabilities()) {
        if (p > 0.0) acc.add(-p * std::log(p));
    }
    const double h = acc.value();
    return h < 0.0 ? 0.0 : h;
}

/// Finite Zipf distribution: p_k proportional to k^(-exponent), rank k = 1..K.
inline CategoricalDistribution zipfian(std::size_t k, double exponent) {
    if (k < 1) throw std::invalid_argument("zipfian: K must be >= 1");
    if (!(exponent > 0.0)) throw std::invalid_argument("zipfian: exponent must be positive");

    std::vector<double> weights(k);
    detail::NeumaierSum total;
    for (std::size_t rank = 1; rank <= k; ++rank) {
        const double w = std::pow(static_cast<double>(rank), -exponent);
        weights[rank - 1] = w;
        total.add(w);
    }
    const double norm = total.value();
    for (double& w : weights) w /= norm;
    return CategoricalDistribution(std::move(weights));
}

/// Renormalized empirical distribution. Classes with zero count are
/// dropped; labels of the surviving classes are preserved.
inline CategoricalDistribution from_counts(
    const std::vector<std::pair<std::string, std::uint64_t>>& counts) {
    detail::NeumaierSum total;
    for (const auto& [label, c] : counts) total.add(static_cast<double>(c));
    const double norm = total.value();
    if (!(norm > 0.0)) {
        throw std::invalid_argument("from_counts: needs at least one positive count");
    }

    std::vector<double> probs;
    std::vector<std::string> labels;
    probs.reserve(counts.size());
    labels.reserve(counts.size());
    for (const auto& [label, c] : counts) {
        if (c == 0) continue;
        probs.push_back(static_cast<double>(c) / norm);
        labels.push_back(label);
    }
    return CategoricalDistribution(std::move(probs), std::move(labels));
}

/// One draw from a symmetric Dirichlet(alpha * 1_K), via K independent
/// Gamma(alpha, 1) variates normalized by their sum.
inline CategoricalDistribution sample_dirichlet_symmetric(std::size_t k, double alpha,
                                                          RandomSeed seed) {
    if (k < 1) throw std::invalid_argument("sample_dirichlet_symmetric: K must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("sample_dirichlet_symmetric: alpha must be positive");
    if (k == 1) return CategoricalDistribution({1.0});

    Xoshiro256 gen(seed);
    std::vector<double> draws(k);
    for (;;) {
        detail::NeumaierSum total;
        for (std::size_t i = 0; i < k; ++i) {
            draws[i] = gen.gamma(alpha);
            total.add(draws[i]);
        }
        const double norm = total.value();
        if (norm > 0.0) {
            for (double& d : draws) d /= norm;
            return CategoricalDistribution(std::move(draws));
        }
        // Underflow to an all-zero vector (possible for very small alpha):
        // redraw from the same stream.
    }
}

/// Observed counts per class plus the declared support size K. The counts
/// vector may be shorter than K; missing tail classes are implicit zeros.
struct Histogram {
    std::vector<std::uint64_t> counts;
    std::size_t support_size = 0;

    std::uint64_t sample_size() const {
        std::uint64_t n = 0;
        for (std::uint64_t c : counts) n += c;
        return n;
    }

    std::size_t observed_classes() const {
        std::size_t k = 0;
        for (std::uint64_t c : counts) k += (c > 0) ? 1 : 0;
        return k;
    }

    /// Number of singleton classes (count exactly one).
    std::uint64_t singleton_count() const {
        std::uint64_t f1 = 0;
        for (std::uint64_t c : counts) f1 += (c == 1) ? 1 : 0;
        return f1;
    }

    void validate() const {
        if (support_size < 1) {
            throw std::invalid_argument("Histogram: support_size must be >= 1");
        }
        if (observed_classes() > support_size) {
            throw std::invalid_argument("Histogram: support_size smaller than observed classes");
        }
    }
};

/// Multinomial(N, p) draw; the result declares the distribution's full
/// support size, including classes that were never observed.
inline Histogram draw_histogram(const CategoricalDistribution& dist, std::uint64_t n,
                                RandomSeed seed) {
    if (n < 1) throw std::invalid_argument("draw_histogram: N must be >= 1");

    Histogram h;
    h.support_size = dist.size();
    h.counts.assign(dist.size(), 0);

    Xoshiro256 gen(seed);
    AliasTable table(dist.probabilities());
    for (std::uint64_t i = 0; i < n; ++i) {
        ++h.counts[table.sample(gen)];
    }
    return h;
}

} // namespace entropy
