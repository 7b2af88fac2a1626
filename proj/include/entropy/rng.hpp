#pragma once

// Deterministic random number generation for the sampling and permutation
// machinery. The generator is xoshiro256** seeded through splitmix64, both
// fixed algorithms, so every draw -- and therefore every experiment table --
// is bit-reproducible from a single 64-bit seed. Derived seeds mix stream
// tags and indices into the base seed with splitmix64 steps, which lets
// independent trials use disjoint streams regardless of execution order.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace entropy {

struct RandomSeed {
    std::uint64_t value = 0;
};

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// Mix a sequence of stream components (indices, tags) into a base seed.
inline RandomSeed derive_seed(RandomSeed base, std::initializer_list<std::uint64_t> components) {
    std::uint64_t state = base.value;
    for (std::uint64_t c : components) {
        state ^= detail::splitmix64_next(state) + c;
        state = detail::splitmix64_next(state);
    }
    return RandomSeed{state};
}

/// xoshiro256** by Blackman and Vigna, with helpers for the variate
/// families used in the experiments.
class Xoshiro256 {
public:
    explicit Xoshiro256(RandomSeed seed) {
        std::uint64_t sm = seed.value;
        for (auto& word : state_) {
            word = detail::splitmix64_next(sm);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); never returns exactly zero.
    double uniform01_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection from the top of the range.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
        const std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller; values are produced in pairs.
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_normal_ = radius * std::sin(angle);
        have_cached_normal_ = true;
        return radius * std::cos(angle);
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang; shapes below one use the
    /// boost Gamma(shape+1) * U^(1/shape).
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform01_open();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_open();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
                return d * v;
            }
        }
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

/// In-place Fisher-Yates shuffle.
template <class T>
void shuffle(std::vector<T>& items, Xoshiro256& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(gen.uniform_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Walker-Vose alias table for O(1) draws from a fixed discrete
/// distribution. Construction is deterministic in the input order.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights) {
        const std::size_t n = weights.size();
        if (n == 0) throw std::invalid_argument("AliasTable: empty weight vector");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("AliasTable: negative weight");
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("AliasTable: weights sum to zero");

        prob_.assign(n, 0.0);
        alias_.assign(n, 0);

        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

        std::vector<std::size_t> small;
        std::vector<std::size_t> large;
        for (std::size_t i = 0; i < n; ++i) {
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }

        while (!small.empty() && !large.empty()) {
            const std::size_t s = small.back();
            small.pop_back();
            const std::size_t l = large.back();
            large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (std::size_t i : large) prob_[i] = 1.0;
        for (std::size_t i : small) prob_[i] = 1.0;
    }

    std::size_t sample(Xoshiro256& gen) const {
        const std::size_t bucket = static_cast<std::size_t>(gen.uniform_below(prob_.size()));
        return gen.uniform01() < prob_[bucket] ? bucket : alias_[bucket];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

} // namespace entropy
