#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "entropy/distribution.hpp"
#include "entropy/estimators.hpp"
#include "entropy/quadrature.hpp"
#include "entropy/rng.hpp"

using namespace entropy;

namespace {

Histogram make_hist(std::vector<std::uint64_t> counts, std::size_t support = 0) {
    Histogram h;
    h.support_size = support == 0 ? counts.size() : support;
    h.counts = std::move(counts);
    return h;
}

// Monte-Carlo oracle for the Wolpert-Wolf closed form: mean entropy of
// Dirichlet(counts + alpha) posterior draws.
struct McEstimate {
    double mean;
    double standard_error;
};

McEstimate ww_posterior_entropy_mc(const Histogram& h, double alpha, int draws, RandomSeed seed) {
    Xoshiro256 gen(seed);
    double sum = 0.0;
    double sq = 0.0;
    std::vector<double> p(h.support_size);
    for (int d = 0; d < draws; ++d) {
        double total = 0.0;
        for (std::size_t k = 0; k < h.support_size; ++k) {
            const double count = k < h.counts.size() ? static_cast<double>(h.counts[k]) : 0.0;
            p[k] = gen.gamma(count + alpha);
            total += p[k];
        }
        double entropy_draw = 0.0;
        for (double& x : p) {
            x /= total;
            if (x > 0.0) entropy_draw -= x * std::log(x);
        }
        sum += entropy_draw;
        sq += entropy_draw * entropy_draw;
    }
    const double mean = sum / draws;
    const double var = sq / draws - mean * mean;
    return {mean, std::sqrt(std::max(var, 0.0) / draws)};
}

// Monte-Carlo oracle for the NSB mixture: inverse-CDF sampling of alpha
// from the weight tabulated on a dense log grid, then averaging the
// Wolpert-Wolf closed form.
double nsb_grid_mc_oracle(const Histogram& h, NsbWeighting weighting, int draws, RandomSeed seed,
                          double* standard_error) {
    constexpr int grid = 6000;
    const double lo = std::log(1e-7);
    const double hi = std::log(1e7);

    std::vector<double> log_w(grid);
    std::vector<double> alphas(grid);
    double peak = -1e308;
    for (int i = 0; i < grid; ++i) {
        const double u = lo + (hi - lo) * i / (grid - 1);
        alphas[i] = std::exp(u);
        double lw = std::log(nsb_hyperprior_density(alphas[i], h.support_size)) + u;
        if (weighting == NsbWeighting::posterior) {
            lw += log_dirichlet_multinomial_evidence(h, alphas[i]);
        }
        log_w[i] = lw;
        peak = std::max(peak, lw);
    }

    std::vector<double> cdf(grid, 0.0);
    for (int i = 1; i < grid; ++i) {
        const double trap = 0.5 * (std::exp(log_w[i] - peak) + std::exp(log_w[i - 1] - peak));
        cdf[i] = cdf[i - 1] + trap;
    }
    for (double& c : cdf) c /= cdf.back();

    Xoshiro256 gen(seed);
    double sum = 0.0;
    double sq = 0.0;
    for (int d = 0; d < draws; ++d) {
        const double u = gen.uniform01_open();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<std::size_t>(std::distance(cdf.begin(), it));
        const double value = estimate_wolpert_wolf(h, alphas[std::min<std::size_t>(idx, grid - 1)]).value;
        sum += value;
        sq += value * value;
    }
    const double mean = sum / draws;
    const double var = sq / draws - mean * mean;
    if (standard_error) *standard_error = std::sqrt(std::max(var, 0.0) / draws);
    return mean;
}

} // namespace

TEST_CASE("wolpert-wolf closed form matches its Monte-Carlo oracle", "[nsb][slow]") {
    Xoshiro256 gen(RandomSeed{600});
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 2 + gen.uniform_below(8);
        Histogram h;
        h.support_size = k;
        h.counts.assign(k, 0);
        const std::uint64_t n = 3 + gen.uniform_below(40);
        for (std::uint64_t i = 0; i < n; ++i) ++h.counts[gen.uniform_below(k)];
        const double alpha = std::exp(gen.uniform01() * 4.0 - 2.0);

        const double closed = estimate_wolpert_wolf(h, alpha).value;
        const auto mc = ww_posterior_entropy_mc(h, alpha, 100000,
                                                derive_seed(RandomSeed{601}, {static_cast<std::uint64_t>(trial)}));
        REQUIRE(std::abs(closed - mc.mean) <= 3.0 * mc.standard_error);
    }
}

TEST_CASE("hyperprior density closed forms", "[nsb]") {
    // value at alpha = 1, K = 2, from the trigamma recurrence
    CHECK(nsb_hyperprior_density(1.0, 2) == Approx(0.209095659497806).margin(1e-6));
    CHECK_THROWS_AS(nsb_hyperprior_density(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(nsb_hyperprior_density(0.0, 4), std::domain_error);
}

TEST_CASE("hyperprior density is positive and matches the CDF derivative", "[nsb]") {
    Xoshiro256 gen(RandomSeed{602});
    for (std::size_t k : {2, 10, 100}) {
        for (int i = 0; i < 50; ++i) {
            const double alpha = std::exp(gen.uniform01() * 10.0 - 5.0);
            const double density = nsb_hyperprior_density(alpha, k);
            REQUIRE(density > 0.0);
            // central difference of (psi(K a + 1) - psi(a + 1)) / ln K
            const double step = 1e-6 * std::max(1.0, alpha);
            const double kd = static_cast<double>(k);
            auto cdf = [kd](double a) { return (digamma(kd * a + 1.0) - digamma(a + 1.0)) / std::log(kd); };
            const double fd = (cdf(alpha + step) - cdf(alpha - step)) / (2.0 * step);
            REQUIRE(density == Approx(fd).margin(1e-6 * std::max(1.0, density)));
        }
    }
}

TEST_CASE("hyperprior normalizes to one", "[nsb]") {
    for (std::size_t k : {2, 10, 100, 1000}) {
        const double mass =
            integrate_half_line([k](double a) { return nsb_hyperprior_density(a, k); });
        CHECK(mass == Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("NSB estimates stay inside (0, ln K)", "[nsb]") {
    Xoshiro256 gen(RandomSeed{603});
    for (int i = 0; i < 100; ++i) {
        const std::size_t k = 2 + gen.uniform_below(12);
        Histogram h;
        h.support_size = k;
        h.counts.assign(k, 0);
        const std::uint64_t n = 1 + gen.uniform_below(50);
        for (std::uint64_t s = 0; s < n; ++s) ++h.counts[gen.uniform_below(k)];

        for (auto weighting : {NsbWeighting::hyperprior, NsbWeighting::posterior}) {
            const double value = estimate_nsb(h, {}, weighting).value;
            REQUIRE(value > 0.0);
            REQUIRE(value < std::log(static_cast<double>(k)));
        }
    }
}

TEST_CASE("NSB quadrature matches the grid Monte-Carlo oracle", "[nsb][slow]") {
    const Histogram h = make_hist({3, 1});
    for (auto weighting : {NsbWeighting::hyperprior, NsbWeighting::posterior}) {
        double stderr_mc = 0.0;
        const double oracle = nsb_grid_mc_oracle(h, weighting, 200000, RandomSeed{604}, &stderr_mc);
        const double value = estimate_nsb(h, {}, weighting).value;
        INFO("weighting " << (weighting == NsbWeighting::hyperprior ? "hyperprior" : "posterior"));
        REQUIRE(std::abs(value - oracle) <= 3.0 * stderr_mc);
    }
}

TEST_CASE("NSB converges to the true entropy at large N", "[nsb][slow]") {
    std::vector<double> uniform(10, 0.1);
    const CategoricalDistribution truth(uniform);
    const auto h = draw_histogram(truth, 100000, RandomSeed{605});
    for (auto weighting : {NsbWeighting::hyperprior, NsbWeighting::posterior}) {
        const double value = estimate_nsb(h, {}, weighting).value;
        REQUIRE(std::abs(value - std::log(10.0)) < 0.01);
    }
}

TEST_CASE("NSB is deterministic and label-permutation invariant", "[nsb]") {
    Histogram h = make_hist({4, 2, 2, 1, 0, 1}, 8);
    const double a = estimate_nsb(h).value;
    const double b = estimate_nsb(h).value;
    CHECK(a == b);
    std::reverse(h.counts.begin(), h.counts.end());
    CHECK(estimate_nsb(h).value == a);
}

TEST_CASE("NSB preconditions", "[nsb]") {
    CHECK_THROWS_AS(estimate_nsb(make_hist({0, 0})), std::invalid_argument);
    CHECK_THROWS_AS(estimate_nsb(make_hist({5}, 1)), std::invalid_argument);
    CHECK_THROWS_AS(log_dirichlet_multinomial_evidence(make_hist({1, 1}), 0.0),
                    std::invalid_argument);
}

TEST_CASE("posterior weighting responds to the data where the hyperprior does not", "[nsb]") {
    // strongly non-uniform counts: the evidence pulls alpha down, so the
    // posterior-weighted estimate sits below the hyperprior-weighted one
    const Histogram h = make_hist({60, 10, 3, 1, 1, 0, 0, 0, 0, 0}, 10);
    const double prior_weighted = estimate_nsb(h, {}, NsbWeighting::hyperprior).value;
    const double posterior_weighted = estimate_nsb(h, {}, NsbWeighting::posterior).value;
    CHECK(posterior_weighted < prior_weighted);
}
