#pragma once

// Experiment harness: repeated sampling from a truth source, paired
// evaluation of a set of estimators, bias/MAB/MSE aggregation, paired
// permutation tests, and an all-pairs studentized-range (Tukey) comparison.
//
// Pairing and determinism both come from the seed schedule: the histogram
// of trial t at sample size N is drawn with a seed derived from
// (base_seed, N, t) only, so every estimator sees the same histogram
// sequence and a rerun with the same configuration reproduces every table
// bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entropy/distribution.hpp"
#include "entropy/estimators.hpp"
#include "entropy/rng.hpp"
#include "entropy/studentized_range.hpp"

namespace entropy {

enum class Metric { mab, mse };

inline std::string metric_name(Metric m) { return m == Metric::mab ? "MAB" : "MSE"; }

/// Which support size the harness hands to the estimators that use K.
///
///   declared   the truth's full class count, unobserved classes included
///   observed   the number of classes actually present in the sample
///   automatic  MM and WW get the observed count (their corrections assume
///              a support that is mostly sampled and overshoot badly when
///              K >> N); NSB gets the declared count (its hyperprior is a
///              function of the real cardinality)
enum class SupportPolicy { declared, observed, automatic };

inline std::string support_policy_name(SupportPolicy p) {
    switch (p) {
        case SupportPolicy::declared: return "declared";
        case SupportPolicy::observed: return "observed";
        case SupportPolicy::automatic: return "auto";
    }
    return "?";
}

/// Source of ground-truth distributions: either one fixed distribution for
/// all trials, or a fresh symmetric-Dirichlet draw per trial.
class TruthSource {
public:
    static TruthSource fixed(CategoricalDistribution dist) {
        TruthSource s;
        s.fixed_.emplace(std::move(dist));
        return s;
    }

    static TruthSource dirichlet(std::size_t k, double alpha) {
        if (k < 1 || !(alpha > 0.0)) {
            throw std::invalid_argument("TruthSource::dirichlet: invalid parameters");
        }
        TruthSource s;
        s.k_ = k;
        s.alpha_ = alpha;
        return s;
    }

    bool per_trial() const { return !fixed_.has_value(); }

    CategoricalDistribution realize(RandomSeed trial_seed) const {
        if (fixed_) return *fixed_;
        return sample_dirichlet_symmetric(k_, alpha_, trial_seed);
    }

private:
    TruthSource() = default;
    std::optional<CategoricalDistribution> fixed_;
    std::size_t k_ = 0;
    double alpha_ = 1.0;
};

struct ExperimentConfig {
    TruthSource truth = TruthSource::fixed(CategoricalDistribution({1.0}));
    std::vector<std::uint64_t> sample_sizes;
    std::size_t trials = 100;
    std::vector<EstimatorId> estimators;
    RandomSeed base_seed;
    std::size_t permutations = 1000;
    SupportPolicy support = SupportPolicy::automatic;
    QuadratureSpec quadrature;
    NsbWeighting nsb_weighting = NsbWeighting::hyperprior;

    void validate() const {
        if (trials < 2) throw std::invalid_argument("ExperimentConfig: trials must be >= 2");
        if (permutations < 1) throw std::invalid_argument("ExperimentConfig: permutations must be >= 1");
        if (sample_sizes.empty()) throw std::invalid_argument("ExperimentConfig: no sample sizes");
        for (std::uint64_t n : sample_sizes) {
            if (n < 1) throw std::invalid_argument("ExperimentConfig: sample sizes must be >= 1");
        }
        if (estimators.empty()) throw std::invalid_argument("ExperimentConfig: no estimators");
        quadrature.validate();
    }
};

/// Aggregates for one (estimator, N) cell: the raw per-trial errors
/// (estimate - truth) and their bias / MAB / MSE / variance summaries,
/// which satisfy MSE = bias^2 + variance.
struct TrialReport {
    EstimatorId estimator;
    std::uint64_t sample_size = 0;
    std::vector<double> errors;
    double bias = 0.0;
    double mab = 0.0;
    double mse = 0.0;
    double variance = 0.0;

    static TrialReport from_errors(EstimatorId id, std::uint64_t n, std::vector<double> errors) {
        if (errors.empty()) throw std::invalid_argument("TrialReport: no errors");
        TrialReport r;
        r.estimator = id;
        r.sample_size = n;
        detail::NeumaierSum sum;
        detail::NeumaierSum abs_sum;
        detail::NeumaierSum sq_sum;
        for (double e : errors) {
            sum.add(e);
            abs_sum.add(std::abs(e));
            sq_sum.add(e * e);
        }
        const double count = static_cast<double>(errors.size());
        r.bias = sum.value() / count;
        r.mab = abs_sum.value() / count;
        r.mse = sq_sum.value() / count;
        detail::NeumaierSum centered;
        for (double e : errors) centered.add((e - r.bias) * (e - r.bias));
        r.variance = centered.value() / count;
        r.errors = std::move(errors);
        return r;
    }
};

namespace detail {

// Seed streams; the tag keeps the truth draw and the histogram draw of the
// same trial on disjoint streams.
enum SeedStream : std::uint64_t { kTruthStream = 1, kHistogramStream = 2, kPermutationStream = 3 };

} // namespace detail

/// The seed schedule is part of the public contract: the histogram of trial
/// t at sample size N depends only on (base seed, N, t), which is what makes
/// runs reproducible and estimator error vectors paired.
inline RandomSeed truth_seed(RandomSeed base, std::uint64_t n, std::size_t trial) {
    return derive_seed(base, {detail::kTruthStream, n, static_cast<std::uint64_t>(trial)});
}

inline RandomSeed histogram_seed(RandomSeed base, std::uint64_t n, std::size_t trial) {
    return derive_seed(base, {detail::kHistogramStream, n, static_cast<std::uint64_t>(trial)});
}

namespace detail {

inline Histogram with_support(const Histogram& h, const EstimatorId& id, SupportPolicy policy) {
    const bool uses_support = id.kind == EstimatorKind::miller_madow ||
                              id.kind == EstimatorKind::wolpert_wolf || id.kind == EstimatorKind::nsb;
    if (!uses_support || policy == SupportPolicy::declared) return h;
    if (policy == SupportPolicy::observed ||
        (policy == SupportPolicy::automatic && id.kind != EstimatorKind::nsb)) {
        Histogram reduced;
        reduced.counts.reserve(h.observed_classes());
        for (std::uint64_t c : h.counts) {
            if (c > 0) reduced.counts.push_back(c);
        }
        reduced.support_size = std::max<std::size_t>(1, reduced.counts.size());
        return reduced;
    }
    return h;
}

} // namespace detail

/// Run the full paired experiment: one report per (estimator, sample size).
inline std::vector<TrialReport> run_experiment(const ExperimentConfig& config) {
    config.validate();

    std::vector<TrialReport> reports;
    reports.reserve(config.estimators.size() * config.sample_sizes.size());

    for (std::uint64_t n : config.sample_sizes) {
        std::vector<std::vector<double>> errors(config.estimators.size());
        for (auto& v : errors) v.reserve(config.trials);

        for (std::size_t t = 0; t < config.trials; ++t) {
            const CategoricalDistribution truth =
                config.truth.realize(truth_seed(config.base_seed, n, t));
            const double truth_entropy = true_entropy(truth);
            const Histogram histogram =
                draw_histogram(truth, n, histogram_seed(config.base_seed, n, t));

            for (std::size_t e = 0; e < config.estimators.size(); ++e) {
                const EstimatorId& id = config.estimators[e];
                try {
                    const Histogram input = detail::with_support(histogram, id, config.support);
                    const EntropyEstimate est =
                        estimate(input, id, config.quadrature, config.nsb_weighting);
                    errors[e].push_back(est.value - truth_entropy);
                } catch (const std::exception& ex) {
                    throw std::runtime_error("run_experiment: estimator " + id.name() + " failed at N=" +
                                             std::to_string(n) + " trial=" + std::to_string(t) + ": " +
                                             ex.what());
                }
            }
        }

        for (std::size_t e = 0; e < config.estimators.size(); ++e) {
            reports.push_back(TrialReport::from_errors(config.estimators[e], n, std::move(errors[e])));
        }
    }
    return reports;
}

/// Outcome of one pairwise comparison. `winner` is empty on a tie.
struct ComparisonResult {
    EstimatorId estimator_a;
    EstimatorId estimator_b;
    Metric metric = Metric::mab;
    double p_value = 1.0;
    std::optional<EstimatorId> winner;
    bool significant = false;
};

/// Two-sided paired permutation test on the difference of the group metric
/// (MAB or MSE). The null distribution swaps each trial's pair of errors
/// with probability one half and recomputes the metric difference; the
/// p-value uses the add-one correction (r+1)/(P+1).
inline ComparisonResult paired_permutation_test(const std::vector<double>& errors_a,
                                                const std::vector<double>& errors_b, Metric metric,
                                                std::size_t permutations, RandomSeed seed,
                                                EstimatorId id_a = {}, EstimatorId id_b = {}) {
    if (errors_a.size() != errors_b.size()) {
        throw std::invalid_argument("paired_permutation_test: error vectors differ in length");
    }
    if (errors_a.size() < 2) {
        throw std::invalid_argument("paired_permutation_test: needs at least two paired trials");
    }
    if (permutations < 1) {
        throw std::invalid_argument("paired_permutation_test: needs at least one permutation");
    }

    const std::size_t n = errors_a.size();
    std::vector<double> diff(n); // per-trial metric contribution difference
    detail::NeumaierSum observed_sum;
    for (std::size_t i = 0; i < n; ++i) {
        const double ua = metric == Metric::mab ? std::abs(errors_a[i]) : errors_a[i] * errors_a[i];
        const double ub = metric == Metric::mab ? std::abs(errors_b[i]) : errors_b[i] * errors_b[i];
        diff[i] = ua - ub;
        observed_sum.add(diff[i]);
    }
    const double observed = std::abs(observed_sum.value());

    Xoshiro256 gen(derive_seed(seed, {detail::kPermutationStream}));
    std::size_t at_least_as_extreme = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        detail::NeumaierSum swapped;
        for (std::size_t i = 0; i < n; ++i) {
            swapped.add(gen.uniform01() < 0.5 ? -diff[i] : diff[i]);
        }
        if (std::abs(swapped.value()) >= observed) ++at_least_as_extreme;
    }

    ComparisonResult result;
    result.estimator_a = id_a;
    result.estimator_b = id_b;
    result.metric = metric;
    result.p_value = static_cast<double>(at_least_as_extreme + 1) / static_cast<double>(permutations + 1);
    const double da = observed_sum.value();
    if (da < 0.0) {
        result.winner = id_a;
    } else if (da > 0.0) {
        result.winner = id_b;
    }
    result.significant = result.p_value < 0.05;
    return result;
}

/// All-pairs comparison at one sample size. `beat_count[i]` is the number
/// of estimators that reports[i] beats with significance.
struct TukeyResult {
    std::vector<ComparisonResult> pairs;
    std::vector<int> beat_count;
    double critical_value = 0.0;
    double pooled_variance = 0.0;
    double degrees_of_freedom = 0.0;
};

/// Tukey comparison of per-trial |error| (MAB) or error^2 (MSE) group
/// means via the studentized range. With zero pooled variance the
/// convention is: pairs with equal means tie, all others are significant.
inline TukeyResult tukey_all_pairs(const std::vector<TrialReport>& reports, Metric metric,
                                   double significance = 0.05) {
    if (reports.size() < 2) {
        throw std::invalid_argument("tukey_all_pairs: needs at least two estimators");
    }
    const std::size_t k = reports.size();
    const std::size_t n = reports.front().errors.size();
    for (const auto& r : reports) {
        if (r.errors.size() != n) {
            throw std::invalid_argument("tukey_all_pairs: unequal trial counts");
        }
        if (r.sample_size != reports.front().sample_size) {
            throw std::invalid_argument("tukey_all_pairs: reports from different sample sizes");
        }
    }
    if (n < 2) throw std::invalid_argument("tukey_all_pairs: needs at least two trials");

    std::vector<double> means(k, 0.0);
    detail::NeumaierSum within;
    for (std::size_t g = 0; g < k; ++g) {
        detail::NeumaierSum m;
        for (double e : reports[g].errors) {
            m.add(metric == Metric::mab ? std::abs(e) : e * e);
        }
        means[g] = m.value() / static_cast<double>(n);
        for (double e : reports[g].errors) {
            const double x = metric == Metric::mab ? std::abs(e) : e * e;
            within.add((x - means[g]) * (x - means[g]));
        }
    }

    TukeyResult result;
    result.degrees_of_freedom = static_cast<double>(k * (n - 1));
    result.pooled_variance = within.value() / result.degrees_of_freedom;
    const bool degenerate = !(result.pooled_variance > 0.0);
    if (!degenerate) {
        result.critical_value =
            studentized_range_quantile(1.0 - significance, k, result.degrees_of_freedom);
    }
    const double standard_error =
        degenerate ? 0.0 : std::sqrt(result.pooled_variance / static_cast<double>(n));

    result.beat_count.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            ComparisonResult pair;
            pair.estimator_a = reports[i].estimator;
            pair.estimator_b = reports[j].estimator;
            pair.metric = metric;
            const double gap = std::abs(means[i] - means[j]);
            if (degenerate) {
                pair.significant = gap > 0.0;
                pair.p_value = pair.significant ? 0.0 : 1.0;
            } else {
                const double q = gap / standard_error;
                pair.p_value = 1.0 - studentized_range_cdf(q, k, result.degrees_of_freedom);
                pair.significant = q > result.critical_value;
            }
            if (means[i] < means[j]) {
                pair.winner = reports[i].estimator;
            } else if (means[j] < means[i]) {
                pair.winner = reports[j].estimator;
            }
            if (pair.significant && pair.winner) {
                ++result.beat_count[means[i] < means[j] ? i : j];
            }
            result.pairs.push_back(pair);
        }
    }
    return result;
}

/// One row of the winner table: the best estimator per sample size with
/// the number of rivals it beats significantly.
struct WinnerRow {
    std::uint64_t sample_size = 0;
    Metric metric = Metric::mab;
    EstimatorId winner;
    int beats = 0;
    bool tie = false;
};

/// Winner per sample size for one metric. Exact metric ties resolve to the
/// lexicographically smallest estimator name and are flagged.
inline std::vector<WinnerRow> best_estimator_table(
    const std::vector<TrialReport>& reports, Metric metric,
    const std::map<std::uint64_t, TukeyResult>& comparisons = {}) {
    std::map<std::uint64_t, std::vector<const TrialReport*>> by_n;
    for (const auto& r : reports) by_n[r.sample_size].push_back(&r);

    std::vector<WinnerRow> rows;
    for (const auto& [n, group] : by_n) {
        WinnerRow row;
        row.sample_size = n;
        row.metric = metric;
        const TrialReport* best = nullptr;
        std::size_t best_index = 0;
        bool tie = false;
        for (std::size_t i = 0; i < group.size(); ++i) {
            const double value = metric == Metric::mab ? group[i]->mab : group[i]->mse;
            if (!best) {
                best = group[i];
                best_index = i;
                continue;
            }
            const double best_value = metric == Metric::mab ? best->mab : best->mse;
            if (value < best_value) {
                best = group[i];
                best_index = i;
                tie = false;
            } else if (value == best_value) {
                tie = true;
                if (group[i]->estimator.name() < best->estimator.name()) {
                    best = group[i];
                    best_index = i;
                }
            }
        }
        row.winner = best->estimator;
        row.tie = tie;
        if (auto it = comparisons.find(n); it != comparisons.end()) {
            if (best_index < it->second.beat_count.size()) {
                row.beats = it->second.beat_count[best_index];
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace entropy
