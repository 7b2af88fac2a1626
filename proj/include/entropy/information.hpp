#pragma once

// Mutual information, normalized MI, variation of information, permutation
// significance and hierarchical clustering over co-occurrence tables. MI is
// computed as a difference of entropies, H(X) - H(X|Y), with conditional
// entropies decomposed into column entropies weighted by empirical column
// mass, and every entropy produced by the selected estimator. Estimated MI
// can therefore be negative for non-plug-in estimators; the raw value is
// kept and flagged, never silently clamped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entropy/estimators.hpp"
#include "entropy/rng.hpp"

namespace entropy {

/// Co-occurrence counts of two categorical variables; rows index X classes,
/// columns index Y classes.
class JointCountTable {
public:
    JointCountTable(std::size_t rows, std::size_t cols, std::vector<std::uint64_t> counts,
                    std::vector<std::string> row_labels = {}, std::vector<std::string> col_labels = {})
        : rows_(rows),
          cols_(cols),
          counts_(std::move(counts)),
          row_labels_(std::move(row_labels)),
          col_labels_(std::move(col_labels)) {
        if (rows_ == 0 || cols_ == 0 || counts_.size() != rows_ * cols_) {
            throw std::invalid_argument("JointCountTable: shape/count mismatch");
        }
        if (!row_labels_.empty() && row_labels_.size() != rows_) {
            throw std::invalid_argument("JointCountTable: row label mismatch");
        }
        if (!col_labels_.empty() && col_labels_.size() != cols_) {
            throw std::invalid_argument("JointCountTable: column label mismatch");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint64_t at(std::size_t r, std::size_t c) const { return counts_[r * cols_ + c]; }
    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (std::uint64_t c : counts_) t += c;
        return t;
    }

    /// Histogram of X (row sums); declared support is the row count.
    Histogram row_marginal() const {
        Histogram h;
        h.support_size = rows_;
        h.counts.assign(rows_, 0);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) h.counts[r] += at(r, c);
        }
        return h;
    }

    /// Histogram of Y (column sums); declared support is the column count.
    Histogram column_marginal() const {
        Histogram h;
        h.support_size = cols_;
        h.counts.assign(cols_, 0);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) h.counts[c] += at(r, c);
        }
        return h;
    }

    /// Histogram of X within column c; declared support is the row count.
    Histogram column_slice(std::size_t c) const {
        Histogram h;
        h.support_size = rows_;
        h.counts.resize(rows_);
        for (std::size_t r = 0; r < rows_; ++r) h.counts[r] = at(r, c);
        return h;
    }

    JointCountTable transposed() const {
        std::vector<std::uint64_t> t(counts_.size());
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) t[c * rows_ + r] = at(r, c);
        }
        return JointCountTable(cols_, rows_, std::move(t), col_labels_, row_labels_);
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
};

enum class NmiNormalizer { min_marginal, max_marginal, geometric_mean };

inline std::string nmi_normalizer_name(NmiNormalizer n) {
    switch (n) {
        case NmiNormalizer::min_marginal: return "min";
        case NmiNormalizer::max_marginal: return "max";
        case NmiNormalizer::geometric_mean: return "sqrt";
    }
    return "?";
}

struct MIResult {
    double mi = 0.0;                  // nats; raw, may be negative
    std::optional<double> nmi;        // filled by normalized_mi
    EstimatorId estimator;
    std::optional<double> p_value;    // filled by permutation testing
    bool mi_negative = false;         // raw MI came out below zero
    bool nmi_clamped = false;         // NMI was clamped into [0, 1]
    std::size_t jackknife_fallbacks = 0; // slices where JACK fell back to MLE
};

namespace detail {

// Entropy of one histogram under the chosen estimator, with the jackknife
// falling back to the plug-in on slices too small to resample.
inline double slice_entropy(const Histogram& h, const EstimatorId& id, const QuadratureSpec& spec,
                            NsbWeighting weighting, std::size_t* fallbacks) {
    if (id.kind == EstimatorKind::jackknife && h.sample_size() < 2) {
        if (fallbacks) ++(*fallbacks);
        return estimate_mle(h).value;
    }
    return estimate(h, id, spec, weighting).value;
}

// H(X|Y) = sum_c (N_c / N) H(column c), empty columns skipped.
inline double conditional_entropy(const JointCountTable& table, const EstimatorId& id,
                                  const QuadratureSpec& spec, NsbWeighting weighting,
                                  std::size_t* fallbacks) {
    const double total = static_cast<double>(table.total());
    NeumaierSum acc;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        const Histogram slice = table.column_slice(c);
        const std::uint64_t n_c = slice.sample_size();
        if (n_c == 0) continue;
        const double h = slice_entropy(slice, id, spec, weighting, fallbacks);
        acc.add((static_cast<double>(n_c) / total) * h);
    }
    return acc.value();
}

} // namespace detail

/// MI(X;Y) = H(X) - H(X|Y), both entropies under the same estimator.
inline MIResult estimate_mi(const JointCountTable& table, const EstimatorId& id,
                            const QuadratureSpec& spec = {},
                            NsbWeighting weighting = NsbWeighting::hyperprior) {
    if (table.total() < 1) throw std::invalid_argument("estimate_mi: empty table");

    MIResult result;
    result.estimator = id;
    const double marginal =
        detail::slice_entropy(table.row_marginal(), id, spec, weighting, &result.jackknife_fallbacks);
    const double conditional =
        detail::conditional_entropy(table, id, spec, weighting, &result.jackknife_fallbacks);
    result.mi = marginal - conditional;
    result.mi_negative = result.mi < 0.0;
    return result;
}

/// Fill in NMI = MI / normalizer, the normalizer built from the two
/// marginal entropies under the same estimator. Values outside [0, 1] are
/// clamped and flagged.
inline MIResult normalized_mi(MIResult result, const JointCountTable& table,
                              NmiNormalizer normalizer = NmiNormalizer::min_marginal,
                              const QuadratureSpec& spec = {},
                              NsbWeighting weighting = NsbWeighting::hyperprior) {
    const double h_x = detail::slice_entropy(table.row_marginal(), result.estimator, spec, weighting,
                                             &result.jackknife_fallbacks);
    const double h_y = detail::slice_entropy(table.column_marginal(), result.estimator, spec,
                                             weighting, &result.jackknife_fallbacks);
    double norm = 0.0;
    switch (normalizer) {
        case NmiNormalizer::min_marginal: norm = std::min(h_x, h_y); break;
        case NmiNormalizer::max_marginal: norm = std::max(h_x, h_y); break;
        case NmiNormalizer::geometric_mean: norm = std::sqrt(std::max(0.0, h_x) * std::max(0.0, h_y)); break;
    }
    if (!(norm > 0.0)) {
        throw std::domain_error("normalized_mi: marginal entropies are zero, NMI undefined");
    }
    double nmi = result.mi / norm;
    if (nmi < 0.0) {
        nmi = 0.0;
        result.nmi_clamped = true;
    } else if (nmi > 1.0) {
        nmi = 1.0;
        result.nmi_clamped = true;
    }
    result.nmi = nmi;
    return result;
}

/// Variation of information VI = H(X|Y) + H(Y|X), in nats.
inline double variation_of_information(const JointCountTable& table, const EstimatorId& id,
                                       const QuadratureSpec& spec = {},
                                       NsbWeighting weighting = NsbWeighting::hyperprior,
                                       std::size_t* jackknife_fallbacks = nullptr) {
    if (table.total() < 1) throw std::invalid_argument("variation_of_information: empty table");
    const JointCountTable flipped = table.transposed();
    return detail::conditional_entropy(table, id, spec, weighting, jackknife_fallbacks) +
           detail::conditional_entropy(flipped, id, spec, weighting, jackknife_fallbacks);
}

/// Permutation significance of the observed MI: the paired samples are
/// expanded, the Y column is reshuffled `permutations` times, and the
/// p-value is (#{permuted MI >= observed} + 1) / (P + 1).
inline double mi_permutation_significance(const JointCountTable& table, const EstimatorId& id,
                                          std::size_t permutations, RandomSeed seed,
                                          const QuadratureSpec& spec = {},
                                          NsbWeighting weighting = NsbWeighting::hyperprior) {
    const std::uint64_t total = table.total();
    if (total < 2) throw std::invalid_argument("mi_permutation_significance: needs >= 2 samples");
    if (permutations < 1) {
        throw std::invalid_argument("mi_permutation_significance: needs >= 1 permutation");
    }

    const double observed = estimate_mi(table, id, spec, weighting).mi;

    std::vector<std::uint32_t> xs;
    std::vector<std::uint32_t> ys;
    xs.reserve(total);
    ys.reserve(total);
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.cols(); ++c) {
            for (std::uint64_t i = 0; i < table.at(r, c); ++i) {
                xs.push_back(static_cast<std::uint32_t>(r));
                ys.push_back(static_cast<std::uint32_t>(c));
            }
        }
    }

    Xoshiro256 gen(seed);
    std::vector<std::uint64_t> counts(table.rows() * table.cols());
    std::size_t at_least = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        shuffle(ys, gen);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            ++counts[static_cast<std::size_t>(xs[i]) * table.cols() + ys[i]];
        }
        const JointCountTable permuted(table.rows(), table.cols(), counts);
        if (estimate_mi(permuted, id, spec, weighting).mi >= observed) ++at_least;
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(permutations + 1);
}

/// Symmetric dissimilarity matrix over labeled items.
struct DistanceMatrix {
    std::vector<std::string> labels;
    std::vector<double> values; // row-major, size n*n

    std::size_t size() const { return labels.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }

    void validate() const {
        const std::size_t n = size();
        if (n < 2) throw std::invalid_argument("DistanceMatrix: needs at least two items");
        if (values.size() != n * n) throw std::invalid_argument("DistanceMatrix: shape mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (at(i, i) != 0.0) throw std::invalid_argument("DistanceMatrix: nonzero diagonal");
            for (std::size_t j = 0; j < n; ++j) {
                if (!(at(i, j) >= 0.0)) throw std::invalid_argument("DistanceMatrix: negative entry");
                if (at(i, j) != at(j, i)) throw std::invalid_argument("DistanceMatrix: not symmetric");
            }
        }
    }
};

/// Binary merge tree. Leaves carry labels; internal nodes carry the merge
/// height (the cluster distance at which their children merged).
struct ClusterNode {
    int left = -1;   // indices into ClusterTree::nodes, -1 for leaves
    int right = -1;
    double height = 0.0;
    std::string label; // leaves only
    bool is_leaf() const { return left < 0; }
};

struct ClusterTree {
    std::vector<ClusterNode> nodes;
    int root = -1;
};

/// Average-linkage (UPGMA) agglomeration. Ties on the minimum distance
/// resolve to the smallest (row, col) index pair, so the tree is
/// deterministic.
inline ClusterTree hierarchical_cluster(const DistanceMatrix& dist) {
    dist.validate();
    const std::size_t n = dist.size();

    ClusterTree tree;
    tree.nodes.reserve(2 * n - 1);
    struct Active {
        int node;
        std::size_t size;
    };
    std::vector<Active> active;
    for (std::size_t i = 0; i < n; ++i) {
        ClusterNode leaf;
        leaf.label = dist.labels[i];
        tree.nodes.push_back(leaf);
        active.push_back({static_cast<int>(i), 1});
    }

    // working copy of pairwise distances between active clusters
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[i][j] = dist.at(i, j);
    }

    while (active.size() > 1) {
        std::size_t bi = 0;
        std::size_t bj = 1;
        double best = d[0][1];
        for (std::size_t i = 0; i < active.size(); ++i) {
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                if (d[i][j] < best) {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }

        ClusterNode parent;
        parent.left = active[bi].node;
        parent.right = active[bj].node;
        parent.height = best;
        tree.nodes.push_back(parent);

        const std::size_t merged_size = active[bi].size + active[bj].size;
        std::vector<double> merged_row(active.size());
        for (std::size_t o = 0; o < active.size(); ++o) {
            if (o == bi || o == bj) continue;
            merged_row[o] = (static_cast<double>(active[bi].size) * d[bi][o] +
                             static_cast<double>(active[bj].size) * d[bj][o]) /
                            static_cast<double>(merged_size);
        }

        // replace cluster bi with the merge, drop bj
        active[bi] = {static_cast<int>(tree.nodes.size()) - 1, merged_size};
        for (std::size_t o = 0; o < active.size(); ++o) {
            d[bi][o] = merged_row[o];
            d[o][bi] = merged_row[o];
        }
        d[bi][bi] = 0.0;
        for (auto& row : d) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(bj));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    tree.root = active.front().node;
    return tree;
}

} // namespace entropy
