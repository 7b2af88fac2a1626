// Command-line front end: entropy estimation on count files, seeded
// simulation experiments with significance tables, mutual-information
// reports over joint count files, and hierarchical clustering.
//
// Exit codes: 0 success, 2 usage or malformed input, 3 estimator
// precondition failure, 4 partial failure (some table rows failed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entropy/entropy.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kLn2 = 0.6931471805599453094;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "both"; // csv|json|both
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<entropy::EstimatorId> parse_estimators(const std::vector<std::string>& names,
                                                   double ww_alpha) {
    if (names.empty()) return entropy::EstimatorId::all(ww_alpha);
    std::vector<entropy::EstimatorId> ids;
    for (const auto& name : names) {
        for (const auto& part : split_list(name)) {
            ids.push_back(entropy::EstimatorId::parse(part, ww_alpha));
        }
    }
    return ids;
}

entropy::NsbWeighting parse_nsb_mode(const std::string& mode) {
    if (mode == "evidence") return entropy::NsbWeighting::posterior;
    if (mode == "prior") return entropy::NsbWeighting::hyperprior;
    throw CLI::ValidationError("--nsb-mode", "expected 'evidence' or 'prior'");
}

entropy::SupportPolicy parse_support_policy(const std::string& text) {
    if (text == "declared") return entropy::SupportPolicy::declared;
    if (text == "observed") return entropy::SupportPolicy::observed;
    if (text == "auto") return entropy::SupportPolicy::automatic;
    throw CLI::ValidationError("--support-policy", "expected 'declared', 'observed' or 'auto'");
}

entropy::NmiNormalizer parse_normalizer(const std::string& text) {
    if (text == "min") return entropy::NmiNormalizer::min_marginal;
    if (text == "max") return entropy::NmiNormalizer::max_marginal;
    if (text == "sqrt") return entropy::NmiNormalizer::geometric_mean;
    throw CLI::ValidationError("--nmi-normalizer", "expected 'min', 'max' or 'sqrt'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

void emit_report(const entropy::ReportDocument& doc, const GlobalOptions& global) {
    const std::string csv = doc.to_csv();
    const std::string json = doc.to_json().dump(2) + "\n";
    if (global.output.empty()) {
        std::cout << (global.format == "json" ? json : csv);
        return;
    }
    if (global.format == "csv" || global.format == "both") write_text(global.output + ".csv", csv);
    if (global.format == "json" || global.format == "both") write_text(global.output + ".json", json);
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
    std::string counts_path;
    std::vector<std::string> estimators;
    double ww_alpha = 1.0;
    std::uint64_t support_override = 0;
    std::string nsb_mode = "evidence";
    bool bits = false;
    bool jack_clamp = false;
};

int run_estimate(const EstimateOptions& opt) {
    const auto records = entropy::read_count_file(opt.counts_path);

    entropy::Histogram hist;
    hist.counts.reserve(records.size());
    for (const auto& [label, count] : records) hist.counts.push_back(count);
    hist.support_size = std::max<std::size_t>(hist.observed_classes(), 1);
    if (opt.support_override > 0) hist.support_size = opt.support_override;

    const auto ids = parse_estimators(opt.estimators, opt.ww_alpha);
    const auto weighting = parse_nsb_mode(opt.nsb_mode);

    for (const auto& id : ids) {
        const auto est = id.kind == entropy::EstimatorKind::jackknife
                             ? entropy::estimate_jackknife(hist, opt.jack_clamp)
                             : entropy::estimate(hist, id, {}, weighting);
        std::cout << id.name() << "\t" << est.sample_size << "\t" << est.support_size << "\t"
                  << entropy::format_number(est.value);
        if (opt.bits) std::cout << "\t" << entropy::format_number(est.value / kLn2);
        std::cout << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string family;
    std::uint64_t k = 0;
    double exponent = 1.0;
    double dirichlet_alpha = 1.0;
    std::string counts_path;
    std::uint64_t truncate = 0;
    std::vector<std::uint64_t> sizes;
    std::uint64_t trials = 100;
    std::vector<std::string> estimators;
    double ww_alpha = 1.0;
    std::uint64_t permutations = 1000;
    double significance = 0.05;
    std::string support_policy = "auto";
    std::string nsb_mode = "evidence";
    bool fig1 = false;
    std::uint64_t fig1_points_per_decade = 5;
    std::uint64_t fig1_min_n = 100;
};

entropy::TruthSource make_truth(const SimulateOptions& opt, std::string& truth_echo) {
    if (opt.family == "zipf") {
        if (opt.k < 1) throw CLI::ValidationError("--k", "zipf needs --k >= 1");
        truth_echo =
            "zipf(K=" + std::to_string(opt.k) + ",s=" + entropy::format_number(opt.exponent) + ")";
        return entropy::TruthSource::fixed(entropy::zipfian(opt.k, opt.exponent));
    }
    if (opt.family == "dirichlet") {
        if (opt.k < 1) throw CLI::ValidationError("--k", "dirichlet needs --k >= 1");
        truth_echo = "dirichlet(K=" + std::to_string(opt.k) +
                     ",alpha=" + entropy::format_number(opt.dirichlet_alpha) + ")";
        return entropy::TruthSource::dirichlet(opt.k, opt.dirichlet_alpha);
    }
    if (opt.family == "empirical") {
        if (opt.counts_path.empty()) {
            throw CLI::ValidationError("--counts", "empirical needs a count file");
        }
        auto records = entropy::read_count_file(opt.counts_path);
        if (opt.truncate > 0 && opt.truncate < records.size()) {
            std::stable_sort(records.begin(), records.end(),
                             [](const auto& a, const auto& b) { return a.second > b.second; });
            records.resize(opt.truncate);
        }
        truth_echo = "empirical(" + opt.counts_path + ",truncate=" + std::to_string(opt.truncate) + ")";
        return entropy::TruthSource::fixed(entropy::from_counts(records));
    }
    throw CLI::ValidationError("--family", "expected 'zipf', 'dirichlet' or 'empirical'");
}

int run_simulate(const SimulateOptions& opt, const GlobalOptions& global) {
    if (opt.trials < 2) throw CLI::ValidationError("--trials", "needs at least 2 trials");
    for (std::uint64_t n : opt.sizes) {
        if (n < 1) throw CLI::ValidationError("--sizes", "sample sizes must be >= 1");
    }
    if (opt.permutations < 1) throw CLI::ValidationError("--permutations", "needs >= 1");

    std::string truth_echo;
    const auto truth = make_truth(opt, truth_echo);
    const auto ids = parse_estimators(opt.estimators, opt.ww_alpha);

    entropy::ExperimentConfig config;
    config.truth = truth;
    config.sample_sizes = opt.sizes;
    config.trials = opt.trials;
    config.estimators = ids;
    config.base_seed = entropy::RandomSeed{global.seed};
    config.permutations = opt.permutations;
    config.support = parse_support_policy(opt.support_policy);
    config.nsb_weighting = parse_nsb_mode(opt.nsb_mode);

    if (opt.fig1) {
        // dense N grid between fig1-min-n and the largest requested size
        const std::uint64_t max_n = *std::max_element(opt.sizes.begin(), opt.sizes.end());
        std::vector<std::uint64_t> grid;
        const double start = std::log10(static_cast<double>(std::max<std::uint64_t>(opt.fig1_min_n, 1)));
        for (double e = start;; e += 1.0 / static_cast<double>(opt.fig1_points_per_decade)) {
            const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, e)));
            if (n > max_n) break;
            if (grid.empty() || n > grid.back()) grid.push_back(n);
        }
        if (grid.empty() || grid.back() < max_n) grid.push_back(max_n);
        config.sample_sizes = grid;
    }
    config.validate();

    entropy::ReportDocument doc;
    doc.version = kVersion;
    doc.config = {
        {"command", "simulate"},
        {"truth", truth_echo},
        {"sizes",
         [&] {
             std::string s;
             for (auto n : config.sample_sizes) s += (s.empty() ? "" : " ") + std::to_string(n);
             return s;
         }()},
        {"trials", std::to_string(opt.trials)},
        {"estimators",
         [&] {
             std::string s;
             for (const auto& id : ids) s += (s.empty() ? "" : " ") + id.name();
             return s;
         }()},
        {"ww_alpha", entropy::format_number(opt.ww_alpha)},
        {"seed", std::to_string(global.seed)},
        {"permutations", std::to_string(opt.permutations)},
        {"significance", entropy::format_number(opt.significance)},
        {"support_policy", opt.support_policy},
        {"nsb_mode", opt.nsb_mode},
        {"fig1", opt.fig1 ? "1" : "0"},
    };

    bool partial_failure = false;

    // Truth entropy for the echo columns; per-trial dirichlet truths get
    // the mean over the trial draws.
    auto truth_entropy_for = [&](std::uint64_t n) {
        if (!config.truth.per_trial()) {
            return entropy::true_entropy(config.truth.realize(entropy::RandomSeed{0}));
        }
        entropy::detail::NeumaierSum acc;
        for (std::size_t t = 0; t < config.trials; ++t) {
            acc.add(entropy::true_entropy(
                config.truth.realize(entropy::truth_seed(config.base_seed, n, t))));
        }
        return acc.value() / static_cast<double>(config.trials);
    };

    std::vector<entropy::TrialReport> all_reports;
    for (std::uint64_t n : config.sample_sizes) {
        entropy::ExperimentConfig one = config;
        one.sample_sizes = {n};
        try {
            auto reports = run_experiment(one);
            for (auto& r : reports) all_reports.push_back(std::move(r));
        } catch (const std::exception&) {
            // isolate the failing estimator, keep the others
            for (const auto& id : ids) {
                entropy::ExperimentConfig solo = one;
                solo.estimators = {id};
                try {
                    auto reports = run_experiment(solo);
                    all_reports.push_back(std::move(reports.front()));
                } catch (const std::exception& ex) {
                    partial_failure = true;
                    entropy::ReportDocument::MetricsRow row;
                    row.sample_size = n;
                    row.estimator = id.name();
                    row.failed = true;
                    row.failure = ex.what();
                    doc.metrics.push_back(row);
                }
            }
        }
    }

    if (opt.fig1) {
        for (const auto& report : all_reports) {
            entropy::ReportDocument::SweepRow row;
            row.sample_size = report.sample_size;
            row.estimator = report.estimator.name();
            const double ht = truth_entropy_for(report.sample_size);
            row.true_entropy = ht;
            entropy::detail::NeumaierSum mean;
            for (double e : report.errors) mean.add(e);
            row.mean_estimate = ht + mean.value() / static_cast<double>(report.errors.size());
            doc.sweep.push_back(row);
        }
    }

    // group per N for the metric and pairwise tables
    std::map<std::uint64_t, std::vector<const entropy::TrialReport*>> by_n;
    for (const auto& r : all_reports) by_n[r.sample_size].push_back(&r);

    for (const auto& [n, group] : by_n) {
        std::vector<entropy::TrialReport> reports;
        reports.reserve(group.size());
        for (const auto* r : group) reports.push_back(*r);

        entropy::TukeyResult tukey_mab;
        entropy::TukeyResult tukey_mse;
        const bool comparable = reports.size() >= 2;
        if (comparable) {
            tukey_mab = tukey_all_pairs(reports, entropy::Metric::mab, opt.significance);
            tukey_mse = tukey_all_pairs(reports, entropy::Metric::mse, opt.significance);
            for (auto metric : {entropy::Metric::mab, entropy::Metric::mse}) {
                const auto& tk = metric == entropy::Metric::mab ? tukey_mab : tukey_mse;
                for (const auto& pair : tk.pairs) {
                    entropy::ReportDocument::PairRow row;
                    row.test = "tukey";
                    row.sample_size = n;
                    row.metric = entropy::metric_name(metric);
                    row.estimator_a = pair.estimator_a.name();
                    row.estimator_b = pair.estimator_b.name();
                    row.p_value = pair.p_value;
                    row.winner = pair.winner ? pair.winner->name() : "";
                    row.significant = pair.significant;
                    doc.pairs.push_back(row);
                }
                for (std::size_t i = 0; i < reports.size(); ++i) {
                    for (std::size_t j = i + 1; j < reports.size(); ++j) {
                        const auto seed = entropy::derive_seed(
                            config.base_seed, {0xFE, n, static_cast<std::uint64_t>(i * 131 + j),
                                               metric == entropy::Metric::mab ? 0ULL : 1ULL});
                        const auto cmp = paired_permutation_test(
                            reports[i].errors, reports[j].errors, metric, config.permutations, seed,
                            reports[i].estimator, reports[j].estimator);
                        entropy::ReportDocument::PairRow row;
                        row.test = "permutation";
                        row.sample_size = n;
                        row.metric = entropy::metric_name(metric);
                        row.estimator_a = cmp.estimator_a.name();
                        row.estimator_b = cmp.estimator_b.name();
                        row.p_value = cmp.p_value;
                        row.winner = cmp.winner ? cmp.winner->name() : "";
                        row.significant = cmp.p_value < opt.significance;
                        doc.pairs.push_back(row);
                    }
                }
            }
        }

        const double ht = truth_entropy_for(n);
        for (std::size_t i = 0; i < reports.size(); ++i) {
            entropy::ReportDocument::MetricsRow row;
            row.sample_size = n;
            row.estimator = reports[i].estimator.name();
            row.true_entropy = ht;
            entropy::detail::NeumaierSum mean;
            for (double e : reports[i].errors) mean.add(e);
            row.mean_estimate = ht + mean.value() / static_cast<double>(reports[i].errors.size());
            row.bias = reports[i].bias;
            row.mab = reports[i].mab;
            row.mse = reports[i].mse;
            row.variance = reports[i].variance;
            row.beats_mab = comparable ? tukey_mab.beat_count[i] : 0;
            row.beats_mse = comparable ? tukey_mse.beat_count[i] : 0;
            doc.metrics.push_back(row);
        }

        for (auto metric : {entropy::Metric::mab, entropy::Metric::mse}) {
            std::map<std::uint64_t, entropy::TukeyResult> scoped;
            if (comparable) {
                scoped.emplace(n, metric == entropy::Metric::mab ? tukey_mab : tukey_mse);
            }
            for (const auto& row : best_estimator_table(reports, metric, scoped)) {
                entropy::ReportDocument::WinnerTableRow w;
                w.sample_size = row.sample_size;
                w.metric = entropy::metric_name(metric);
                w.winner = row.winner.name();
                w.beats = row.beats;
                w.tie = row.tie;
                doc.winners.push_back(w);
            }
        }
    }

    emit_report(doc, global);
    return partial_failure ? 4 : 0;
}

// ---------------------------------------------------------------- mi

struct MiOptions {
    std::string joint_path;
    std::vector<std::string> estimators;
    double ww_alpha = 1.0;
    std::uint64_t permutations = 1000;
    std::string normalizer = "min";
    std::string nsb_mode = "evidence";
};

int run_mi(const MiOptions& opt, const GlobalOptions& global) {
    const auto table = entropy::read_joint_count_file(opt.joint_path);
    const auto ids = parse_estimators(opt.estimators, opt.ww_alpha);
    const auto weighting = parse_nsb_mode(opt.nsb_mode);
    const auto normalizer = parse_normalizer(opt.normalizer);

    std::ostringstream out;
    out << "estimator\tMI\tNMI\tVI\tp_value\n";
    for (const auto& id : ids) {
        auto result = estimate_mi(table, id, {}, weighting);
        result = normalized_mi(result, table, normalizer, {}, weighting);
        const double vi = variation_of_information(table, id, {}, weighting);
        double p = 0.0;
        if (opt.permutations > 0) {
            p = mi_permutation_significance(table, id, opt.permutations,
                                            entropy::RandomSeed{global.seed}, {}, weighting);
        }
        out << id.name() << "\t" << entropy::format_number(result.mi) << "\t"
            << entropy::format_number(*result.nmi) << "\t" << entropy::format_number(vi) << "\t"
            << (opt.permutations > 0 ? entropy::format_number(p) : "-")
            << (result.nmi_clamped ? "\t[clamped]" : "");
        if (result.jackknife_fallbacks > 0) {
            out << "\t[jack-mle-fallback:" << result.jackknife_fallbacks << "]";
        }
        out << "\n";
    }

    if (global.output.empty()) {
        std::cout << out.str();
    } else {
        write_text(global.output, out.str());
    }
    return 0;
}

// ---------------------------------------------------------------- cluster

struct ClusterOptions {
    std::string matrix_path;
    std::string pairs_path;
    std::string distance = "vi"; // vi | nmi
    std::string estimator = "mle";
    double ww_alpha = 1.0;
    std::string nsb_mode = "evidence";
    std::string nmi_normalizer = "min";
};

entropy::DistanceMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    entropy::DistanceMatrix m;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream stream(line);
        std::string field;
        while (std::getline(stream, field, '\t')) fields.push_back(field);
        if (m.labels.empty()) {
            m.labels = fields;
            if (m.labels.size() < 2) throw entropy::parse_error(line_no, "need at least two labels");
            continue;
        }
        if (fields.size() != m.labels.size() + 1) {
            throw entropy::parse_error(
                line_no, "expected label + " + std::to_string(m.labels.size()) + " values");
        }
        for (std::size_t i = 1; i < fields.size(); ++i) {
            try {
                m.values.push_back(std::stod(fields[i]));
            } catch (const std::exception&) {
                throw entropy::parse_error(line_no, "bad number '" + fields[i] + "'");
            }
        }
    }
    if (m.values.size() != m.labels.size() * m.labels.size()) {
        throw entropy::parse_error(line_no, "matrix rows do not match the header");
    }
    m.validate();
    return m;
}

int run_cluster(const ClusterOptions& opt, const GlobalOptions& global) {
    entropy::DistanceMatrix matrix;
    if (!opt.matrix_path.empty()) {
        matrix = read_matrix_file(opt.matrix_path);
    } else if (!opt.pairs_path.empty()) {
        // pairs file: item_a<TAB>item_b<TAB>joint-count-file per line
        std::ifstream in(opt.pairs_path);
        if (!in) throw std::runtime_error("cannot open pairs file '" + opt.pairs_path + "'");
        const auto id = entropy::EstimatorId::parse(opt.estimator, opt.ww_alpha);
        const auto weighting = parse_nsb_mode(opt.nsb_mode);
        const auto normalizer = parse_normalizer(opt.nmi_normalizer);

        std::vector<std::string> labels;
        std::map<std::string, std::size_t> index;
        std::map<std::pair<std::size_t, std::size_t>, double> distances;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            std::vector<std::string> fields;
            std::stringstream stream(line);
            std::string field;
            while (std::getline(stream, field, '\t')) fields.push_back(field);
            if (fields.size() != 3) {
                throw entropy::parse_error(line_no, "expected 'a<TAB>b<TAB>joint-file'");
            }
            for (const auto& name : {fields[0], fields[1]}) {
                if (index.emplace(name, labels.size()).second) labels.push_back(name);
            }
            const auto table = entropy::read_joint_count_file(fields[2]);
            double d = 0.0;
            if (opt.distance == "vi") {
                d = variation_of_information(table, id, {}, weighting);
            } else {
                const auto result = normalized_mi(estimate_mi(table, id, {}, weighting), table,
                                                  normalizer, {}, weighting);
                d = 1.0 - *result.nmi;
            }
            distances[{index[fields[0]], index[fields[1]]}] = d;
        }

        const std::size_t n = labels.size();
        matrix.labels = labels;
        matrix.values.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto it_ij = distances.find({i, j});
                const auto it_ji = distances.find({j, i});
                if (it_ij == distances.end() && it_ji == distances.end()) {
                    throw std::runtime_error("pairs file misses the pair (" + labels[i] + ", " +
                                             labels[j] + ")");
                }
                const double d = it_ij != distances.end() ? it_ij->second : it_ji->second;
                matrix.values[i * n + j] = d;
                matrix.values[j * n + i] = d;
            }
        }
        matrix.validate();
    } else {
        throw CLI::ValidationError("cluster", "needs --matrix or --pairs");
    }

    const auto tree = hierarchical_cluster(matrix);
    const std::string newick = entropy::to_newick(tree) + "\n";
    if (global.output.empty()) {
        std::cout << newick;
    } else {
        write_text(global.output, newick);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shannon entropy estimation for discrete distributions"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "base seed for every random draw");
    app.add_option("--output", global.output, "output path (base path for simulate)");
    app.add_option("--format", global.format, "report format: csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    EstimateOptions est;
    auto* cmd_estimate = app.add_subcommand("estimate", "estimate entropy of a count file");
    cmd_estimate->fallthrough();
    cmd_estimate->add_option("--counts", est.counts_path, "tab-separated label/count file")->required();
    cmd_estimate->add_option("--estimator", est.estimators,
                             "estimator name (repeatable or comma separated; default all)");
    cmd_estimate->add_option("--alpha", est.ww_alpha, "Wolpert-Wolf concentration");
    cmd_estimate->add_option("--support", est.support_override,
                             "declared support size K (default: observed classes)");
    cmd_estimate->add_option("--nsb-mode", est.nsb_mode, "NSB alpha weighting: evidence|prior")
        ->check(CLI::IsMember({"evidence", "prior"}));
    cmd_estimate->add_flag("--bits", est.bits, "also print the estimate in bits");
    cmd_estimate->add_flag("--jack-clamp", est.jack_clamp,
                           "clamp jackknife values onto [0, ln K] (off by default)");

    SimulateOptions sim;
    auto* cmd_simulate = app.add_subcommand("simulate", "seeded estimator comparison experiment");
    cmd_simulate->fallthrough();
    cmd_simulate->add_option("--family", sim.family, "truth family: zipf|dirichlet|empirical")
        ->required();
    cmd_simulate->add_option("--k,--K", sim.k, "number of classes for zipf/dirichlet");
    cmd_simulate->add_option("--exponent", sim.exponent, "zipf exponent (default 1)");
    cmd_simulate->add_option("--alpha", sim.dirichlet_alpha, "dirichlet concentration (default 1)");
    cmd_simulate->add_option("--counts", sim.counts_path, "count file for the empirical family");
    cmd_simulate->add_option("--truncate", sim.truncate, "keep only the top-M classes by count");
    cmd_simulate->add_option("--sizes", sim.sizes, "sample sizes N (comma separated)")
        ->required()
        ->delimiter(',');
    cmd_simulate->add_option("--trials", sim.trials, "trials per (distribution, N); >= 2");
    cmd_simulate->add_option("--estimators", sim.estimators,
                             "estimators to compare (default all seven)");
    cmd_simulate->add_option("--ww-alpha", sim.ww_alpha, "Wolpert-Wolf concentration");
    cmd_simulate->add_option("--permutations", sim.permutations, "permutation test count");
    cmd_simulate->add_option("--significance", sim.significance, "Tukey significance level");
    cmd_simulate->add_option("--support-policy", sim.support_policy,
                             "support fed to MM/WW/NSB: declared|observed|auto")
        ->check(CLI::IsMember({"declared", "observed", "auto"}));
    cmd_simulate->add_option("--nsb-mode", sim.nsb_mode, "NSB alpha weighting: evidence|prior")
        ->check(CLI::IsMember({"evidence", "prior"}));
    cmd_simulate->add_flag("--fig1", sim.fig1, "dense-N sweep emitting mean estimates per N");
    cmd_simulate->add_option("--fig1-points-per-decade", sim.fig1_points_per_decade,
                             "grid density for --fig1");
    cmd_simulate->add_option("--fig1-min-n", sim.fig1_min_n, "grid start for --fig1");

    MiOptions mi;
    auto* cmd_mi = app.add_subcommand("mi", "mutual information report over a joint count file");
    cmd_mi->fallthrough();
    cmd_mi->add_option("--joint", mi.joint_path, "tab-separated x/y/count file")->required();
    cmd_mi->add_option("--estimator", mi.estimators,
                       "estimator name (repeatable or comma separated; default all)");
    cmd_mi->add_option("--alpha", mi.ww_alpha, "Wolpert-Wolf concentration");
    cmd_mi->add_option("--permutations", mi.permutations, "permutation count (0 = skip p-values)");
    cmd_mi->add_option("--nmi-normalizer", mi.normalizer, "NMI normalizer: min|max|sqrt")
        ->check(CLI::IsMember({"min", "max", "sqrt"}));
    cmd_mi->add_option("--nsb-mode", mi.nsb_mode, "NSB alpha weighting: evidence|prior")
        ->check(CLI::IsMember({"evidence", "prior"}));

    ClusterOptions cl;
    auto* cmd_cluster = app.add_subcommand("cluster", "average-linkage tree in Newick text");
    cmd_cluster->fallthrough();
    cmd_cluster->add_option("--matrix", cl.matrix_path, "distance matrix file (TSV, header row)");
    cmd_cluster->add_option("--pairs", cl.pairs_path, "pairs file: a<TAB>b<TAB>joint-count-file");
    cmd_cluster->add_option("--distance", cl.distance, "pairwise distance: vi|nmi")
        ->check(CLI::IsMember({"vi", "nmi"}));
    cmd_cluster->add_option("--estimator", cl.estimator, "estimator for --pairs distances");
    cmd_cluster->add_option("--alpha", cl.ww_alpha, "Wolpert-Wolf concentration");
    cmd_cluster->add_option("--nsb-mode", cl.nsb_mode, "NSB alpha weighting: evidence|prior")
        ->check(CLI::IsMember({"evidence", "prior"}));
    cmd_cluster->add_option("--nmi-normalizer", cl.nmi_normalizer, "NMI normalizer for --distance nmi")
        ->check(CLI::IsMember({"min", "max", "sqrt"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help / --version
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (*cmd_estimate) return run_estimate(est);
        if (*cmd_simulate) return run_simulate(sim, global);
        if (*cmd_mi) return run_mi(mi, global);
        if (*cmd_cluster) return run_cluster(cl, global);
    } catch (const entropy::parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const entropy::quadrature_error& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
