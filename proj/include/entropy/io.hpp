#pragma once

// External file formats and report serialization.
//
//   count file   one record per line, `label<TAB>count`, UTF-8, `#` starts
//                a comment line, no header, labels unique
//   joint file   `x<TAB>y<TAB>count`, (x, y) pairs unique
//   reports      a ReportDocument renders to JSON and to a section-tagged
//                CSV; both carry the full configuration echo so a rerun
//                reproduces the files byte for byte
//   trees        Newick text with ultrametric branch lengths (a node at
//                merge height h sits h/2 from its leaves)
//
// Numbers are printed in decimal with 12 significant digits, `.` radix,
// locale independent.

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entropy/information.hpp"

namespace entropy {

/// Malformed input file; carries the 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Decimal rendering with `digits` significant digits, locale independent.
inline std::string format_number(double value, int digits = 12) {
    std::array<char, 48> buffer{};
    auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                   std::chars_format::general, digits);
    if (ec != std::errc{}) return "nan";
    return std::string(buffer.data(), end);
}

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

inline std::uint64_t parse_count(const std::string& text, std::size_t line) {
    std::uint64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw parse_error(line, "expected a non-negative integer count, got '" + text + "'");
    }
    return value;
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace detail

/// Parse a count file: ordered (label, count) records.
inline std::vector<std::pair<std::string, std::uint64_t>> read_count_records(std::istream& in) {
    std::vector<std::pair<std::string, std::uint64_t>> records;
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 2 || fields[0].empty()) {
            throw parse_error(line_no, "expected 'label<TAB>count'");
        }
        if (!seen.emplace(fields[0], line_no).second) {
            throw parse_error(line_no, "duplicate label '" + fields[0] + "'");
        }
        records.emplace_back(fields[0], detail::parse_count(fields[1], line_no));
    }
    if (records.empty()) throw parse_error(line_no, "no records in count file");
    return records;
}

inline std::vector<std::pair<std::string, std::uint64_t>> read_count_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open count file '" + path + "'");
    return read_count_records(in);
}

/// Parse a joint count file into a table; row/column labels appear in
/// first-occurrence order.
inline JointCountTable read_joint_count_records(std::istream& in) {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::map<std::string, std::size_t> row_index;
    std::map<std::string, std::size_t> col_index;
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::uint64_t>> cells;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            throw parse_error(line_no, "expected 'x<TAB>y<TAB>count'");
        }
        const auto [rit, rnew] = row_index.emplace(fields[0], row_labels.size());
        if (rnew) row_labels.push_back(fields[0]);
        const auto [cit, cnew] = col_index.emplace(fields[1], col_labels.size());
        if (cnew) col_labels.push_back(fields[1]);
        const std::pair<std::size_t, std::size_t> key{rit->second, cit->second};
        if (!seen.emplace(key, line_no).second) {
            throw parse_error(line_no, "duplicate pair ('" + fields[0] + "', '" + fields[1] + "')");
        }
        cells.emplace_back(key, detail::parse_count(fields[2], line_no));
    }
    if (cells.empty()) throw parse_error(line_no, "no records in joint count file");

    std::vector<std::uint64_t> counts(row_labels.size() * col_labels.size(), 0);
    for (const auto& [key, count] : cells) {
        counts[key.first * col_labels.size() + key.second] = count;
    }
    return JointCountTable(row_labels.size(), col_labels.size(), std::move(counts), row_labels,
                           col_labels);
}

inline JointCountTable read_joint_count_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open joint count file '" + path + "'");
    return read_joint_count_records(in);
}

/// Newick rendering of a merge tree. Branch lengths are ultrametric:
/// a node that merged at height h is drawn h/2 above its leaves, so the
/// leaf-to-leaf path through a merge equals the merge height.
inline std::string to_newick(const ClusterTree& tree) {
    if (tree.root < 0) throw std::invalid_argument("to_newick: empty tree");

    std::function<std::string(int)> render = [&](int index) -> std::string {
        const ClusterNode& node = tree.nodes[static_cast<std::size_t>(index)];
        if (node.is_leaf()) return node.label;
        const ClusterNode& left = tree.nodes[static_cast<std::size_t>(node.left)];
        const ClusterNode& right = tree.nodes[static_cast<std::size_t>(node.right)];
        const double left_len = (node.height - (left.is_leaf() ? 0.0 : left.height)) / 2.0;
        const double right_len = (node.height - (right.is_leaf() ? 0.0 : right.height)) / 2.0;
        return "(" + render(node.left) + ":" + format_number(left_len) + "," + render(node.right) +
               ":" + format_number(right_len) + ")";
    };
    return render(tree.root) + ";";
}

/// Machine-readable experiment report: configuration echo plus metric,
/// significance, winner and sweep tables. JSON and CSV renderings carry
/// identical numeric values at 12 significant digits.
struct ReportDocument {
    std::string tool = "entropy";
    std::string version = "0.1.0";
    std::vector<std::pair<std::string, std::string>> config; // ordered echo of flags

    struct MetricsRow {
        std::uint64_t sample_size = 0;
        std::string estimator;
        double true_entropy = 0.0;
        double mean_estimate = 0.0;
        double bias = 0.0;
        double mab = 0.0;
        double mse = 0.0;
        double variance = 0.0;
        int beats_mab = 0;
        int beats_mse = 0;
        bool failed = false;
        std::string failure;
    };
    std::vector<MetricsRow> metrics;

    struct PairRow {
        std::string test; // "permutation" or "tukey"
        std::uint64_t sample_size = 0;
        std::string metric;
        std::string estimator_a;
        std::string estimator_b;
        double p_value = 1.0;
        std::string winner; // empty = tie
        bool significant = false;
    };
    std::vector<PairRow> pairs;

    struct WinnerTableRow {
        std::uint64_t sample_size = 0;
        std::string metric;
        std::string winner;
        int beats = 0;
        bool tie = false;
    };
    std::vector<WinnerTableRow> winners;

    struct SweepRow {
        std::uint64_t sample_size = 0;
        std::string estimator;
        double mean_estimate = 0.0;
        double true_entropy = 0.0;
    };
    std::vector<SweepRow> sweep;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["tool"] = tool;
        doc["version"] = version;
        nlohmann::ordered_json cfg;
        for (const auto& [key, value] : config) cfg[key] = value;
        doc["config"] = cfg;

        doc["metrics"] = nlohmann::ordered_json::array();
        for (const auto& row : metrics) {
            nlohmann::ordered_json j;
            j["N"] = row.sample_size;
            j["estimator"] = row.estimator;
            if (row.failed) {
                j["failed"] = true;
                j["error"] = row.failure;
            } else {
                j["true_entropy"] = format_number(row.true_entropy);
                j["mean_estimate"] = format_number(row.mean_estimate);
                j["bias"] = format_number(row.bias);
                j["mab"] = format_number(row.mab);
                j["mse"] = format_number(row.mse);
                j["variance"] = format_number(row.variance);
                j["tukey_beats_mab"] = row.beats_mab;
                j["tukey_beats_mse"] = row.beats_mse;
            }
            doc["metrics"].push_back(j);
        }

        doc["pairwise"] = nlohmann::ordered_json::array();
        for (const auto& row : pairs) {
            nlohmann::ordered_json j;
            j["test"] = row.test;
            j["N"] = row.sample_size;
            j["metric"] = row.metric;
            j["estimator_a"] = row.estimator_a;
            j["estimator_b"] = row.estimator_b;
            j["p_value"] = format_number(row.p_value);
            j["winner"] = row.winner;
            j["significant"] = row.significant;
            doc["pairwise"].push_back(j);
        }

        doc["winners"] = nlohmann::ordered_json::array();
        for (const auto& row : winners) {
            nlohmann::ordered_json j;
            j["N"] = row.sample_size;
            j["metric"] = row.metric;
            j["winner"] = row.winner;
            j["beats"] = row.beats;
            j["tie"] = row.tie;
            doc["winners"].push_back(j);
        }

        if (!sweep.empty()) {
            doc["sweep"] = nlohmann::ordered_json::array();
            for (const auto& row : sweep) {
                nlohmann::ordered_json j;
                j["N"] = row.sample_size;
                j["estimator"] = row.estimator;
                j["mean_estimate"] = format_number(row.mean_estimate);
                j["true_entropy"] = format_number(row.true_entropy);
                doc["sweep"].push_back(j);
            }
        }
        return doc;
    }

    std::string to_csv() const {
        std::ostringstream out;
        out << "# " << tool << " report, version " << version << "\n";
        for (const auto& [key, value] : config) out << "# config: " << key << "=" << value << "\n";

        out << "# section: metrics\n";
        out << "N,estimator,true_entropy,mean_estimate,bias,mab,mse,variance,tukey_beats_mab,"
               "tukey_beats_mse,failed\n";
        for (const auto& row : metrics) {
            if (row.failed) {
                out << row.sample_size << "," << row.estimator << ",,,,,,,,," << "failed:" << row.failure
                    << "\n";
                continue;
            }
            out << row.sample_size << "," << row.estimator << "," << format_number(row.true_entropy)
                << "," << format_number(row.mean_estimate) << "," << format_number(row.bias) << ","
                << format_number(row.mab) << "," << format_number(row.mse) << ","
                << format_number(row.variance) << "," << row.beats_mab << "," << row.beats_mse
                << ",\n";
        }

        out << "# section: pairwise\n";
        out << "test,N,metric,estimator_a,estimator_b,p_value,winner,significant\n";
        for (const auto& row : pairs) {
            out << row.test << "," << row.sample_size << "," << row.metric << "," << row.estimator_a
                << "," << row.estimator_b << "," << format_number(row.p_value) << "," << row.winner
                << "," << (row.significant ? 1 : 0) << "\n";
        }

        out << "# section: winners\n";
        out << "N,metric,winner,beats,tie\n";
        for (const auto& row : winners) {
            out << row.sample_size << "," << row.metric << "," << row.winner << "," << row.beats << ","
                << (row.tie ? 1 : 0) << "\n";
        }

        if (!sweep.empty()) {
            out << "# section: sweep\n";
            out << "N,estimator,mean_estimate,true_entropy\n";
            for (const auto& row : sweep) {
                out << row.sample_size << "," << row.estimator << "," << format_number(row.mean_estimate)
                    << "," << format_number(row.true_entropy) << "\n";
            }
        }
        return out.str();
    }
};

} // namespace entropy
