#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsegof/correction.hpp"

namespace sparsegof {

/// Two-way table of nonnegative counts, stored row-major.
class ContingencyTable {
public:
    ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::int64_t> counts,
                     std::vector<std::string> row_labels = {},
                     std::vector<std::string> col_labels = {});

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::int64_t at(std::size_t i, std::size_t j) const { return counts_[i * cols_ + j]; }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }

    std::int64_t total() const;
    std::vector<std::int64_t> row_sums() const;
    std::vector<std::int64_t> col_sums() const;

    bool operator==(const ContingencyTable&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::int64_t> counts_;
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
};

struct IndependenceNull {
    std::vector<double> probs;  // row-major p_{i+} p_{+j}
    std::int64_t estimated_params;
};

struct SparsityDiagnostics {
    std::int64_t below_half = 0;
    std::int64_t below_one = 0;
    std::int64_t below_five = 0;
};

enum class Decision { accept, reject };

struct StatisticResult {
    std::string name;
    double value;
    double p_value;
    Decision decision;
};

/// Statistic keys used in reports.
namespace stat_names {
inline constexpr const char* q = "q";
inline constexpr const char* g = "g";
inline constexpr const char* rc = "rc";
inline constexpr const char* q_ab = "q_ab";
inline constexpr const char* g_ab = "g_ab";
inline constexpr const char* ku = "ku_g";
}  // namespace stat_names

struct TestConfig {
    double alpha = 0.05;
    double h = 0.1;
    double lambda = 2.0 / 3.0;
    EpsilonPolicy epsilon;
};

struct TestReport {
    std::int64_t n = 0;
    std::int64_t categories = 0;
    std::int64_t estimated_params = 0;
    int df = 1;
    double alpha = 0.05;
    double lambda = 2.0 / 3.0;
    double threshold = 0.0;

    /// q, g, rc, then q_ab and g_ab when the correction applies, then ku_g.
    std::vector<StatisticResult> statistics;
    Decision combined = Decision::accept;

    std::int64_t zeros = 0;
    SparsityDiagnostics sparsity;
    std::optional<CorrectionParams> correction;
    /// Empty when the correction applies; otherwise the reason ("uniform_nonzero").
    std::string correction_skipped;
    std::vector<double> expected;

    /// Row-major layout of the flattened cells; empty for plain vectors.
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;

    const StatisticResult* find(const std::string& name) const;
    const StatisticResult& at(const std::string& name) const;
};

/// Drop all-zero rows and columns. Throws DegenerateTable if fewer than two
/// of either remain.
ContingencyTable preprocess(const ContingencyTable& table);

/// MLE of the independence model; s = (I - 1) + (J - 1).
IndependenceNull independence_null(const ContingencyTable& table);

SparsityDiagnostics sparsity_diagnostics(const std::vector<double>& expected);

/// Full independence test of a raw two-way table.
TestReport run_independence_test(const ContingencyTable& table, const TestConfig& cfg = {});

/// Goodness-of-fit test against a fully specified null. estimated_params
/// lowers df when the null was fitted externally.
TestReport run_gof_test(const std::vector<std::int64_t>& counts, const std::vector<double>& null_probs,
                        const TestConfig& cfg = {}, std::int64_t estimated_params = 0);

const char* to_string(Decision d);

}  // namespace sparsegof
