#include "sparsegof/tables.hpp"

#include <numeric>
#include <string>

#include "sparsegof/distributions.hpp"
#include "sparsegof/error.hpp"
#include "sparsegof/statistics.hpp"

namespace sparsegof {

namespace {

void check_config(const TestConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (!(cfg.h > 0.0 && cfg.h < 1.0)) throw InvalidH("h must lie in (0, 1)");
}

StatisticResult judge(const char* name, double value, int df, double threshold) {
    // Corrected statistics can be negative; they are compared as-is.
    const double p_value = chi_square_sf(std::max(value, 0.0), df);
    return StatisticResult{name, value, p_value, value > threshold ? Decision::reject : Decision::accept};
}

TestReport evaluate(const std::vector<std::int64_t>& counts, const std::vector<double>& null_probs,
                    std::int64_t estimated_params, const TestConfig& cfg) {
    check_config(cfg);
    if (counts.size() != null_probs.size()) {
        throw DomainError("counts and null probabilities differ in length");
    }
    const auto observed = ProbabilityPair::empirical(null_probs, counts);

    TestReport report;
    report.n = observed.n();
    report.categories = static_cast<std::int64_t>(counts.size());
    report.estimated_params = estimated_params;
    const std::int64_t df = report.categories - estimated_params - 1;
    if (estimated_params < 0 || df < 1) {
        throw DomainError("degrees of freedom R - s - 1 = " + std::to_string(df) + " must be >= 1");
    }
    report.df = static_cast<int>(df);
    report.alpha = cfg.alpha;
    report.lambda = cfg.lambda;
    report.threshold = chi_square_quantile(1.0 - cfg.alpha, report.df);

    const double q = pearson_q(observed);
    const double g = kullback_g(observed);
    const double rc = read_cressie(observed, cfg.lambda);

    const auto part = partition_zeros(counts);
    report.zeros = part.zeros();

    std::optional<CorrectedValue> q_ab;
    std::optional<CorrectedValue> g_ab;
    std::optional<OrderStats> os;
    if (part.zeros() > 0) {
        try {
            os = order_stats(counts, part);
        } catch (const UniformNonzero&) {
            report.correction_skipped = "uniform_nonzero";
        }
    }
    if (report.correction_skipped.empty()) {
        const auto params = choose_parameters(report.n, report.categories, part.zeros(), os,
                                              cfg.h, cfg.epsilon);
        const auto est = corrected_estimator(counts, part, params);
        q_ab = corrected_q(null_probs, counts, part, est);
        g_ab = corrected_g(null_probs, counts, part, est);
        report.correction = params;
    }

    report.statistics.push_back(judge(stat_names::q, q, report.df, report.threshold));
    report.statistics.push_back(judge(stat_names::g, g, report.df, report.threshold));
    report.statistics.push_back(judge(stat_names::rc, rc, report.df, report.threshold));
    if (q_ab) report.statistics.push_back(judge(stat_names::q_ab, q_ab->value(), report.df, report.threshold));
    if (g_ab) report.statistics.push_back(judge(stat_names::g_ab, g_ab->value(), report.df, report.threshold));
    report.statistics.push_back(
        judge(stat_names::ku, ku_corrected_g(g, part.zeros()), report.df, report.threshold));

    // Without a correction the classical pair stands in for the corrected one.
    const char* first = q_ab ? stat_names::q_ab : stat_names::q;
    const char* second = g_ab ? stat_names::g_ab : stat_names::g;
    const bool reject = report.at(first).decision == Decision::reject ||
                        report.at(second).decision == Decision::reject;
    report.combined = reject ? Decision::reject : Decision::accept;

    report.expected.resize(null_probs.size());
    for (std::size_t r = 0; r < null_probs.size(); ++r) {
        report.expected[r] = static_cast<double>(report.n) * null_probs[r];
    }
    report.sparsity = sparsity_diagnostics(report.expected);
    return report;
}

}  // namespace

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::int64_t> counts,
                                   std::vector<std::string> row_labels,
                                   std::vector<std::string> col_labels)
    : rows_(rows), cols_(cols), counts_(std::move(counts)), row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)) {
    if (counts_.size() != rows_ * cols_) throw DomainError("table: count vector does not match dimensions");
    for (auto v : counts_) {
        if (v < 0) throw DomainError("table: negative count");
    }
    if (row_labels_.empty()) {
        for (std::size_t i = 0; i < rows_; ++i) row_labels_.push_back("r" + std::to_string(i + 1));
    }
    if (col_labels_.empty()) {
        for (std::size_t j = 0; j < cols_; ++j) col_labels_.push_back("c" + std::to_string(j + 1));
    }
    if (row_labels_.size() != rows_ || col_labels_.size() != cols_) {
        throw DomainError("table: label count does not match dimensions");
    }
}

std::int64_t ContingencyTable::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::vector<std::int64_t> ContingencyTable::row_sums() const {
    std::vector<std::int64_t> sums(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) sums[i] += at(i, j);
    }
    return sums;
}

std::vector<std::int64_t> ContingencyTable::col_sums() const {
    std::vector<std::int64_t> sums(cols_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) sums[j] += at(i, j);
    }
    return sums;
}

const StatisticResult* TestReport::find(const std::string& name) const {
    for (const auto& s : statistics) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const StatisticResult& TestReport::at(const std::string& name) const {
    if (const auto* s = find(name)) return *s;
    throw Error("report has no statistic '" + name + "'");
}

ContingencyTable preprocess(const ContingencyTable& table) {
    if (table.total() < 1) throw DegenerateTable("table has no observations");
    const auto rs = table.row_sums();
    const auto cs = table.col_sums();
    std::vector<std::size_t> keep_rows;
    std::vector<std::size_t> keep_cols;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i] > 0) keep_rows.push_back(i);
    }
    for (std::size_t j = 0; j < cs.size(); ++j) {
        if (cs[j] > 0) keep_cols.push_back(j);
    }
    if (keep_rows.size() < 2 || keep_cols.size() < 2) {
        throw DegenerateTable("table reduces to " + std::to_string(keep_rows.size()) + "x" +
                              std::to_string(keep_cols.size()) + " after removing empty lines");
    }

    std::vector<std::int64_t> counts;
    counts.reserve(keep_rows.size() * keep_cols.size());
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    for (auto i : keep_rows) {
        row_labels.push_back(table.row_labels()[i]);
        for (auto j : keep_cols) counts.push_back(table.at(i, j));
    }
    for (auto j : keep_cols) col_labels.push_back(table.col_labels()[j]);
    return ContingencyTable(keep_rows.size(), keep_cols.size(), std::move(counts),
                            std::move(row_labels), std::move(col_labels));
}

IndependenceNull independence_null(const ContingencyTable& table) {
    const double n = static_cast<double>(table.total());
    if (!(n > 0.0)) throw DegenerateTable("table has no observations");
    const auto rs = table.row_sums();
    const auto cs = table.col_sums();
    IndependenceNull null;
    null.probs.reserve(table.rows() * table.cols());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            null.probs.push_back((static_cast<double>(rs[i]) / n) * (static_cast<double>(cs[j]) / n));
        }
    }
    null.estimated_params = static_cast<std::int64_t>(table.rows() - 1 + table.cols() - 1);
    return null;
}

SparsityDiagnostics sparsity_diagnostics(const std::vector<double>& expected) {
    SparsityDiagnostics d;
    for (double e : expected) {
        if (e < 0.5) ++d.below_half;
        if (e < 1.0) ++d.below_one;
        if (e < 5.0) ++d.below_five;
    }
    return d;
}

TestReport run_independence_test(const ContingencyTable& table, const TestConfig& cfg) {
    const auto clean = preprocess(table);
    const auto null = independence_null(clean);
    auto report = evaluate(clean.counts(), null.probs, null.estimated_params, cfg);
    report.row_labels = clean.row_labels();
    report.col_labels = clean.col_labels();
    return report;
}

TestReport run_gof_test(const std::vector<std::int64_t>& counts, const std::vector<double>& null_probs,
                        const TestConfig& cfg, std::int64_t estimated_params) {
    return evaluate(counts, null_probs, estimated_params, cfg);
}

const char* to_string(Decision d) { return d == Decision::reject ? "reject" : "accept"; }

}  // namespace sparsegof
