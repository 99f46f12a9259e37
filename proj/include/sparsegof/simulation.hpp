#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsegof/correction.hpp"

namespace sparsegof {

/// The four sparse reference distributions over 100 cells: a run of cells at
/// 0.0002 followed by equal cells carrying the remaining mass.
enum class ReferenceDistribution { f1, f2, f3, f4 };

std::vector<double> table1_distribution(ReferenceDistribution which);

/// Move 1/300 of mass from cells 91-100 onto cells 1-10.
std::vector<double> perturb(const std::vector<double>& f);

/// Statistics tracked per replicate, in report order.
enum class SimStatistic { q, g, rc, q_ab, g_ab };
inline constexpr std::array<SimStatistic, 5> kSimStatistics = {
    SimStatistic::q, SimStatistic::g, SimStatistic::rc, SimStatistic::q_ab, SimStatistic::g_ab};
const char* to_string(SimStatistic s);
inline bool is_corrected(SimStatistic s) { return s == SimStatistic::q_ab || s == SimStatistic::g_ab; }

struct SimConfig {
    std::vector<double> sampling_probs;
    std::vector<double> null_probs;
    std::int64_t n = 400;
    std::int64_t reps = 1000;
    std::vector<double> alphas = {0.01, 0.05, 0.1};
    std::uint64_t seed = 20100401;
    double h = 0.1;
    double lambda = 2.0 / 3.0;
    EpsilonPolicy epsilon;
    /// 0 picks the hardware concurrency. Never affects results.
    unsigned workers = 0;
};

struct ReplicateRecord {
    std::int64_t replicate = 0;
    std::int64_t zeros = 0;
    double q = 0.0;
    double g = 0.0;
    double rc = 0.0;
    std::optional<double> q_ab;
    std::optional<double> g_ab;
    /// Empty when applicable, else "uniform_nonzero" or "empty_interval".
    std::string skipped;

    bool applicable() const { return skipped.empty(); }
    std::optional<double> value(SimStatistic s) const;
};

struct QuantileRow {
    std::int64_t zeros = 0;
    std::int64_t count = 0;
    std::int64_t corrected_count = 0;
    bool low_count = false;
    /// Indexed like kSimStatistics; empty for corrected statistics when no
    /// replicate in the group admitted the correction.
    std::array<std::optional<double>, 5> quantile;
};

struct RejectionRow {
    double alpha = 0.05;
    double threshold = 0.0;
    std::array<double, 5> rate{};
};

struct SimulationReport {
    std::int64_t categories = 0;
    std::int64_t n = 0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    int df = 1;
    std::vector<ReplicateRecord> records;
    std::vector<QuantileRow> quantiles_by_c;
    std::vector<RejectionRow> rejection_rates;
    std::int64_t mode_c = 0;
    double threshold_line = 0.0;
    std::int64_t excluded = 0;
    std::int64_t excluded_uniform = 0;
    std::int64_t excluded_empty_interval = 0;
};

/// Groups below this size are flagged as resting on too few replicates.
inline constexpr std::int64_t kLowCountGroup = 5;

/// Order statistic at 1-based rank ceil(level * m) of the sorted sample.
double empirical_quantile(std::vector<double> values, double level);

/// Per-zero-count (1 - alpha) quantiles, groups in increasing c.
std::vector<QuantileRow> quantile_by_c(const std::vector<ReplicateRecord>& records, double alpha);

/// Statistics of one count vector against a fully specified null.
ReplicateRecord evaluate_replicate(std::int64_t index, const std::vector<std::int64_t>& counts,
                                   const std::vector<double>& null_probs, double h, double lambda,
                                   const EpsilonPolicy& epsilon);

/// Replicate i draws from substream i of cfg.seed, so the report is the same
/// for every worker count.
SimulationReport run_simulation(const SimConfig& cfg);

struct ZeroDecayPoint {
    std::int64_t n;
    double fraction_with_zero;
};

/// Fraction of replicates of M(n; p0) with at least one empty cell, per n.
std::vector<ZeroDecayPoint> zero_count_decay(const std::vector<double>& p0,
                                             const std::vector<std::int64_t>& n_grid,
                                             std::int64_t reps, std::uint64_t seed,
                                             unsigned workers = 0);

}  // namespace sparsegof
