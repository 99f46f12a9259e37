#include "sparsegof/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "sparsegof/distributions.hpp"
#include "sparsegof/error.hpp"
#include "sparsegof/statistics.hpp"

namespace sparsegof {

namespace {

constexpr std::size_t kReferenceSize = 100;
constexpr double kRareMass = 0.0002;

void check_probability_vector(const std::vector<double>& p, const char* what) {
    if (p.empty()) throw DomainError(std::string(what) + ": empty probability vector");
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw DomainError(std::string(what) + ": negative component");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw DomainError(std::string(what) + ": components sum to " + std::to_string(total));
    }
}

unsigned resolve_workers(unsigned requested, std::int64_t jobs) {
    unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::int64_t>(w, std::max<std::int64_t>(jobs, 1)));
}

// Runs body(i) for i in [0, count) on a pool of threads. Each index is
// visited once; results must be written to slot i.
template <class Body>
void parallel_for(std::int64_t count, unsigned workers, Body body) {
    const unsigned threads = resolve_workers(workers, count);
    if (threads <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::int64_t i = next++; i < count && !failed; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<double> table1_distribution(ReferenceDistribution which) {
    std::size_t rare = 0;
    switch (which) {
        case ReferenceDistribution::f1: rare = 20; break;
        case ReferenceDistribution::f2: rare = 50; break;
        case ReferenceDistribution::f3: rare = 70; break;
        case ReferenceDistribution::f4: rare = 90; break;
    }
    // The common cells share what the rare cells leave. For f3 this is
    // 0.986 / 30 = 0.0328666..., printed rounded as 0.03286667.
    const double common = (1.0 - kRareMass * static_cast<double>(rare)) /
                          static_cast<double>(kReferenceSize - rare);
    std::vector<double> f(kReferenceSize, common);
    std::fill_n(f.begin(), rare, kRareMass);
    return f;
}

std::vector<double> perturb(const std::vector<double>& f) {
    if (f.size() != kReferenceSize) throw DomainError("perturb: expects 100 cells");
    constexpr double shift = 1.0 / 300.0;
    std::vector<double> out = f;
    for (std::size_t i = 0; i < 10; ++i) out[i] += shift;
    for (std::size_t i = 90; i < 100; ++i) out[i] -= shift;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) throw DomainError("perturb: cell " + std::to_string(i + 1) + " is no longer positive");
    }
    return out;
}

const char* to_string(SimStatistic s) {
    switch (s) {
        case SimStatistic::q: return "q";
        case SimStatistic::g: return "g";
        case SimStatistic::rc: return "rc";
        case SimStatistic::q_ab: return "q_ab";
        case SimStatistic::g_ab: return "g_ab";
    }
    return "?";
}

std::optional<double> ReplicateRecord::value(SimStatistic s) const {
    switch (s) {
        case SimStatistic::q: return q;
        case SimStatistic::g: return g;
        case SimStatistic::rc: return rc;
        case SimStatistic::q_ab: return q_ab;
        case SimStatistic::g_ab: return g_ab;
    }
    return std::nullopt;
}

double empirical_quantile(std::vector<double> values, double level) {
    if (values.empty()) throw DomainError("quantile of an empty sample");
    if (!(level > 0.0 && level <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
    std::sort(values.begin(), values.end());
    const double m = static_cast<double>(values.size());
    // Guard against level * m landing a rounding error above an integer.
    auto rank = static_cast<std::size_t>(std::ceil(level * m - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

std::vector<QuantileRow> quantile_by_c(const std::vector<ReplicateRecord>& records, double alpha) {
    if (records.empty()) throw DomainError("quantile_by_c: no records");
    std::map<std::int64_t, std::vector<const ReplicateRecord*>> groups;
    for (const auto& r : records) groups[r.zeros].push_back(&r);

    std::vector<QuantileRow> rows;
    for (const auto& [zeros, members] : groups) {
        QuantileRow row;
        row.zeros = zeros;
        row.count = static_cast<std::int64_t>(members.size());
        row.low_count = row.count < kLowCountGroup;
        for (std::size_t s = 0; s < kSimStatistics.size(); ++s) {
            std::vector<double> values;
            for (const auto* m : members) {
                if (auto v = m->value(kSimStatistics[s])) values.push_back(*v);
            }
            if (is_corrected(kSimStatistics[s])) row.corrected_count = static_cast<std::int64_t>(values.size());
            if (!values.empty()) row.quantile[s] = empirical_quantile(std::move(values), 1.0 - alpha);
        }
        rows.push_back(row);
    }
    return rows;
}

ReplicateRecord evaluate_replicate(std::int64_t index, const std::vector<std::int64_t>& counts,
                                   const std::vector<double>& null_probs, double h, double lambda,
                                   const EpsilonPolicy& epsilon) {
    const auto observed = ProbabilityPair::empirical(null_probs, counts);
    ReplicateRecord rec;
    rec.replicate = index;
    rec.q = pearson_q(observed);
    rec.g = kullback_g(observed);
    rec.rc = read_cressie(observed, lambda);

    const auto part = partition_zeros(counts);
    rec.zeros = part.zeros();
    try {
        std::optional<OrderStats> os;
        if (part.zeros() > 0) os = order_stats(counts, part);
        const auto params = choose_parameters(observed.n(), static_cast<std::int64_t>(counts.size()),
                                              part.zeros(), os, h, epsilon);
        const auto est = corrected_estimator(counts, part, params);
        rec.q_ab = corrected_q(null_probs, counts, part, est).value();
        rec.g_ab = corrected_g(null_probs, counts, part, est).value();
    } catch (const UniformNonzero&) {
        rec.skipped = "uniform_nonzero";
    } catch (const EmptyInterval&) {
        rec.skipped = "empty_interval";
    }
    return rec;
}

SimulationReport run_simulation(const SimConfig& cfg) {
    check_probability_vector(cfg.sampling_probs, "sampling distribution");
    check_probability_vector(cfg.null_probs, "null distribution");
    if (cfg.sampling_probs.size() != cfg.null_probs.size()) {
        throw DomainError("sampling and null distributions differ in length");
    }
    if (cfg.n < 1) throw DomainError("simulation: n must be >= 1");
    if (cfg.reps < 1) throw DomainError("simulation: reps must be >= 1");
    for (double a : cfg.alphas) {
        if (!(a > 0.0 && a < 1.0)) throw DomainError("simulation: alpha must lie in (0, 1)");
    }
    if (!(cfg.h > 0.0 && cfg.h < 1.0)) throw InvalidH("h must lie in (0, 1)");

    SimulationReport report;
    report.categories = static_cast<std::int64_t>(cfg.null_probs.size());
    report.n = cfg.n;
    report.reps = cfg.reps;
    report.seed = cfg.seed;
    report.df = static_cast<int>(report.categories - 1);
    if (report.df < 1) throw DomainError("simulation: need at least 2 categories");
    report.threshold_line = chi_square_quantile(0.95, report.df);

    report.records.resize(static_cast<std::size_t>(cfg.reps));
    parallel_for(cfg.reps, cfg.workers, [&](std::int64_t i) {
        const RandomStream stream{cfg.seed, static_cast<std::uint64_t>(i)};
        const auto counts = sample_multinomial(cfg.n, cfg.sampling_probs, stream);
        report.records[static_cast<std::size_t>(i)] =
            evaluate_replicate(i, counts, cfg.null_probs, cfg.h, cfg.lambda, cfg.epsilon);
    });

    std::map<std::int64_t, std::int64_t> zero_freq;
    for (const auto& r : report.records) {
        ++zero_freq[r.zeros];
        if (r.skipped == "uniform_nonzero") ++report.excluded_uniform;
        if (r.skipped == "empty_interval") ++report.excluded_empty_interval;
    }
    report.excluded = report.excluded_uniform + report.excluded_empty_interval;
    // Ties resolve to the smallest zero count.
    report.mode_c = std::max_element(zero_freq.begin(), zero_freq.end(), [](const auto& a, const auto& b) {
                        return a.second < b.second;
                    })->first;

    const auto applicable = cfg.reps - report.excluded;
    for (double alpha : cfg.alphas) {
        RejectionRow row;
        row.alpha = alpha;
        row.threshold = chi_square_quantile(1.0 - alpha, report.df);
        for (std::size_t s = 0; s < kSimStatistics.size(); ++s) {
            std::int64_t rejected = 0;
            for (const auto& r : report.records) {
                const auto v = r.value(kSimStatistics[s]);
                if (v && *v > row.threshold) ++rejected;
            }
            const auto denom = is_corrected(kSimStatistics[s]) ? applicable : cfg.reps;
            row.rate[s] = denom > 0 ? static_cast<double>(rejected) / static_cast<double>(denom) : 0.0;
        }
        report.rejection_rates.push_back(row);
    }

    report.quantiles_by_c = quantile_by_c(report.records, 0.05);
    return report;
}

std::vector<ZeroDecayPoint> zero_count_decay(const std::vector<double>& p0,
                                             const std::vector<std::int64_t>& n_grid,
                                             std::int64_t reps, std::uint64_t seed, unsigned workers) {
    check_probability_vector(p0, "zero-count decay");
    for (double v : p0) {
        if (!(v > 0.0)) throw DomainError("zero-count decay: probabilities must be strictly positive");
    }
    if (reps < 1) throw DomainError("zero-count decay: reps must be >= 1");

    std::vector<ZeroDecayPoint> out;
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        const std::int64_t n = n_grid[g];
        std::vector<char> has_zero(static_cast<std::size_t>(reps), 0);
        parallel_for(reps, workers, [&](std::int64_t i) {
            const RandomStream stream{seed, static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(reps) +
                                                static_cast<std::uint64_t>(i)};
            const auto counts = sample_multinomial(n, p0, stream);
            has_zero[static_cast<std::size_t>(i)] =
                std::any_of(counts.begin(), counts.end(), [](std::int64_t v) { return v == 0; });
        });
        const auto hits = std::count(has_zero.begin(), has_zero.end(), 1);
        out.push_back({n, static_cast<double>(hits) / static_cast<double>(reps)});
    }
    return out;
}

}  // namespace sparsegof
