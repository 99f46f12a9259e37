#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sparsegof {

/// Cells split by whether their observed count is zero. Indices refer to the
/// caller's cell order; nothing is reordered.
struct ZeroPartition {
    std::vector<std::size_t> zero_indices;
    std::vector<std::size_t> nonzero_indices;

    std::int64_t zeros() const { return static_cast<std::int64_t>(zero_indices.size()); }
    std::size_t size() const { return zero_indices.size() + nonzero_indices.size(); }
};

/// Extremes of the nonzero counts and the two derived gaps.
struct OrderStats {
    std::int64_t min_count;   // smallest nonzero count
    std::int64_t max_count;   // largest nonzero count
    std::int64_t low_gap;     // n - min_count * (R - c)
    std::int64_t high_gap;    // max_count * (R - c) - n
};

/// How far below a_max(b) the zero-cell mass is placed.
///
/// By default epsilon = relative * (a_max - max(a_min, 0)). An absolute value
/// overrides this and must be smaller than that width.
struct EpsilonPolicy {
    double relative = 1e-4;
    std::optional<double> absolute;

    double resolve(double a_min, double a_max) const;
};

struct CorrectionParams {
    std::int64_t zeros = 0;
    double b_min = 0.0;
    double b = 1.0;
    double a_min = 0.0;
    double a_max = 0.0;
    double a = 0.0;
    double epsilon = 0.0;
    double h = 0.1;
    /// Shift (a c + n^(1-b) - 1) / (R - c) subtracted from every nonzero cell.
    double d = 0.0;
};

struct AdmissibleInterval {
    double a_min;
    double a_max;
};

/// Estimator assigning mass a to each zero cell and n_j / n^b - d to the others.
struct CorrectedEstimator {
    std::vector<double> probs;
    CorrectionParams params;
};

/// A corrected statistic evaluated by substitution and by closed form.
struct CorrectedValue {
    double direct;
    double closed_form;

    double value() const { return direct; }
};

ZeroPartition partition_zeros(std::span<const std::int64_t> counts);

/// Throws UniformNonzero when every nonzero count is equal.
OrderStats order_stats(std::span<const std::int64_t> counts, const ZeroPartition& part);

/// Lower bound of the admissible b range; always strictly below 1.
double compute_b_min(std::int64_t n, std::int64_t categories, const OrderStats& os);

/// Open interval (a_min(b), a_max(b)) for the zero-cell mass.
/// Throws EmptyInterval when a_max <= a_min.
AdmissibleInterval admissible_a_interval(std::int64_t n, std::int64_t categories,
                                         std::int64_t zeros, const OrderStats& os, double b);

/// b = h + (1 - h) b_min and a = a_max(b) - epsilon. For zeros == 0 returns
/// a = 0, b = 1 without looking at the order statistics.
CorrectionParams choose_parameters(std::int64_t n, std::int64_t categories, std::int64_t zeros,
                                   const std::optional<OrderStats>& os, double h = 0.1,
                                   const EpsilonPolicy& epsilon = {});

/// Convenience wrapper: partition, order statistics and parameter choice.
CorrectionParams choose_parameters(std::span<const std::int64_t> counts, double h = 0.1,
                                   const EpsilonPolicy& epsilon = {});

CorrectedEstimator corrected_estimator(std::span<const std::int64_t> counts,
                                       const ZeroPartition& part, const CorrectionParams& params);

/// Q evaluated at the corrected estimator, directly and as
/// n^(2(1-b)) Q - f(a, b). Throws MismatchError if they disagree beyond 1e-9
/// relative.
CorrectedValue corrected_q(std::span<const double> null_probs, std::span<const std::int64_t> counts,
                           const ZeroPartition& part, const CorrectedEstimator& est);

/// G evaluated at the corrected estimator, directly and as n^(1-b) G - g(a, b).
CorrectedValue corrected_g(std::span<const double> null_probs, std::span<const std::int64_t> counts,
                           const ZeroPartition& part, const CorrectedEstimator& est);

/// True iff probs[i] <= probs[j] / n for every zero cell i and nonzero cell j.
bool check_likelihood_condition(std::span<const double> probs, const ZeroPartition& part,
                                std::int64_t n);

/// Exhaustive check that the observed count vector is at least as likely
/// under M(n; probs) as every reallocation that moves mass from nonzero cells
/// into empty cells. Limited to n <= 8 and R <= 4 (SizeError otherwise).
bool verify_inequality_bruteforce(std::span<const double> probs,
                                  std::span<const std::int64_t> counts, const ZeroPartition& part);

}  // namespace sparsegof
