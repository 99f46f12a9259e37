#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sparsegof {

/// A null probability vector paired with a test vector (the empirical
/// distribution x/n or any other estimator of p) and the sample size n.
///
/// Construction validates the pair: equal lengths of at least 2, both summing
/// to 1 within 1e-9, every null component strictly positive and every test
/// component nonnegative. Violations raise DomainError.
class ProbabilityPair {
public:
    ProbabilityPair(std::vector<double> null_probs, std::vector<double> test_probs, std::int64_t n);

    /// Pair whose test vector is counts / n.
    static ProbabilityPair empirical(std::vector<double> null_probs, std::span<const std::int64_t> counts);

    std::span<const double> null_probs() const { return null_; }
    std::span<const double> test_probs() const { return test_; }
    std::int64_t n() const { return n_; }
    std::size_t size() const { return null_.size(); }

private:
    std::vector<double> null_;
    std::vector<double> test_;
    std::int64_t n_;
};

/// Pearson's statistic n * sum (p'_r - p_r)^2 / p_r.
double pearson_q(const ProbabilityPair& pair);

/// Kullback's statistic 2n * sum p'_r ln(p'_r / p_r), with 0 ln 0 = 0.
double kullback_g(const ProbabilityPair& pair);

/// Power-divergence statistic of index lambda.
///
/// lambda = 0 and lambda = -1 return their continuity limits. Zero test
/// components contribute 0 for every lambda.
double read_cressie(const ProbabilityPair& pair, double lambda);

/// Ku's legacy correction: G minus one per empty cell.
double ku_corrected_g(double g_value, std::int64_t zeros);

}  // namespace sparsegof
