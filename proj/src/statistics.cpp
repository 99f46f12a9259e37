#include "sparsegof/statistics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sparsegof/error.hpp"

namespace sparsegof {

namespace {

constexpr double kSumTolerance = 1e-9;

double sum_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

ProbabilityPair::ProbabilityPair(std::vector<double> null_probs, std::vector<double> test_probs,
                                 std::int64_t n)
    : null_(std::move(null_probs)), test_(std::move(test_probs)), n_(n) {
    if (n_ < 1) throw DomainError("probability pair: n must be >= 1");
    if (null_.size() != test_.size()) {
        throw DomainError("probability pair: length mismatch (" + std::to_string(null_.size()) +
                          " vs " + std::to_string(test_.size()) + ")");
    }
    if (null_.size() < 2) throw DomainError("probability pair: need at least 2 categories");
    for (std::size_t r = 0; r < null_.size(); ++r) {
        if (!(null_[r] > 0.0)) {
            throw DomainError("null probability of cell " + std::to_string(r) +
                              " is not strictly positive");
        }
        if (!(test_[r] >= 0.0)) {
            throw DomainError("test probability of cell " + std::to_string(r) + " is negative");
        }
    }
    if (std::abs(sum_of(null_) - 1.0) > kSumTolerance) {
        throw DomainError("null probabilities do not sum to 1");
    }
    if (std::abs(sum_of(test_) - 1.0) > kSumTolerance) {
        throw DomainError("test probabilities do not sum to 1");
    }
}

ProbabilityPair ProbabilityPair::empirical(std::vector<double> null_probs,
                                           std::span<const std::int64_t> counts) {
    const std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (n < 1) throw DomainError("empirical pair: total count must be >= 1");
    std::vector<double> test(counts.size());
    for (std::size_t r = 0; r < counts.size(); ++r) {
        if (counts[r] < 0) throw DomainError("empirical pair: negative count");
        test[r] = static_cast<double>(counts[r]) / static_cast<double>(n);
    }
    return ProbabilityPair(std::move(null_probs), std::move(test), n);
}

double pearson_q(const ProbabilityPair& pair) {
    const auto p = pair.null_probs();
    const auto q = pair.test_probs();
    double sum = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) {
        const double diff = q[r] - p[r];
        sum += diff * diff / p[r];
    }
    return static_cast<double>(pair.n()) * sum;
}

double kullback_g(const ProbabilityPair& pair) {
    const auto p = pair.null_probs();
    const auto q = pair.test_probs();
    double sum = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) {
        if (q[r] > 0.0) sum += q[r] * std::log(q[r] / p[r]);
    }
    return 2.0 * static_cast<double>(pair.n()) * sum;
}

double read_cressie(const ProbabilityPair& pair, double lambda) {
    if (!std::isfinite(lambda)) throw DomainError("power divergence: lambda must be finite");
    if (lambda == 0.0) return kullback_g(pair);

    const auto p = pair.null_probs();
    const auto q = pair.test_probs();
    const double two_n = 2.0 * static_cast<double>(pair.n());

    if (lambda == -1.0) {
        double sum = 0.0;
        for (std::size_t r = 0; r < p.size(); ++r) {
            if (q[r] > 0.0) sum += p[r] * std::log(p[r] / q[r]);
        }
        return two_n * sum;
    }

    // expm1 keeps small |lambda| accurate: (x^l - 1)/l -> ln x.
    double sum = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) {
        if (q[r] > 0.0) sum += q[r] * std::expm1(lambda * std::log(q[r] / p[r]));
    }
    return two_n * sum / (lambda * (lambda + 1.0));
}

double ku_corrected_g(double g_value, std::int64_t zeros) {
    if (zeros < 0) throw DomainError("Ku correction: zero count must be nonnegative");
    return g_value - static_cast<double>(zeros);
}

}  // namespace sparsegof
