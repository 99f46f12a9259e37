#include "sparsegof/correction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "sparsegof/error.hpp"
#include "sparsegof/statistics.hpp"

namespace sparsegof {

namespace {

constexpr double kClosedFormTolerance = 1e-9;

std::int64_t total_of(std::span<const std::int64_t> counts) {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

void check_agreement(const char* name, double direct, double closed) {
    const double scale = std::max(1.0, std::abs(direct));
    if (!(std::abs(direct - closed) <= kClosedFormTolerance * scale)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << name << ": direct value " << direct << " and closed form " << closed
            << " disagree";
        throw MismatchError(msg.str());
    }
}

void check_sizes(std::span<const double> null_probs, std::span<const std::int64_t> counts,
                 const ZeroPartition& part, const CorrectedEstimator& est) {
    if (null_probs.size() != counts.size() || part.size() != counts.size() ||
        est.probs.size() != counts.size()) {
        throw DomainError("corrected statistic: inconsistent vector lengths");
    }
}

}  // namespace

double EpsilonPolicy::resolve(double a_min, double a_max) const {
    const double width = a_max - std::max(a_min, 0.0);
    if (absolute) {
        if (!(*absolute > 0.0 && *absolute < width)) {
            std::ostringstream msg;
            msg << "epsilon " << *absolute << " must lie in (0, " << width << ")";
            throw InvalidEpsilon(msg.str());
        }
        return *absolute;
    }
    if (!(relative > 0.0 && relative < 1.0)) {
        throw InvalidEpsilon("relative epsilon must lie in (0, 1)");
    }
    return relative * width;
}

ZeroPartition partition_zeros(std::span<const std::int64_t> counts) {
    if (counts.empty()) throw DomainError("partition: empty count vector");
    ZeroPartition part;
    for (std::size_t r = 0; r < counts.size(); ++r) {
        if (counts[r] < 0) throw DomainError("partition: negative count in cell " + std::to_string(r));
        (counts[r] == 0 ? part.zero_indices : part.nonzero_indices).push_back(r);
    }
    if (part.nonzero_indices.empty()) throw DomainError("partition: all counts are zero");
    return part;
}

OrderStats order_stats(std::span<const std::int64_t> counts, const ZeroPartition& part) {
    if (part.nonzero_indices.empty()) throw DomainError("order statistics: no nonzero cell");
    std::int64_t lo = counts[part.nonzero_indices.front()];
    std::int64_t hi = lo;
    for (std::size_t j : part.nonzero_indices) {
        lo = std::min(lo, counts[j]);
        hi = std::max(hi, counts[j]);
    }
    if (lo == hi) {
        throw UniformNonzero("all " + std::to_string(part.nonzero_indices.size()) +
                             " nonzero counts equal " + std::to_string(lo));
    }
    const std::int64_t n = total_of(counts);
    const auto k = static_cast<std::int64_t>(part.nonzero_indices.size());
    return OrderStats{lo, hi, n - lo * k, hi * k - n};
}

double compute_b_min(std::int64_t n, std::int64_t categories, const OrderStats& os) {
    if (os.min_count == os.max_count) throw UniformNonzero("b_min: uniform nonzero counts");
    if (n < 2 || categories < 2) throw DomainError("b_min: need n >= 2 and R >= 2");
    const double log_n = std::log(static_cast<double>(n));
    const double high = std::log(static_cast<double>(os.high_gap) / static_cast<double>(categories - 1)) / log_n;
    const double low = std::log(static_cast<double>(os.low_gap)) / log_n;
    const double spread = std::log(static_cast<double>(os.max_count - os.min_count)) / log_n;
    return std::max({0.0, high, low, spread});
}

AdmissibleInterval admissible_a_interval(std::int64_t n, std::int64_t categories,
                                         std::int64_t zeros, const OrderStats& os, double b) {
    if (zeros < 1) throw DomainError("admissible interval: requires at least one zero cell");
    if (!(b > 0.0 && b < 1.0)) throw DomainError("admissible interval: b must lie in (0, 1)");

    const double nd = static_cast<double>(n);
    const double c = static_cast<double>(zeros);
    const double k = static_cast<double>(categories - zeros);
    const double nb = std::pow(nd, b);

    // Lower bound keeping the largest cell below 1 once d is substituted.
    const double a_min = std::max(0.0, ((os.max_count - nb) * k + nb - nd) / (c * nb));
    // The last term is a <= p_min / n for the smallest nonzero cell after the
    // shift d is substituted; b > b_min makes its numerator positive.
    const double a_max = std::min({1.0, (nb - os.min_count) / (c * nb),
                                   (nb - os.low_gap) / (nb * (nd * k + c))});
    if (!(a_max > a_min)) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "empty admissible interval for a: n=" << n << " R=" << categories
            << " c=" << zeros << " b=" << b << " a_min=" << a_min << " a_max=" << a_max;
        throw EmptyInterval(msg.str(), n, categories, zeros, b, a_min, a_max);
    }
    return AdmissibleInterval{a_min, a_max};
}

CorrectionParams choose_parameters(std::int64_t n, std::int64_t categories, std::int64_t zeros,
                                   const std::optional<OrderStats>& os, double h,
                                   const EpsilonPolicy& epsilon) {
    if (!(h > 0.0 && h < 1.0)) throw InvalidH("h must lie in (0, 1)");
    if (zeros < 0 || zeros >= categories) throw DomainError("choose parameters: need 0 <= c < R");

    CorrectionParams params;
    params.zeros = zeros;
    params.h = h;
    if (zeros == 0) return params;

    if (!os) throw DomainError("choose parameters: order statistics required when c > 0");
    params.b_min = compute_b_min(n, categories, *os);
    params.b = h + (1.0 - h) * params.b_min;
    const auto interval = admissible_a_interval(n, categories, zeros, *os, params.b);
    params.a_min = interval.a_min;
    params.a_max = interval.a_max;
    params.epsilon = epsilon.resolve(interval.a_min, interval.a_max);
    params.a = interval.a_max - params.epsilon;

    const double nd = static_cast<double>(n);
    params.d = (params.a * static_cast<double>(zeros) + std::pow(nd, 1.0 - params.b) - 1.0) /
               static_cast<double>(categories - zeros);
    return params;
}

CorrectionParams choose_parameters(std::span<const std::int64_t> counts, double h,
                                   const EpsilonPolicy& epsilon) {
    const auto part = partition_zeros(counts);
    const auto categories = static_cast<std::int64_t>(counts.size());
    std::optional<OrderStats> os;
    if (part.zeros() > 0) os = order_stats(counts, part);
    return choose_parameters(total_of(counts), categories, part.zeros(), os, h, epsilon);
}

CorrectedEstimator corrected_estimator(std::span<const std::int64_t> counts,
                                       const ZeroPartition& part, const CorrectionParams& params) {
    if (part.size() != counts.size()) throw DomainError("estimator: partition does not match counts");
    if (params.zeros != part.zeros()) throw DomainError("estimator: parameters built for another zero count");

    const double nd = static_cast<double>(total_of(counts));
    const double nb = std::pow(nd, params.b);
    CorrectedEstimator est{std::vector<double>(counts.size()), params};
    for (std::size_t i : part.zero_indices) est.probs[i] = params.a;
    for (std::size_t j : part.nonzero_indices) {
        est.probs[j] = static_cast<double>(counts[j]) / nb - params.d;
    }
    for (std::size_t r = 0; r < est.probs.size(); ++r) {
        if (!(est.probs[r] > 0.0 && est.probs[r] < 1.0)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "corrected estimator component " << r << " = " << est.probs[r]
                << " outside (0, 1)";
            throw InternalError(msg.str());
        }
    }
    return est;
}

CorrectedValue corrected_q(std::span<const double> null_probs, std::span<const std::int64_t> counts,
                           const ZeroPartition& part, const CorrectedEstimator& est) {
    check_sizes(null_probs, counts, part, est);
    const std::vector<double> null(null_probs.begin(), null_probs.end());
    const auto observed = ProbabilityPair::empirical(null, counts);
    const ProbabilityPair corrected(null, est.probs, observed.n());

    const double direct = pearson_q(corrected);

    const auto& prm = est.params;
    const double nd = static_cast<double>(observed.n());
    const double inflate = std::pow(nd, 1.0 - prm.b);
    double weighted = 0.0;      // sum over nonzero cells of n_j / (n p_j)
    double inv_nonzero = 0.0;   // sum over nonzero cells of 1 / p_j
    double inv_zero = 0.0;      // sum over zero cells of 1 / p_i
    for (std::size_t j : part.nonzero_indices) {
        weighted += static_cast<double>(counts[j]) / (nd * null[j]);
        inv_nonzero += 1.0 / null[j];
    }
    for (std::size_t i : part.zero_indices) inv_zero += 1.0 / null[i];

    const double f = nd * (1.0 - inflate * inflate + 2.0 * inflate * prm.d * weighted -
                           prm.a * prm.a * inv_zero - prm.d * prm.d * inv_nonzero);
    const double closed = inflate * inflate * pearson_q(observed) - f;

    check_agreement("corrected Q", direct, closed);
    return CorrectedValue{direct, closed};
}

CorrectedValue corrected_g(std::span<const double> null_probs, std::span<const std::int64_t> counts,
                           const ZeroPartition& part, const CorrectedEstimator& est) {
    check_sizes(null_probs, counts, part, est);
    const std::vector<double> null(null_probs.begin(), null_probs.end());
    const auto observed = ProbabilityPair::empirical(null, counts);
    const ProbabilityPair corrected(null, est.probs, observed.n());

    const double direct = kullback_g(corrected);

    const auto& prm = est.params;
    const double nd = static_cast<double>(observed.n());
    const double k = static_cast<double>(part.nonzero_indices.size());
    const double nb = std::pow(nd, prm.b);
    const double inflate = std::pow(nd, 1.0 - prm.b);
    const double shift_total = prm.d * k;  // a c + n^(1-b) - 1

    double shifted_log = 0.0;
    double observed_log = 0.0;
    for (std::size_t j : part.nonzero_indices) {
        const double nj = static_cast<double>(counts[j]);
        const double numer = nj * k - nb * shift_total;
        shifted_log += std::log(numer / (null[j] * nb * k));
        observed_log += nj / nd * std::log(numer / (nj * std::pow(nd, prm.b - 1.0) * k));
    }
    double zero_log = 0.0;
    for (std::size_t i : part.zero_indices) zero_log += prm.a * std::log(prm.a / null[i]);

    const double g = 2.0 * nd * (prm.d * shifted_log - zero_log - inflate * observed_log);
    const double closed = inflate * kullback_g(observed) - g;

    check_agreement("corrected G", direct, closed);
    return CorrectedValue{direct, closed};
}

bool check_likelihood_condition(std::span<const double> probs, const ZeroPartition& part,
                                std::int64_t n) {
    if (part.zero_indices.empty()) return true;
    double max_zero = 0.0;
    for (std::size_t i : part.zero_indices) max_zero = std::max(max_zero, probs[i]);
    double min_nonzero = 1.0;
    for (std::size_t j : part.nonzero_indices) min_nonzero = std::min(min_nonzero, probs[j]);
    return max_zero <= min_nonzero / static_cast<double>(n);
}

bool verify_inequality_bruteforce(std::span<const double> probs,
                                  std::span<const std::int64_t> counts, const ZeroPartition& part) {
    const std::int64_t n = total_of(counts);
    if (n > 8 || counts.size() > 4) {
        throw SizeError("brute-force likelihood check limited to n <= 8 and R <= 4");
    }
    if (probs.size() != counts.size()) throw DomainError("brute force: length mismatch");
    if (part.zero_indices.empty()) return true;

    auto log_likelihood = [&](const std::vector<std::int64_t>& x) {
        double ll = std::lgamma(static_cast<double>(n) + 1.0);
        for (std::size_t r = 0; r < x.size(); ++r) {
            ll += static_cast<double>(x[r]) * std::log(probs[r]) -
                  std::lgamma(static_cast<double>(x[r]) + 1.0);
        }
        return ll;
    };
    const std::vector<std::int64_t> observed(counts.begin(), counts.end());
    const double observed_ll = log_likelihood(observed);

    // Alternatives: empty cells may receive any count, nonzero cells may only
    // lose mass, and the total stays n.
    std::vector<std::int64_t> alt(counts.size(), 0);
    bool holds = true;
    std::function<void(std::size_t, std::int64_t)> enumerate = [&](std::size_t r, std::int64_t left) {
        if (!holds) return;
        if (r == alt.size()) {
            if (left == 0 && alt != observed && log_likelihood(alt) > observed_ll + 1e-12) {
                holds = false;
            }
            return;
        }
        const std::int64_t cap = counts[r] == 0 ? left : std::min(counts[r], left);
        for (std::int64_t v = 0; v <= cap; ++v) {
            alt[r] = v;
            enumerate(r + 1, left - v);
        }
        alt[r] = 0;
    };
    enumerate(0, n);
    return holds;
}

}  // namespace sparsegof
