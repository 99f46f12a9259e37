#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sparsegof {

using Counts = std::vector<std::int64_t>;
using Probs = std::vector<double>;

/// Chi-square distribution with integer degrees of freedom.
class ChiSquare {
public:
    explicit ChiSquare(int df);

    int df() const { return df_; }
    double cdf(double x) const;
    /// Upper tail 1 - cdf(x), computed without cancellation.
    double sf(double x) const;
    double quantile(double p) const;

private:
    int df_;
};

double chi_square_cdf(double x, int df);
double chi_square_sf(double x, int df);
double chi_square_quantile(double p, int df);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Immutable descriptor of one reproducible random substream.
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;

    /// Fresh generator positioned at the start of this substream.
    std::mt19937_64 engine() const;
};

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(std::mt19937_64& eng);

/// Exact Binomial(n, p) draw.
std::int64_t sample_binomial(std::int64_t n, double p, std::mt19937_64& eng);

/// Multinomial M(n; p) by sequential conditional binomials.
Counts sample_multinomial(std::int64_t n, std::span<const double> p, std::mt19937_64& eng);
Counts sample_multinomial(std::int64_t n, std::span<const double> p, const RandomStream& rng);

}  // namespace sparsegof
