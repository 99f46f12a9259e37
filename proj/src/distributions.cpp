#include "sparsegof/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparsegof/error.hpp"

namespace sparsegof {

namespace {

constexpr double kGammaEps = 1e-16;
constexpr int kGammaMaxIter = 10000;

// exp(-x + a ln x - lgamma(a)), the common prefactor of both gamma expansions.
double gamma_prefactor(double a, double x) {
    return std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kGammaMaxIter; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaEps) break;
    }
    return sum * gamma_prefactor(a, x);
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaEps) break;
    }
    return gamma_prefactor(a, x) * h;
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0)) throw DomainError("incomplete gamma: shape must be positive");
    if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be nonnegative");
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

ChiSquare::ChiSquare(int df) : df_(df) {
    if (df < 1) throw DomainError("chi-square: df must be >= 1, got " + std::to_string(df));
}

double ChiSquare::cdf(double x) const {
    if (!(x >= 0.0)) throw DomainError("chi-square cdf: x must be nonnegative");
    if (std::isinf(x)) return 1.0;
    return regularized_gamma_p(0.5 * df_, 0.5 * x);
}

double ChiSquare::sf(double x) const {
    if (!(x >= 0.0)) throw DomainError("chi-square sf: x must be nonnegative");
    if (std::isinf(x)) return 0.0;
    return regularized_gamma_q(0.5 * df_, 0.5 * x);
}

double ChiSquare::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("chi-square quantile: p must lie in (0, 1)");

    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(df_));
    while (cdf(hi) < p) {
        lo = hi;
        hi *= 2.0;
    }

    // Newton steps on the cdf, falling back to bisection outside the bracket.
    const double half_df = 0.5 * df_;
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = cdf(x) - p;
        if (f == 0.0) return x;
        if (f < 0.0) lo = x; else hi = x;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;

        const double log_pdf = (half_df - 1.0) * std::log(x) - 0.5 * x -
                               half_df * std::log(2.0) - std::lgamma(half_df);
        const double pdf = std::exp(log_pdf);
        double next = (pdf > 0.0 && std::isfinite(pdf)) ? x - f / pdf : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

double chi_square_cdf(double x, int df) { return ChiSquare(df).cdf(x); }
double chi_square_sf(double x, int df) { return ChiSquare(df).sf(x); }
double chi_square_quantile(double p, int df) { return ChiSquare(df).quantile(p); }

std::mt19937_64 RandomStream::engine() const {
    std::uint64_t state = seed;
    const std::uint64_t a = splitmix64(state);
    state ^= stream_index * 0xd1b54a32d192ed03ULL;
    const std::uint64_t b = splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

std::int64_t sample_binomial(std::int64_t n, double p, std::mt19937_64& eng) {
    if (n < 0) throw DomainError("binomial: n must be nonnegative");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial: p must lie in [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, eng);

    // Inversion over the support enumerated outward from the mode. Any fixed
    // enumeration order gives an exact draw; this one needs O(sd) steps.
    const auto mode = static_cast<std::int64_t>(std::floor((n + 1) * p));
    const auto m = std::min(mode, n);
    const double nd = static_cast<double>(n);
    const double log_pmf_mode = std::lgamma(nd + 1.0) - std::lgamma(m + 1.0) -
                                std::lgamma(nd - m + 1.0) + m * std::log(p) +
                                (nd - m) * std::log1p(-p);
    const double odds = p / (1.0 - p);

    double u = uniform01(eng);
    const double pmf_mode = std::exp(log_pmf_mode);
    u -= pmf_mode;
    if (u < 0.0) return m;

    std::int64_t up = m;
    std::int64_t down = m;
    double pmf_up = pmf_mode;
    double pmf_down = pmf_mode;
    while (true) {
        bool moved = false;
        if (up < n && pmf_up > 0.0) {
            pmf_up *= static_cast<double>(n - up) / static_cast<double>(up + 1) * odds;
            ++up;
            u -= pmf_up;
            if (u < 0.0) return up;
            moved = true;
        }
        if (down > 0 && pmf_down > 0.0) {
            pmf_down *= static_cast<double>(down) / static_cast<double>(n - down + 1) / odds;
            --down;
            u -= pmf_down;
            if (u < 0.0) return down;
            moved = true;
        }
        // Remaining mass lost to rounding.
        if (!moved) return m;
    }
}

Counts sample_multinomial(std::int64_t n, std::span<const double> p, std::mt19937_64& eng) {
    if (n < 1) throw DomainError("multinomial: n must be >= 1");
    if (p.empty()) throw DomainError("multinomial: empty probability vector");
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw DomainError("multinomial: negative probability component");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw DomainError("multinomial: probabilities sum to " + std::to_string(total));
    }

    Counts out(p.size(), 0);
    std::size_t last = p.size() - 1;
    while (p[last] == 0.0) --last;

    std::int64_t remaining = n;
    double mass_left = 1.0;
    for (std::size_t r = 0; r < last && remaining > 0; ++r) {
        if (p[r] == 0.0) continue;
        const double q = std::clamp(p[r] / mass_left, 0.0, 1.0);
        const std::int64_t x = sample_binomial(remaining, q, eng);
        out[r] = x;
        remaining -= x;
        mass_left -= p[r];
        if (mass_left <= 0.0) break;
    }
    out[last] += remaining;
    return out;
}

Counts sample_multinomial(std::int64_t n, std::span<const double> p, const RandomStream& rng) {
    auto eng = rng.engine();
    return sample_multinomial(n, p, eng);
}

}  // namespace sparsegof
