#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sparsegof/correction.hpp"
#include "sparsegof/datasets.hpp"
#include "sparsegof/distributions.hpp"
#include "sparsegof/error.hpp"
#include "sparsegof/statistics.hpp"
#include "sparsegof/tables.hpp"

using namespace sparsegof;

namespace {

std::int64_t total(const Counts& x) { return std::accumulate(x.begin(), x.end(), std::int64_t{0}); }

Counts camargue_cells() { return preprocess(find_dataset("camargue").table).counts(); }

// A replicate drawn from f4 with n = 400 and 84 empty cells.
Counts f4_replicate() {
    Counts x(100, 0);
    for (int pos : {2, 4, 24, 25, 30, 70}) x[pos - 1] = 1;
    const Counts tail = {43, 47, 40, 34, 40, 28, 48, 36, 43, 35};
    std::copy(tail.begin(), tail.end(), x.begin() + 90);
    return x;
}

struct Built {
    ZeroPartition part;
    CorrectedEstimator est;
};

Built build(const Counts& x, double h = 0.1) {
    const auto part = partition_zeros(x);
    const auto params = choose_parameters(x, h);
    return {part, corrected_estimator(x, part, params)};
}

}  // namespace

TEST_CASE("zero partition") {
    const auto part = partition_zeros(Counts{0, 0, 3, 1});
    CHECK(part.zeros() == 2);
    CHECK(part.zero_indices == std::vector<std::size_t>{0, 1});
    CHECK(part.nonzero_indices == std::vector<std::size_t>{2, 3});
    CHECK(partition_zeros(Counts{5, 2, 1}).zeros() == 0);
    CHECK(partition_zeros(camargue_cells()).zeros() == 7);
    CHECK_THROWS_AS(partition_zeros(Counts{0, 0, 0}), DomainError);
    CHECK_THROWS_AS(partition_zeros(Counts{1, -1, 3}), DomainError);
}

TEST_CASE("order statistics") {
    const auto cells = camargue_cells();
    const auto os = order_stats(cells, partition_zeros(cells));
    CHECK(os.min_count == 1);
    CHECK(os.max_count == 3);
    CHECK(os.low_gap == 10);
    CHECK(os.high_gap == 12);

    const Counts x = {0, 1, 7};
    const auto os2 = order_stats(x, partition_zeros(x));
    CHECK(os2.min_count == 1);
    CHECK(os2.max_count == 7);
    CHECK(os2.low_gap == 6);
    CHECK(os2.high_gap == 6);

    const Counts flat = {2, 2, 2, 2};
    CHECK_THROWS_AS(order_stats(flat, partition_zeros(flat)), UniformNonzero);
}

TEST_CASE("b_min") {
    const auto cells = camargue_cells();
    const auto os = order_stats(cells, partition_zeros(cells));
    const double expected = std::max({0.0, std::log(12.0 / 17.0) / std::log(21.0),
                                      std::log(10.0) / std::log(21.0), std::log(2.0) / std::log(21.0)});
    CHECK(compute_b_min(21, 18, os) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(compute_b_min(21, 18, os) == doctest::Approx(0.75630).epsilon(1e-4));

    // Every log term is at most zero.
    const Counts x = {0, 1, 2};
    CHECK(compute_b_min(3, 3, order_stats(x, partition_zeros(x))) == 0.0);
}

TEST_CASE("parameters for the trophic table") {
    const auto cells = camargue_cells();
    const auto p = choose_parameters(cells);
    const double b_min = std::log(10.0) / std::log(21.0);
    const double b = 0.1 + 0.9 * b_min;
    const double nb = std::pow(21.0, b);
    CHECK(p.zeros == 7);
    CHECK(p.b == doctest::Approx(b).epsilon(1e-14));
    CHECK(p.b == doctest::Approx(0.78067).epsilon(1e-4));
    CHECK(p.a_min == 0.0);
    // Smallest nonzero cell after the shift equals a * n.
    const double a_max = (nb - 10.0) / (nb * (21.0 * 11.0 + 7.0));
    CHECK(p.a_max == doctest::Approx(a_max).epsilon(1e-12));
    CHECK(p.a_max == doctest::Approx(3.0045e-4).epsilon(1e-4));
    CHECK(p.a == doctest::Approx(a_max * (1.0 - 1e-4)).epsilon(1e-12));
    CHECK(p.d == doctest::Approx((p.a * 7.0 + std::pow(21.0, 1.0 - b) - 1.0) / 11.0).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    const Counts x = {0, 1, 7};
    CHECK_THROWS_AS(choose_parameters(x, 0.0), InvalidH);
    CHECK_THROWS_AS(choose_parameters(x, 1.0), InvalidH);
    EpsilonPolicy too_big;
    too_big.absolute = 1.0;
    CHECK_THROWS_AS(choose_parameters(x, 0.1, too_big), InvalidEpsilon);
    EpsilonPolicy negative;
    negative.absolute = -1e-9;
    CHECK_THROWS_AS(choose_parameters(x, 0.1, negative), InvalidEpsilon);

    const auto none = choose_parameters(Counts{3, 1, 4});
    CHECK(none.zeros == 0);
    CHECK(none.a == 0.0);
    CHECK(none.b == 1.0);
}

TEST_CASE("empty interval when n^b does not exceed the smallest count") {
    const Counts x = {0, 2, 3};
    const auto os = order_stats(x, partition_zeros(x));
    CHECK_THROWS_AS(admissible_a_interval(5, 3, 1, os, 0.1), EmptyInterval);
    try {
        admissible_a_interval(5, 3, 1, os, 0.1);
    } catch (const EmptyInterval& e) {
        CHECK(e.n == 5);
        CHECK(e.zeros == 1);
        CHECK(e.a_max <= e.a_min);
    }
}

TEST_CASE("f4 replicate stays inside the unit interval") {
    const auto x = f4_replicate();
    REQUIRE(total(x) == 400);
    const auto [part, est] = build(x);
    CHECK(part.zeros() == 84);
    for (double v : est.probs) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }

    // With the smallest count in place of n - n_min (R - c) the bound is far
    // looser and the smallest nonzero cell goes negative.
    const auto& p = est.params;
    const double nb = std::pow(400.0, p.b);
    const double loose = (nb - 1.0) / (nb * (400.0 * 16.0 + 84.0));
    CHECK(loose > p.a_max);
    const double a = loose * (1.0 - 1e-4);
    const double d = (a * 84.0 + std::pow(400.0, 1.0 - p.b) - 1.0) / 16.0;
    CHECK(1.0 / nb - d < 0.0);
}

TEST_CASE("exhaustive scan of small instances") {
    // Every applicable instance must give a valid estimator; every empty
    // interval must come from n^b <= smallest nonzero count.
    const std::int64_t max_count = 12;
    const std::int64_t max_n = 50;
    std::int64_t applicable = 0;
    std::int64_t empty = 0;
    for (std::size_t r = 3; r <= 5; ++r) {
        Counts x(r, 0);
        std::function<void(std::size_t, std::int64_t)> walk = [&](std::size_t i, std::int64_t n) {
            if (i == r) {
                if (n < 2) return;
                const auto part = partition_zeros(x);
                if (part.zeros() == 0 || part.nonzero_indices.size() < 2) return;
                OrderStats os;
                try {
                    os = order_stats(x, part);
                } catch (const UniformNonzero&) {
                    return;
                }
                try {
                    const auto params = choose_parameters(x);
                    const auto est = corrected_estimator(x, part, params);
                    const double s = std::accumulate(est.probs.begin(), est.probs.end(), 0.0);
                    CHECK(std::abs(s - 1.0) <= 1e-12);
                    CHECK(check_likelihood_condition(est.probs, part, n));
                    CHECK(params.b_min < params.b);
                    CHECK(params.a_min < params.a);
                    CHECK(params.a < params.a_max);
                    CHECK(params.d > 0.0);
                    ++applicable;
                } catch (const EmptyInterval& e) {
                    CHECK(std::pow(static_cast<double>(n), e.b) <= static_cast<double>(os.min_count) + 1e-9);
                    ++empty;
                }
                return;
            }
            for (std::int64_t v = 0; v <= max_count && n + v <= max_n; ++v) {
                x[i] = v;
                walk(i + 1, n + v);
            }
            x[i] = 0;
        };
        walk(0, 0);
    }
    MESSAGE("applicable " << applicable << ", empty interval " << empty);
    CHECK(applicable > 100000);
    CHECK(empty > 0);
}

TEST_CASE("estimator and closed forms on random sparse instances") {
    std::mt19937_64 eng(8675309);
    std::uniform_int_distribution<int> cats(4, 120);
    std::uniform_int_distribution<int> size(10, 500);
    std::uniform_real_distribution<double> h_dist(0.02, 0.9);
    int checked = 0;
    int attempts = 0;
    while (checked < 500 && attempts < 5000) {
        ++attempts;
        const auto r = static_cast<std::size_t>(cats(eng));
        const auto null = oracle::random_simplex(r, eng);
        // Skewed sampling vector so that empty cells are common.
        std::vector<double> w(r);
        std::exponential_distribution<double> ex(1.0);
        for (auto& v : w) v = std::pow(ex(eng), 3.0);
        const auto samp = oracle::normalized(w);
        std::discrete_distribution<std::size_t> pick(samp.begin(), samp.end());
        Counts x(r, 0);
        const int n = size(eng);
        for (int k = 0; k < n; ++k) ++x[pick(eng)];

        const auto part = partition_zeros(x);
        if (part.zeros() == 0) continue;
        const double h = h_dist(eng);
        CorrectionParams params;
        try {
            params = choose_parameters(x, h);
        } catch (const UniformNonzero&) {
            continue;
        } catch (const EmptyInterval&) {
            continue;
        }
        const auto est = corrected_estimator(x, part, params);
        const double s = std::accumulate(est.probs.begin(), est.probs.end(), 0.0);
        CHECK(std::abs(s - 1.0) <= 1e-12);
        CHECK(std::all_of(est.probs.begin(), est.probs.end(), [](double v) { return v > 0.0 && v < 1.0; }));
        CHECK(check_likelihood_condition(est.probs, part, n));
        CHECK(params.b_min < 1.0);

        const auto q = corrected_q(null, x, part, est);
        const auto g = corrected_g(null, x, part, est);
        CHECK(std::abs(q.direct - q.closed_form) <= 1e-9 * std::max(1.0, std::abs(q.direct)));
        CHECK(std::abs(g.direct - g.closed_form) <= 1e-9 * std::max(1.0, std::abs(g.direct)));
        // Direct route checked against plain loops too.
        CHECK(q.direct == doctest::Approx(oracle::pearson(null, est.probs, n)).epsilon(1e-10));
        CHECK(g.direct == doctest::Approx(oracle::kullback(null, est.probs, n)).epsilon(1e-10));
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("no empty cells leaves the classical statistics unchanged") {
    std::mt19937_64 eng(11);
    std::uniform_int_distribution<int> count(1, 30);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = 3 + trial % 20;
        Counts x(r);
        for (auto& v : x) v = count(eng);
        const auto null = oracle::random_simplex(r, eng);
        const auto part = partition_zeros(x);
        const auto est = corrected_estimator(x, part, choose_parameters(x));
        const auto pair = ProbabilityPair::empirical(null, x);
        for (std::size_t i = 0; i < r; ++i) {
            CHECK(est.probs[i] == doctest::Approx(static_cast<double>(x[i]) / total(x)).epsilon(1e-14));
        }
        CHECK(corrected_q(null, x, part, est).value() == doctest::Approx(pearson_q(pair)).epsilon(1e-12));
        CHECK(corrected_g(null, x, part, est).value() == doctest::Approx(kullback_g(pair)).epsilon(1e-12));
    }
}

TEST_CASE("inconsistent parameters are caught") {
    const auto cells = camargue_cells();
    auto [part, est] = build(cells);
    const std::vector<double> null(cells.size(), 1.0 / static_cast<double>(cells.size()));
    CHECK_NOTHROW(corrected_q(null, cells, part, est));
    est.params.a *= 1.5;
    CHECK_THROWS_AS(corrected_q(null, cells, part, est), MismatchError);
    CHECK_THROWS_AS(corrected_g(null, cells, part, est), MismatchError);
}

TEST_CASE("likelihood condition examples") {
    const Counts x = {0, 1, 7};
    const auto part = partition_zeros(x);
    CHECK(check_likelihood_condition(std::vector<double>{0.01, 0.2, 0.79}, part, 8));
    CHECK_FALSE(check_likelihood_condition(std::vector<double>{0.1, 0.2, 0.7}, part, 8));
}

TEST_CASE("brute force agrees with the likelihood condition") {
    // Probability vectors meeting the condition, tried against every count
    // vector with n <= 8, R <= 4 and at least one empty cell.
    const std::vector<double> weights = {0.5, 1.0, 2.0, 3.5};
    const std::vector<double> shrink = {0.05, 0.5, 0.99};
    std::int64_t vectors = 0;
    std::int64_t probability_vectors = 0;
    for (std::size_t r = 2; r <= 4; ++r) {
        Counts x(r, 0);
        std::function<void(std::size_t, std::int64_t)> walk = [&](std::size_t i, std::int64_t n) {
            if (i == r) {
                if (n == 0) return;
                const auto part = partition_zeros(x);
                if (part.zeros() == 0) return;
                ++vectors;
                std::vector<std::size_t> pick(part.nonzero_indices.size(), 0);
                for (;;) {
                    for (double t : shrink) {
                        std::vector<double> p(r, 0.0);
                        double lo = 1e300;
                        for (std::size_t k = 0; k < pick.size(); ++k) {
                            p[part.nonzero_indices[k]] = weights[pick[k]];
                            lo = std::min(lo, weights[pick[k]]);
                        }
                        for (auto z : part.zero_indices) p[z] = t * lo / static_cast<double>(n);
                        p = oracle::normalized(p);
                        REQUIRE(check_likelihood_condition(p, part, n));
                        CHECK(verify_inequality_bruteforce(p, x, part));
                        ++probability_vectors;
                    }
                    std::size_t k = 0;
                    while (k < pick.size() && ++pick[k] == weights.size()) pick[k++] = 0;
                    if (k == pick.size()) break;
                }
                return;
            }
            for (std::int64_t v = 0; n + v <= 8; ++v) {
                x[i] = v;
                walk(i + 1, n + v);
            }
            x[i] = 0;
        };
        walk(0, 0);
    }
    CHECK(probability_vectors >= 50);
    MESSAGE(vectors << " count vectors, " << probability_vectors << " probability vectors");

    const Counts big(5, 1);
    CHECK_THROWS_AS(verify_inequality_bruteforce(std::vector<double>(5, 0.2), big, partition_zeros(big)),
                    SizeError);
    CHECK(verify_inequality_bruteforce(std::vector<double>{0.5, 0.5}, Counts{1, 1}, partition_zeros(Counts{1, 1})));
}
