#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bmdf/bh.hpp"
#include "bmdf/errors.hpp"
#include "bmdf/simulation.hpp"

using namespace bmdf;

namespace {

// Definitional scan: largest i with p_(i) <= i q / M, reject the i smallest.
ActionVector bh_reference(const PValueVector& p, double q) {
    const std::size_t m = p.size();
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    std::size_t k = 0;
    for (std::size_t i = 1; i <= m; ++i) {
        if (sorted[i - 1] <= static_cast<double>(i) * q / static_cast<double>(m)) k = i;
    }
    ActionVector a(m, 0);
    if (k == 0) return a;
    for (std::size_t i = 0; i < m; ++i) a[i] = p[i] <= sorted[k - 1];
    return a;
}

}  // namespace

TEST(Bh, Examples) {
    EXPECT_EQ(bh_decide({0.01, 0.04, 0.03, 0.5}, 0.05), (ActionVector{1, 0, 0, 0}));
    EXPECT_EQ(bh_decide({0.01, 0.04, 0.02, 0.5}, 0.05), (ActionVector{1, 0, 1, 0}));
    EXPECT_EQ(bh_decide({0.01, 0.02, 0.03, 0.04}, 0.05), (ActionVector{1, 1, 1, 1}));
    EXPECT_EQ(bh_decide({0.2, 0.3}, 0.05), (ActionVector{0, 0}));
    // Step-up: p_(1) fails its own threshold but p_(2) passes.
    EXPECT_EQ(bh_decide({0.03, 0.04}, 0.05), (ActionVector{1, 1}));
    // Ties are rejected together.
    EXPECT_EQ(bh_decide({0.02, 0.02, 0.9}, 0.1), (ActionVector{1, 1, 0}));
}

TEST(Bh, Errors) {
    EXPECT_THROW(bh_decide({}, 0.05), DimensionError);
    EXPECT_THROW(bh_decide({0.1}, 0.0), ConfigurationError);
    EXPECT_THROW(bh_decide({0.1}, 1.0), ConfigurationError);
    EXPECT_THROW(bh_decide({1.2}, 0.1), DomainError);
    EXPECT_THROW(bh_decide({std::nan("")}, 0.1), DomainError);
}

TEST(Bh, MatchesDefinitionalScan) {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 60);
    for (int rep = 0; rep < 1000; ++rep) {
        PValueVector p(len(gen));
        for (double& v : p) {
            v = u(gen);
            if (v < 0.3) v *= 0.01;
            if (u(gen) < 0.1) v = std::round(v * 100) / 100;  // ties
        }
        for (double q : {0.01, 0.05, 0.2}) ASSERT_EQ(bh_decide(p, q), bh_reference(p, q)) << rep;
    }
}

TEST(Bh, MonotoneInLevel) {
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(0.0, 0.1);
    PValueVector p(200);
    for (double& v : p) v = u(gen);
    std::size_t prev = 0;
    for (int i = 1; i < 100; ++i) {
        const auto a = bh_decide(p, i / 100.0);
        const std::size_t k = count_ones(a);
        EXPECT_GE(k, prev);
        prev = k;
    }
}

TEST(PValues, Gaussian) {
    const auto p = p_values_for_model(GaussianSpike{}, DataMatrix{{{0.0}, {1.959963984540054}, {-1.959963984540054}}});
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_NEAR(p[1], 0.05, 1e-12);
    EXPECT_NEAR(p[2], 0.05, 1e-12);
}

TEST(PValues, TwoGroup) {
    TwoGroupGaussian t;
    t.n1 = 3;
    t.n2 = 3;
    const auto p = p_values_for_model(t, DataMatrix{{{1, 2, 3, 1, 2, 3}, {1, 2, 3, 11, 12, 13}}});
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_LT(p[1], 1e-3);
    // t = -10 / sqrt(2/3) on 4 df.
    EXPECT_NEAR(p[1], 2.5521674944192687e-4, 1e-9);
    TwoGroupGaussian tiny;
    tiny.n1 = 1;
    tiny.n2 = 1;
    EXPECT_THROW(p_values_for_model(tiny, DataMatrix{{{1, 2}}}), ConfigurationError);
    SimpleDensityPair user;
    user.log_q0 = [](RowView) { return 0.0; };
    user.log_q1 = [](RowView) { return 0.0; };
    EXPECT_THROW(p_values_for_model(user, DataMatrix{{{1}}}), ConfigurationError);
}

TEST(PValues, Exponential) {
    ExponentialPair e;
    e.n = 4;
    const auto p = p_values_for_model(e, DataMatrix{{{1, 1, 1, 1}, {3, 3, 3, 3}}});
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    // 2n(y - 1 - log y) with y = 3 gives 8 (2 - log 3).
    EXPECT_NEAR(p[1], std::erfc(std::sqrt(8 * (2 - std::log(3.0)) / 2)), 1e-12);
}

TEST(Bh, ControlsFdrUnderCompositeGaussian) {
    ScenarioParams truth;
    truth.pi = 0.2;
    const double q = 0.1;
    double fdp = 0;
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
        const auto g = generate(Scenario::CompositeGaussian, truth, 200, 1000 + r);
        const auto a = bh_decide(p_values_for_model(GaussianSpike{16.0}, g.data), q);
        fdp += empirical_metrics(a, g.theta)[Metric::FDP];
    }
    // Independent p-values: FDR = (1 - pi) q = 0.08.
    EXPECT_LT(fdp / reps, q);
    EXPECT_NEAR(fdp / reps, 0.8 * q, 0.015);
}
