#include <gtest/gtest.h>

#include <random>

#include "bmdf/errors.hpp"
#include "bmdf/loss.hpp"

using namespace bmdf;

namespace {

ActionVector bits(std::initializer_list<int> v) {
    ActionVector out;
    for (int b : v) out.push_back(static_cast<std::uint8_t>(b));
    return out;
}

}  // namespace

TEST(Proportion, Examples) {
    EXPECT_DOUBLE_EQ(proportion(Proportion::FDP, bits({1, 0}), bits({0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(proportion(Proportion::FDP, bits({0, 0}), bits({0, 1})), 0.0);
    EXPECT_DOUBLE_EQ(proportion(Proportion::AMDP, bits({0, 0}), bits({1, 0})), 0.5);
    EXPECT_DOUBLE_EQ(proportion(Proportion::MDP, bits({0, 1}), bits({1, 1})), 0.5);
    EXPECT_DOUBLE_EQ(proportion(Proportion::FNP, bits({1, 1}), bits({1, 1})), 0.0);
    EXPECT_DOUBLE_EQ(proportion(Proportion::FP, bits({1, 1, 0, 0}), bits({0, 1, 0, 0})), 0.25);
    EXPECT_DOUBLE_EQ(proportion(Proportion::FN, bits({0, 0, 0, 0}), bits({1, 1, 0, 0})), 0.5);
}

TEST(Proportion, LengthMismatchThrows) {
    EXPECT_THROW(proportion(Proportion::FDP, bits({1}), bits({1, 0})), DimensionError);
    EXPECT_THROW(proportion(Proportion::FDP, bits({}), bits({})), DimensionError);
}

TEST(Loss, Examples) {
    EXPECT_DOUBLE_EQ(loss({LossPairKind::FpFn, 1, 1, 2}, bits({1, 0}), bits({0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(loss({LossPairKind::FdpFnp, 1, 2, 3}, bits({1, 1, 0}), bits({1, 0, 0})), 0.5);
    for (auto kind : {LossPairKind::FpFn, LossPairKind::FdpFnp, LossPairKind::FdpMdp, LossPairKind::FdpAmdp}) {
        EXPECT_DOUBLE_EQ(loss({kind, 1.3, 0.7, 3}, bits({1, 0, 1}), bits({1, 0, 1})), 0.0);
    }
    EXPECT_THROW(loss({LossPairKind::FpFn, 1, 1, 3}, bits({1, 0}), bits({0, 1})), DimensionError);
}

TEST(LossSpec, Validation) {
    EXPECT_THROW((LossSpec{LossPairKind::FpFn, -1, 1, 2}.validate()), ConfigurationError);
    EXPECT_THROW((LossSpec{LossPairKind::FpFn, 0, 0, 2}.validate()), ConfigurationError);
    EXPECT_THROW((LossSpec{LossPairKind::FpFn, 1, 1, 0}.validate()), ConfigurationError);
    EXPECT_NO_THROW((LossSpec{LossPairKind::FpFn, 0, 1, 1}.validate()));
}

TEST(LossPair, ParseAndPrint) {
    EXPECT_EQ(parse_loss_pair("fdp_mdp"), LossPairKind::FdpMdp);
    EXPECT_EQ(parse_loss_pair("FDP-AMDP"), LossPairKind::FdpAmdp);
    EXPECT_EQ(parse_loss_pair("FP,FN"), LossPairKind::FpFn);
    EXPECT_EQ(to_string(LossPairKind::FdpFnp), "FDP_FNP");
    EXPECT_THROW(parse_loss_pair("FDR"), ConfigurationError);
}

TEST(Loss, RangesAndZeroIffPerfect) {
    std::mt19937 gen(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t m = 1 + gen() % 8;
        ActionVector a(m), t(m);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = gen() & 1;
            t[i] = gen() & 1;
        }
        for (auto p : {Proportion::FP, Proportion::FN, Proportion::FDP, Proportion::MDP, Proportion::FNP,
                       Proportion::AMDP}) {
            const double v = proportion(p, a, t);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        for (auto kind : {LossPairKind::FpFn, LossPairKind::FdpFnp, LossPairKind::FdpMdp, LossPairKind::FdpAmdp}) {
            const double l = loss({kind, 1.0, 1.0, m}, a, t);
            EXPECT_GE(l, 0.0);
            EXPECT_EQ(l == 0.0, a == t);
        }
    }
}

TEST(LossAlgebra, ComplementarityAndTau) {
    std::mt19937 gen(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = 1 + gen() % 10;
        ActionVector a(m);
        for (auto& b : a) b = gen() & 1;
        const auto g0 = LossAlgebra::g0(a);
        const auto g1 = LossAlgebra::g1(a);
        for (std::size_t i = 0; i < m; ++i) {
            EXPECT_DOUBLE_EQ(g1[i], LossAlgebra::complementarity_a0 - LossAlgebra::complementarity_A1 * g0[i]);
        }
        EXPECT_EQ(count_ones(g0), LossAlgebra::tau0(count_ones(a)));
    }
}

TEST(LossAlgebra, ExpectationsPerKind) {
    EXPECT_EQ(algebra_of(LossPairKind::FdpMdp).type2_expectation, Expectation::Psi);
    EXPECT_EQ(algebra_of(LossPairKind::FdpAmdp).type2_expectation, Expectation::PsiAdj);
    EXPECT_EQ(algebra_of(LossPairKind::FpFn).type1_expectation, Expectation::OneMinusPhi);
    const auto fnp = algebra_of(LossPairKind::FdpFnp);
    EXPECT_DOUBLE_EQ(fnp.alpha0(0, 5), 1.0);
    EXPECT_DOUBLE_EQ(fnp.alpha0(4, 5), 0.25);
    EXPECT_DOUBLE_EQ(fnp.alpha1(5, 5), 1.0);
    EXPECT_DOUBLE_EQ(fnp.alpha1(3, 5), 0.5);
}
