#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bmdf/errors.hpp"
#include "bmdf/posterior.hpp"
#include "bmdf/simulation.hpp"
#include "bmdf/smc.hpp"

using namespace bmdf;

namespace {

DataMatrix exponential_data(std::size_t m, std::uint64_t seed) {
    ScenarioParams truth;
    truth.pi = 0.3;
    return generate(Scenario::DependentExponential, truth, m, seed).data;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

SimpleDensityPair gaussian_pair(double mu1) {
    SimpleDensityPair p;
    p.log_q0 = [](RowView x) { return -0.5 * x[0] * x[0] - 0.5 * std::log(2 * M_PI); };
    p.log_q1 = [mu1](RowView x) { return -0.5 * (x[0] - mu1) * (x[0] - mu1) - 0.5 * std::log(2 * M_PI); };
    return p;
}

}  // namespace

TEST(Trial, Examples) {
    const DataMatrix d{{{0.3}}};
    Philox4x32 rng(1);
    // Equal densities: the trial is the prior.
    const auto same = gaussian_pair(0.0);
    const auto t = trial_sample_simple(PriorSpec::uniform(1, 0.5), same, d.row(0), 0, rng);
    EXPECT_NEAR(std::exp(t.log_mass), 0.5, 1e-15);
    // pi = 0.5, q1 = 3 q0: P(theta = 1) = 0.75.
    SimpleDensityPair three;
    three.log_q0 = [](RowView) { return std::log(1.0); };
    three.log_q1 = [](RowView) { return std::log(3.0); };
    std::size_t ones = 0;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) {
        Philox4x32 r(7, static_cast<std::uint32_t>(i), 0);
        const auto draw = trial_sample_simple(PriorSpec::uniform(1, 0.5), three, d.row(0), 0, r);
        ones += draw.theta;
        EXPECT_NEAR(std::exp(draw.log_mass), draw.theta ? 0.75 : 0.25, 1e-14);
        EXPECT_NEAR(draw.log_normalizer, std::log(2.0), 1e-14);
    }
    const double se = std::sqrt(0.75 * 0.25 / n);
    EXPECT_NEAR(static_cast<double>(ones) / n, 0.75, 3 * se);
}

TEST(Trial, IndependentNullIncrementIsNormalizer) {
    const ExponentialPair model;
    const auto data = exponential_data(3, 4);
    const auto prior = PriorSpec::uniform(3, 0.2);
    for (std::size_t m = 0; m < 3; ++m) {
        Philox4x32 rng(3, 0, static_cast<std::uint32_t>(m));
        const auto t = trial_sample_simple(prior, model, data.row(m), m, rng);
        CopulaState state;
        EXPECT_NEAR(increment_simple(prior, model, GammaFrailty{2.0}, state, 0, data.row(m), m), t.log_normalizer,
                    1e-12);
        EXPECT_EQ(state.k, 0u);
        CopulaState s2;
        EXPECT_NEAR(increment_simple(prior, model, std::nullopt, s2, 1, data.row(m), m), t.log_normalizer, 1e-12);
    }
}

TEST(Ess, Bounds) {
    std::vector<double> equal(50, -3.0);
    EXPECT_NEAR(effective_sample_size(equal), 50.0, 1e-9);
    std::vector<double> one(50, -1e300);
    one[3] = 0.0;
    EXPECT_NEAR(effective_sample_size(one), 1.0, 1e-12);
    std::mt19937 gen(5);
    std::normal_distribution<double> nd(0, 5);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> w(40);
        for (double& v : w) v = nd(gen);
        const double e = effective_sample_size(w);
        EXPECT_GE(e, 1.0);
        EXPECT_LE(e, 40.0);
    }
}

TEST(Smc, ConfigValidation) {
    SmcConfig c;
    c.r = 1;
    EXPECT_THROW(c.validate(), ConfigurationError);
    c.r = 10;
    c.rho = 0.0;
    EXPECT_THROW(c.validate(), ConfigurationError);
    c.rho = 1.5;
    EXPECT_THROW(c.validate(), ConfigurationError);
}

TEST(Smc, Deterministic) {
    const auto data = exponential_data(30, 11);
    SmcConfig c;
    c.r = 500;
    c.seed = 99;
    const auto prior = PriorSpec::uniform(30, 0.2);
    const auto a = run_smc(c, prior, ExponentialPair{}, GammaFrailty{3.0}, data);
    const auto b = run_smc(c, prior, ExponentialPair{}, GammaFrailty{3.0}, data);
    EXPECT_EQ(a.phi_hat, b.phi_hat);
    EXPECT_EQ(a.psi_hat, b.psi_hat);
    EXPECT_EQ(a.resample_count, b.resample_count);
    c.scheme = ResamplingScheme::Systematic;
    const auto s = run_smc(c, prior, ExponentialPair{}, GammaFrailty{3.0}, data);
    EXPECT_EQ(s.phi_hat.size(), 30u);
    c.seed = 100;
    EXPECT_NE(run_smc(c, prior, ExponentialPair{}, GammaFrailty{3.0}, data).phi_hat, a.phi_hat);
}

TEST(Smc, EstimandsAreOptional) {
    const auto data = exponential_data(5, 1);
    SmcConfig c;
    c.r = 100;
    c.estimands = {Estimand::Phi};
    const auto e = run_smc(c, PriorSpec::uniform(5, 0.3), ExponentialPair{}, std::nullopt, data);
    EXPECT_EQ(e.phi_hat.size(), 5u);
    EXPECT_TRUE(e.psi_hat.empty());
    EXPECT_FALSE(e.summary().psi.has_value());
}

TEST(Smc, IndependentMatchesClosedForm) {
    const auto data = exponential_data(20, 2);
    const auto prior = PriorSpec::uniform(20, 0.3);
    SmcConfig c;
    c.r = 4000;
    c.seed = 3;
    const auto e = run_smc(c, prior, ExponentialPair{}, std::nullopt, data);
    const auto phi = posterior_mean_simple(prior, ExponentialPair{}, data);
    // Without coupling the trial is the exact posterior of each component.
    EXPECT_LT(max_abs_diff(e.phi_hat, phi), 0.04);
    EXPECT_EQ(e.resample_count, 0u);
    const auto ind = independent_summary(phi);
    EXPECT_LT(max_abs_diff(e.psi_hat, *ind.psi), 0.03);
}

TEST(Smc, WeakCouplingLimit) {
    const auto data = exponential_data(12, 8);
    const auto prior = PriorSpec::uniform(12, 0.3);
    SmcConfig c;
    c.r = 4000;
    c.seed = 5;
    const auto e = run_smc(c, prior, ExponentialPair{}, GammaFrailty{1e6}, data);
    EXPECT_LT(max_abs_diff(e.phi_hat, posterior_mean_simple(prior, ExponentialPair{}, data)), 0.04);
}

TEST(Smc, MatchesExactTable) {
    const auto data = exponential_data(12, 21);
    const auto prior = PriorSpec::uniform(12, 0.2);
    const GammaFrailty g{3.0};
    const auto exact = summarize(exact_posterior_table(prior, ExponentialPair{}, g, data));
    SmcConfig c;
    c.r = 20000;
    c.seed = 17;
    const auto e = run_smc(c, prior, ExponentialPair{}, g, data);
    EXPECT_LT(max_abs_diff(e.phi_hat, exact.phi), 0.03);
    EXPECT_LT(max_abs_diff(e.psi_hat, *exact.psi), 0.03);
    EXPECT_LT(max_abs_diff(e.psi_adj_hat, *exact.psi_adj), 0.03);
}

TEST(Smc, WeightsTelescopeToTarget) {
    const std::size_t m = 6;
    const auto data = exponential_data(m, 31);
    const auto prior = PriorSpec::uniform(m, 0.3);
    const GammaFrailty g{1.5};
    const ExponentialPair model;
    SmcConfig c;
    c.r = 200;
    c.rho = 1e-12;
    c.seed = 2;
    c.keep_particles = true;
    const auto e = run_smc(c, prior, model, g, data);
    ASSERT_TRUE(e.particles.has_value());
    EXPECT_EQ(e.resample_count, 0u);
    for (std::size_t i = 0; i < e.particles->size(); ++i) {
        const auto& theta = e.particles->thetas[i];
        double log_target = log_joint_likelihood(model, g, data, theta);
        double log_trial = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const auto cl = evaluate_component(model, data.row(k), k);
            const double a = std::log1p(-prior.pi[k]) + cl.log_q0;
            const double b = std::log(prior.pi[k]) + cl.log_q1;
            const double z = std::max(a, b) + std::log(std::exp(a - std::max(a, b)) + std::exp(b - std::max(a, b)));
            log_trial += (theta[k] ? b : a) - z;
            log_target += theta[k] ? std::log(prior.pi[k]) : std::log1p(-prior.pi[k]);
        }
        EXPECT_NEAR(e.particles->log_weights[i], log_target - log_trial, 1e-10 * (1 + std::abs(log_target)));
    }
}

TEST(Smc, CompositeGaussianMatchesClosedForm) {
    const DataMatrix data{{{0.2}, {-1.5}, {2.5}, {4.0}, {-0.7}}};
    const auto prior = PriorSpec::uniform(5, 0.5);
    const GaussianSpike model{16.0};
    SmcConfig c;
    c.r = 40000;
    c.seed = 12;
    c.mode = SmcMode::Composite;
    const auto e = run_smc(c, prior, model, std::nullopt, data);
    const auto phi = posterior_mean_simple(prior, model, data);
    const double ess = e.ess_trace.back();
    for (std::size_t m = 0; m < 5; ++m) {
        const double se = std::sqrt(phi[m] * (1 - phi[m]) / ess);
        EXPECT_NEAR(e.phi_hat[m], phi[m], 3 * se + 0.005) << m;
    }
}

TEST(Smc, CompositeTwoGroupMatchesClosedForm) {
    TwoGroupGaussian model;
    model.k0 = 2.0;
    model.alpha = 4.0;
    model.beta = {4.0};
    model.nu = {0.0};
    ScenarioParams truth;
    truth.pi = 0.5;
    truth.k0 = 2.0;
    truth.nu = 0.0;
    const auto gen = generate(Scenario::TwoGroupGaussian, truth, 4, 77);
    const auto prior = PriorSpec::uniform(4, 0.5);
    SmcConfig c;
    c.r = 40000;
    c.seed = 13;
    c.mode = SmcMode::Composite;
    const auto e = run_smc(c, prior, model, std::nullopt, gen.data);
    const auto phi = posterior_mean_simple(prior, model, gen.data);
    const double ess = e.ess_trace.back();
    for (std::size_t m = 0; m < 4; ++m) {
        const double se = std::sqrt(phi[m] * (1 - phi[m]) / ess);
        EXPECT_NEAR(e.phi_hat[m], phi[m], 3 * se + 0.005) << m;
    }
}

TEST(Smc, VanishingWeightsThrow) {
    const DataMatrix data{{{0.1}, {1e200}}};
    SmcConfig c;
    c.r = 50;
    c.mode = SmcMode::Composite;
    EXPECT_THROW(run_smc(c, PriorSpec::uniform(2, 0.5), GaussianSpike{}, std::nullopt, data), NumericError);
}

TEST(Smc, InputErrors) {
    const auto data = exponential_data(4, 1);
    SmcConfig c;
    c.r = 10;
    EXPECT_THROW(run_smc(c, PriorSpec::uniform(3, 0.3), ExponentialPair{}, std::nullopt, data), DimensionError);
    EXPECT_THROW(run_smc(c, PriorSpec::uniform(4, 0.3), TwoGroupGaussian{}, GammaFrailty{1.0},
                         generate(Scenario::TwoGroupGaussian, ScenarioParams{}, 4, 1).data),
                 ConfigurationError);
    EXPECT_THROW(run_smc(c, PriorSpec::uniform(4, 0.3), ExponentialPair{}, GammaFrailty{-1.0}, data),
                 ConfigurationError);
}
