#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "bmdf/copula.hpp"
#include "bmdf/loss.hpp"
#include "bmdf/models.hpp"
#include "bmdf/rng.hpp"
#include "bmdf/solver.hpp"

namespace bmdf {

enum class Estimand { Phi, Psi, PsiAdj };
enum class ResamplingScheme { Multinomial, Systematic };

// Simple: integrated marginals in the trial and the weights.
// Composite: plug-in trial, nuisance drawn from its prior, weights corrected.
// Auto: composite for families with nuisance parameters, simple otherwise.
enum class SmcMode { Auto, Simple, Composite };

struct SmcConfig {
    std::size_t r = 1000;  // particles
    double rho = 0.5;      // resample when ESS < rho * r
    std::uint64_t seed = 0;
    std::set<Estimand> estimands{Estimand::Phi, Estimand::Psi, Estimand::PsiAdj};
    ResamplingScheme scheme = ResamplingScheme::Multinomial;
    SmcMode mode = SmcMode::Auto;
    bool keep_particles = false;  // copy the final particle system into the estimate

    void validate() const;
};

struct ParticleSystem {
    std::vector<StateVector> thetas;                 // theta_{1:m} per particle
    std::vector<std::vector<Nuisance>> nuisance;     // composite mode only
    std::vector<double> log_weights;
    std::vector<CopulaState> copula_states;
    std::size_t m = 0;                               // components processed so far

    std::size_t size() const { return log_weights.size(); }
};

struct SmcEstimate {
    std::vector<double> phi_hat;
    std::vector<double> psi_hat;
    std::vector<double> psi_adj_hat;
    std::vector<double> ess_trace;  // ESS after the weight update at each component
    std::size_t resample_count = 0;
    double log_evidence = 0.0;      // estimate of log p(x)
    bool saturated = false;         // some CDF value was clamped
    std::optional<ParticleSystem> particles;

    PosteriorSummary summary() const;
};

struct TrialDraw {
    std::uint8_t theta = 0;
    double log_mass = 0.0;        // log g_m(theta)
    double log_normalizer = 0.0;  // log sum_theta pi(theta) q_theta(x_m)
};

// theta_m ~ g_m(t) proportional to pi_m(t) q_mt(x_m).
TrialDraw trial_sample_simple(const PriorSpec& prior, const MarginalModel& model, RowView x, std::size_t m,
                              Philox4x32& rng);

// Log weight increment of the simple filter for a particle that has just
// drawn `theta_m` (the copula state is advanced in place for alternatives).
double increment_simple(const PriorSpec& prior, const MarginalModel& model, const std::optional<GammaFrailty>& frailty,
                        CopulaState& state, std::uint8_t theta_m, RowView x, std::size_t m);

// Composite increment with nuisance `nuisance` drawn from its prior under theta_m.
double increment_composite(const PriorSpec& prior, const MarginalModel& model,
                           const std::optional<GammaFrailty>& frailty, CopulaState& state, std::uint8_t theta_m,
                           const Nuisance& nuisance, RowView x, std::size_t m);

// 1 / sum(normalized w^2) for log weights.
double effective_sample_size(std::span<const double> log_weights);

SmcEstimate run_smc(const SmcConfig& config, const PriorSpec& prior, const MarginalModel& model,
                    const std::optional<GammaFrailty>& frailty, const DataMatrix& data);

}  // namespace bmdf
