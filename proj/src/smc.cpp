#include "bmdf/smc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"

namespace bmdf {

namespace {

constexpr std::uint32_t kResampleStream = 0xFFFFFFFFu;

// Quantities shared by every particle at component m.
struct StepTerms {
    double log_q0 = 0.0, log_q1 = 0.0;  // trial densities (integrated or plug-in)
    double log_normalizer = 0.0;        // log(pi0 q0 + pi1 q1)
    double p1 = 0.0;                    // trial probability of theta_m = 1
};

StepTerms make_terms(double pi1, double log_q0, double log_q1, std::size_t m) {
    StepTerms t;
    t.log_q0 = log_q0;
    t.log_q1 = log_q1;
    const double a = std::log1p(-pi1) + log_q0;
    const double b = std::log(pi1) + log_q1;
    t.log_normalizer = num::log_add_exp(a, b);
    if (!std::isfinite(t.log_normalizer)) {
        throw DegenerateLikelihoodError("trial distribution undefined at component " + std::to_string(m));
    }
    t.p1 = std::exp(b - t.log_normalizer);
    return t;
}

StepTerms simple_terms(const PriorSpec& prior, const ComponentLikelihood& c, std::size_t m) {
    return make_terms(prior.pi[m], c.log_q0, c.log_q1, m);
}

StepTerms composite_terms(const PriorSpec& prior, const MarginalModel& model, RowView x, std::size_t m) {
    return make_terms(prior.pi[m], log_plugin_likelihood(model, 0, x, m), log_plugin_likelihood(model, 1, x, m), m);
}

std::uint8_t draw_theta(double p1, Philox4x32& rng) { return rng.uniform_open() < p1 ? 1 : 0; }

double simple_increment(const StepTerms& t, const std::optional<GammaFrailty>& frailty, CopulaState& state,
                        std::uint8_t theta, const ComponentLikelihood& c) {
    if (!theta || !frailty) return t.log_normalizer;
    const double before = state.log_density;
    state = block_log_density_step_log(*frailty, state, *c.log_cdf1, c.log_q1);
    return t.log_normalizer + (state.log_density - before) - t.log_q1;
}

double composite_increment(const StepTerms& t, const MarginalModel& model, const std::optional<GammaFrailty>& frailty,
                           CopulaState& state, std::uint8_t theta, const Nuisance& nuisance, RowView x,
                           std::size_t m) {
    const auto cl = conditional_likelihood(model, theta, x, m, nuisance);
    if (!theta) return t.log_normalizer + cl.log_density - t.log_q0;
    if (!frailty) return t.log_normalizer + cl.log_density - t.log_q1;
    const double before = state.log_density;
    state = block_log_density_step_log(*frailty, state, *cl.log_cdf, cl.log_density);
    return t.log_normalizer + (state.log_density - before) - t.log_q1;
}

void check_inputs(const PriorSpec& prior, const MarginalModel& model, const std::optional<GammaFrailty>& frailty,
                  const DataMatrix& data) {
    validate_data(model, data);
    prior.validate();
    if (prior.size() != data.size()) throw DimensionError("prior and data have different numbers of components");
    if (frailty) {
        frailty->validate();
        if (!supports_copula(model)) {
            throw ConfigurationError("frailty coupling needs a family with a scalar alternative CDF");
        }
    }
}

void resample(ParticleSystem& ps, ResamplingScheme scheme, std::uint64_t seed, std::size_t component) {
    const std::size_t r = ps.size();
    const double hi = *std::max_element(ps.log_weights.begin(), ps.log_weights.end());
    std::vector<double> cdf(r);
    double acc = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        acc += std::exp(ps.log_weights[i] - hi);
        cdf[i] = acc;
    }
    const double log_mean = hi + std::log(acc) - std::log(static_cast<double>(r));
    Philox4x32 rng(seed, kResampleStream, static_cast<std::uint32_t>(component));
    std::vector<std::size_t> pick(r);
    if (scheme == ResamplingScheme::Systematic) {
        const double u0 = rng.uniform_open();
        std::size_t j = 0;
        for (std::size_t i = 0; i < r; ++i) {
            const double target = (static_cast<double>(i) + u0) / static_cast<double>(r) * acc;
            while (j + 1 < r && cdf[j] < target) ++j;
            pick[i] = j;
        }
    } else {
        for (std::size_t i = 0; i < r; ++i) {
            const double target = rng.uniform_open() * acc;
            pick[i] = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
            pick[i] = std::min(pick[i], r - 1);
        }
    }
    ParticleSystem next;
    next.m = ps.m;
    next.thetas.reserve(r);
    next.copula_states.reserve(r);
    for (std::size_t i = 0; i < r; ++i) {
        next.thetas.push_back(ps.thetas[pick[i]]);
        next.copula_states.push_back(ps.copula_states[pick[i]]);
        if (!ps.nuisance.empty()) next.nuisance.push_back(ps.nuisance[pick[i]]);
    }
    // Equal weights carrying the running normalizing-constant estimate.
    next.log_weights.assign(r, log_mean);
    ps = std::move(next);
}

}  // namespace

void SmcConfig::validate() const {
    if (r < 2) throw ConfigurationError("SMC needs at least 2 particles");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigurationError("SMC resampling threshold rho must lie in (0, 1]");
    if (estimands.empty()) throw ConfigurationError("SMC needs at least one estimand");
    if (r > 0xFFFFFFFEu) throw ConfigurationError("too many particles");
}

PosteriorSummary SmcEstimate::summary() const {
    PosteriorSummary s;
    s.phi = phi_hat;
    if (!psi_hat.empty()) s.psi = psi_hat;
    if (!psi_adj_hat.empty()) s.psi_adj = psi_adj_hat;
    return s;
}

TrialDraw trial_sample_simple(const PriorSpec& prior, const MarginalModel& model, RowView x, std::size_t m,
                              Philox4x32& rng) {
    if (m >= prior.size()) throw DimensionError("trial_sample_simple: component index out of range");
    const auto c = evaluate_component(model, x, m);
    const auto t = simple_terms(prior, c, m);
    TrialDraw d;
    d.theta = draw_theta(t.p1, rng);
    d.log_normalizer = t.log_normalizer;
    d.log_mass = (d.theta ? std::log(prior.pi[m]) + t.log_q1 : std::log1p(-prior.pi[m]) + t.log_q0) - t.log_normalizer;
    return d;
}

double increment_simple(const PriorSpec& prior, const MarginalModel& model, const std::optional<GammaFrailty>& frailty,
                        CopulaState& state, std::uint8_t theta_m, RowView x, std::size_t m) {
    const auto c = evaluate_component(model, x, m);
    if (frailty && theta_m && !c.log_cdf1) throw ConfigurationError("frailty coupling needs an alternative CDF");
    return simple_increment(simple_terms(prior, c, m), frailty, state, theta_m, c);
}

double increment_composite(const PriorSpec& prior, const MarginalModel& model,
                           const std::optional<GammaFrailty>& frailty, CopulaState& state, std::uint8_t theta_m,
                           const Nuisance& nuisance, RowView x, std::size_t m) {
    return composite_increment(composite_terms(prior, model, x, m), model, frailty, state, theta_m, nuisance, x, m);
}

double effective_sample_size(std::span<const double> log_weights) {
    if (log_weights.empty()) return 0.0;
    const double hi = *std::max_element(log_weights.begin(), log_weights.end());
    if (!std::isfinite(hi)) return 0.0;
    double s1 = 0.0, s2 = 0.0;
    for (double lw : log_weights) {
        const double w = std::exp(lw - hi);
        s1 += w;
        s2 += w * w;
    }
    const double ess = s1 * s1 / s2;
    return std::clamp(ess, 1.0, static_cast<double>(log_weights.size()));
}

SmcEstimate run_smc(const SmcConfig& config, const PriorSpec& prior, const MarginalModel& model,
                    const std::optional<GammaFrailty>& frailty, const DataMatrix& data) {
    config.validate();
    const bool composite = config.mode == SmcMode::Composite || (config.mode == SmcMode::Auto && is_composite(model));
    check_inputs(prior, model, frailty, data);

    const std::size_t big_m = data.size();
    const std::size_t r = config.r;
    ParticleSystem ps;
    ps.thetas.assign(r, StateVector{});
    for (auto& t : ps.thetas) t.reserve(big_m);
    ps.log_weights.assign(r, 0.0);
    ps.copula_states.assign(r, CopulaState{});
    if (composite) ps.nuisance.assign(r, {});

    SmcEstimate est;
    est.ess_trace.reserve(big_m);
    for (std::size_t m = 0; m < big_m; ++m) {
        const auto x = data.row(m);
        const auto c = evaluate_component(model, x, m);
        const auto terms = composite ? composite_terms(prior, model, x, m) : simple_terms(prior, c, m);
        for (std::size_t i = 0; i < r; ++i) {
            Philox4x32 rng(config.seed, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(m));
            const std::uint8_t theta = draw_theta(terms.p1, rng);
            ps.thetas[i].push_back(theta);
            double inc = 0.0;
            if (composite) {
                const auto nu = sample_nuisance(model, theta, m, rng);
                ps.nuisance[i].push_back(nu);
                inc = composite_increment(terms, model, frailty, ps.copula_states[i], theta, nu, x, m);
            } else {
                inc = simple_increment(terms, frailty, ps.copula_states[i], theta, c);
            }
            ps.log_weights[i] += inc;
        }
        ps.m = m + 1;
        const double hi = *std::max_element(ps.log_weights.begin(), ps.log_weights.end());
        if (!std::isfinite(hi)) {
            throw NumericError("all SMC weights vanished at component " + std::to_string(m + 1) + " of " +
                               std::to_string(big_m));
        }
        const double ess = effective_sample_size(ps.log_weights);
        est.ess_trace.push_back(ess);
        if (ess < config.rho * static_cast<double>(r) && m + 1 < big_m) {
            resample(ps, config.scheme, config.seed, m);
            ++est.resample_count;
        }
    }

    // Self-normalized estimates.
    const double hi = *std::max_element(ps.log_weights.begin(), ps.log_weights.end());
    std::vector<double> w(r);
    for (std::size_t i = 0; i < r; ++i) w[i] = std::exp(ps.log_weights[i] - hi);
    const double total = num::pairwise_sum(w);
    est.log_evidence = hi + std::log(total / static_cast<double>(r));
    const bool want_phi = config.estimands.count(Estimand::Phi) > 0;
    const bool want_psi = config.estimands.count(Estimand::Psi) > 0;
    const bool want_adj = config.estimands.count(Estimand::PsiAdj) > 0;
    if (want_phi) est.phi_hat.assign(big_m, 0.0);
    if (want_psi) est.psi_hat.assign(big_m, 0.0);
    if (want_adj) est.psi_adj_hat.assign(big_m, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        const double wi = w[i] / total;
        if (wi == 0.0) continue;
        const auto ones = static_cast<double>(count_ones(ps.thetas[i]));
        for (std::size_t m = 0; m < big_m; ++m) {
            if (!ps.thetas[i][m]) continue;
            if (want_phi) est.phi_hat[m] += wi;
            if (want_psi) est.psi_hat[m] += wi / ones;
            if (want_adj) est.psi_adj_hat[m] += wi / (ones + 1.0);
        }
    }
    for (auto* v : {&est.phi_hat, &est.psi_hat, &est.psi_adj_hat}) {
        for (double& e : *v) e = std::clamp(e, 0.0, 1.0);
    }
    for (const auto& s : ps.copula_states) est.saturated = est.saturated || s.saturated;
    if (config.keep_particles) est.particles = std::move(ps);
    return est;
}

}  // namespace bmdf
