#include "bmdf/posterior.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/poisson_binomial.hpp"

namespace bmdf {

namespace {

void check_prior(const PriorSpec& prior, const DataMatrix& data) {
    prior.validate();
    if (prior.size() != data.size()) throw DimensionError("prior and data have different numbers of components");
}

double logistic_from_logs(double log_a, double log_b, std::size_t m) {
    // a / (a + b)
    if (log_a == num::kNegInf && log_b == num::kNegInf) {
        throw DegenerateLikelihoodError("both hypotheses give zero density to row " + std::to_string(m));
    }
    if (std::isnan(log_a) || std::isnan(log_b)) throw NumericError("NaN likelihood in row " + std::to_string(m));
    const double d = log_b - log_a;
    if (d > 0.0) {
        const double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

}  // namespace

std::vector<double> posterior_mean_simple(const PriorSpec& prior, const MarginalModel& model, const DataMatrix& data) {
    validate_data(model, data);
    check_prior(prior, data);
    std::vector<double> phi(data.size());
    for (std::size_t m = 0; m < data.size(); ++m) {
        const auto c = evaluate_component(model, data.row(m), m);
        phi[m] = logistic_from_logs(std::log(prior.pi[m]) + c.log_q1, std::log1p(-prior.pi[m]) + c.log_q0, m);
    }
    return phi;
}

double log_marginal_likelihood_composite(const MarginalModel& model, int hypothesis, RowView x, std::size_t m) {
    if (!is_composite(model)) throw ConfigurationError("marginal_likelihood_composite needs a composite family");
    validate_model(model);
    return log_marginal_likelihood(model, hypothesis, x, m);
}

double marginal_likelihood_composite(const MarginalModel& model, int hypothesis, RowView x, std::size_t m) {
    return std::exp(log_marginal_likelihood_composite(model, hypothesis, x, m));
}

double log_joint_likelihood(const MarginalModel& model, const std::optional<GammaFrailty>& frailty,
                            const DataMatrix& data, BitSpan theta, bool* saturated) {
    if (theta.size() != data.size()) throw DimensionError("state length differs from the number of rows");
    if (frailty && !supports_copula(model)) {
        throw ConfigurationError("frailty coupling needs a family with a scalar alternative CDF");
    }
    double out = 0.0;
    CopulaState block;
    for (std::size_t m = 0; m < data.size(); ++m) {
        const auto c = evaluate_component(model, data.row(m), m);
        if (!theta[m]) {
            out += c.log_q0;
        } else if (!frailty) {
            out += c.log_q1;
        } else {
            block = block_log_density_step_log(*frailty, block, *c.log_cdf1, c.log_q1);
        }
    }
    if (saturated) *saturated = block.saturated;
    return out + block.log_density;
}

PosteriorTable exact_posterior_table(const PriorSpec& prior, const MarginalModel& model,
                                     const std::optional<GammaFrailty>& frailty, const DataMatrix& data) {
    validate_data(model, data);
    check_prior(prior, data);
    const std::size_t m = data.size();
    if (m > kExactTableMaxM) {
        throw RefusalError("exact posterior table refuses M = " + std::to_string(m) + " (limit " +
                           std::to_string(kExactTableMaxM) + ")");
    }
    if (frailty) {
        frailty->validate();
        if (!supports_copula(model)) throw ConfigurationError("frailty coupling needs a family with a scalar CDF");
    }
    std::vector<ComponentLikelihood> comps(m);
    for (std::size_t i = 0; i < m; ++i) comps[i] = evaluate_component(model, data.row(i), i);

    PosteriorTable table{m, std::vector<double>(std::size_t{1} << m)};
    std::vector<double> log_post(table.states());
    for (std::size_t state = 0; state < table.states(); ++state) {
        double lp = 0.0;
        CopulaState block;
        for (std::size_t i = 0; i < m; ++i) {
            if (!PosteriorTable::bit(state, i)) {
                lp += std::log1p(-prior.pi[i]) + comps[i].log_q0;
                continue;
            }
            lp += std::log(prior.pi[i]);
            if (frailty) {
                block = block_log_density_step_log(*frailty, block, *comps[i].log_cdf1, comps[i].log_q1);
            } else {
                lp += comps[i].log_q1;
            }
        }
        log_post[state] = lp + block.log_density;
    }
    const double norm = num::log_sum_exp(log_post);
    if (!std::isfinite(norm)) throw DegenerateLikelihoodError("every state has zero posterior density");
    for (std::size_t state = 0; state < table.states(); ++state) table.prob[state] = std::exp(log_post[state] - norm);
    return table;
}

namespace {

void clamp_unit(std::vector<double>& v) {
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
}

}  // namespace

std::vector<double> table_phi(const PosteriorTable& table) {
    std::vector<double> phi(table.m, 0.0);
    for (std::size_t state = 0; state < table.states(); ++state) {
        for (std::size_t i = 0; i < table.m; ++i) {
            if (PosteriorTable::bit(state, i)) phi[i] += table.prob[state];
        }
    }
    clamp_unit(phi);
    return phi;
}

PosteriorSummary summarize(const PosteriorTable& table) {
    PosteriorSummary out;
    out.phi.assign(table.m, 0.0);
    std::vector<double> psi(table.m, 0.0), psi_adj(table.m, 0.0);
    for (std::size_t state = 0; state < table.states(); ++state) {
        const double p = table.prob[state];
        const auto ones = static_cast<double>(std::popcount(state));
        for (std::size_t i = 0; i < table.m; ++i) {
            if (!PosteriorTable::bit(state, i)) continue;
            out.phi[i] += p;
            psi[i] += p / ones;
            psi_adj[i] += p / (ones + 1.0);
        }
    }
    // Summation can overshoot 1 by an ulp when the mass sits on one state.
    clamp_unit(out.phi);
    clamp_unit(psi);
    clamp_unit(psi_adj);
    out.psi = std::move(psi);
    out.psi_adj = std::move(psi_adj);
    return out;
}

PosteriorSummary independent_summary(std::vector<double> phi) {
    PosteriorSummary out;
    out.psi = psi_exact_independent(phi, false);
    out.psi_adj = psi_exact_independent(phi, true);
    out.phi = std::move(phi);
    return out;
}

TwoGroupGaussian empirical_bayes_two_group(double k0, double alpha, std::size_t n1, std::size_t n2,
                                           const DataMatrix& data) {
    if (!(alpha > 1.0)) throw ConfigurationError("empirical-Bayes beta needs alpha > 1");
    if (!(k0 > 0.0)) throw ConfigurationError("k0 must be positive");
    if (n1 + n2 < 2) throw ConfigurationError("empirical-Bayes variance needs at least two values per row");
    TwoGroupGaussian out;
    out.k0 = k0;
    out.alpha = alpha;
    out.n1 = n1;
    out.n2 = n2;
    out.beta.resize(data.size());
    out.nu.resize(data.size());
    for (std::size_t m = 0; m < data.size(); ++m) {
        const auto st = two_group_stats(data.row(m), n1, n2);
        const double s2 = st.ss_all / static_cast<double>(n1 + n2 - 1);
        if (!(s2 > 0.0)) throw DegenerateLikelihoodError("row " + std::to_string(m) + " has zero sample variance");
        out.nu[m] = st.mean_all;
        out.beta[m] = s2 * (alpha - 1.0) / (k0 + 1.0);
    }
    return out;
}

}  // namespace bmdf
