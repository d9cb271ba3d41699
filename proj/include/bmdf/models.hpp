#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bmdf/rng.hpp"

namespace bmdf {

using RowView = std::span<const double>;

// Escape hatch: user-provided log densities for the null and the alternative.
// log_cdf1 is only needed when the alternatives are coupled by a frailty; it
// must be the log CDF of the scalar statistic returned by `statistic`.
struct SimpleDensityPair {
    std::function<double(RowView)> log_q0;
    std::function<double(RowView)> log_q1;
    std::function<double(RowView)> log_cdf1;   // optional
    std::function<double(RowView)> statistic;  // optional, defaults to x[0]
};

// x_m ~ N(mu, 1); mu = 0 under the null, mu ~ N(0, sigma2) under the alternative.
struct GaussianSpike {
    double sigma2 = 16.0;
};

// Row = n1 control values followed by n2 treatment values, common variance
// sigma^2 with precision tau = sigma^-2 ~ Gamma(alpha, rate beta).
//   null:        mu1 = mu2 = mu ~ N(nu, k0 sigma^2)
//   alternative: mu1, mu2 iid N(nu, k0 sigma^2)
// beta and nu are either a single shared value or one value per component.
struct TwoGroupGaussian {
    double k0 = 200.0;
    double alpha = 4.0;
    std::vector<double> beta{4.0};
    std::vector<double> nu{20.0};
    std::size_t n1 = 5;
    std::size_t n2 = 5;

    double beta_at(std::size_t m) const { return beta.size() == 1 ? beta[0] : beta.at(m); }
    double nu_at(std::size_t m) const { return nu.size() == 1 ? nu[0] : nu.at(m); }
};

// Row = n iid Exp(rate) replicates; rate lambda0 under the null, lambda1 under
// the alternative. Depends on the data only through T = sum(x) ~ Gamma(n, rate).
struct ExponentialPair {
    double lambda0 = 1.0;
    double lambda1 = 0.5;
    std::size_t n = 30;
};

using MarginalModel = std::variant<SimpleDensityPair, GaussianSpike, TwoGroupGaussian, ExponentialPair>;

struct PriorSpec {
    std::vector<double> pi;  // P(theta_m = 1), each in (0, 1)

    static PriorSpec uniform(std::size_t m, double pi1) { return {std::vector<double>(m, pi1)}; }
    std::size_t size() const { return pi.size(); }
    void validate() const;
};

struct DataMatrix {
    std::vector<std::vector<double>> rows;

    std::size_t size() const { return rows.size(); }
    RowView row(std::size_t m) const { return rows.at(m); }
};

// Throws ConfigurationError on bad hyperparameters, DimensionError when a row
// does not have the shape the model expects, DomainError on impossible data
// (for instance a non-positive exponential observation).
void validate_model(const MarginalModel& model);
void validate_data(const MarginalModel& model, const DataMatrix& data);

// Per-component likelihood with nuisance parameters integrated out.
struct ComponentLikelihood {
    double log_q0 = 0.0;
    double log_q1 = 0.0;
    std::optional<double> log_cdf1;  // log CDF of the alternative at the scalar statistic
};

// Marginal likelihoods (closed forms for every built-in family).
ComponentLikelihood evaluate_component(const MarginalModel& model, RowView x, std::size_t m);
double log_marginal_likelihood(const MarginalModel& model, int hypothesis, RowView x, std::size_t m = 0);

// Families with unknown nuisance parameters under at least one hypothesis.
bool is_composite(const MarginalModel& model);

// True when the alternative has a scalar statistic with a CDF, which the
// frailty coupling requires.
bool supports_copula(const MarginalModel& model);

// --- Nuisance parameters (composite families, used by the composite SMC) -----

// Model-specific parameter vector: GaussianSpike {mu}; TwoGroupGaussian
// {mu1, mu2, tau} (mu1 == mu2 under the null).
using Nuisance = std::array<double, 3>;

Nuisance sample_nuisance(const MarginalModel& model, int hypothesis, std::size_t m, Philox4x32& rng);

// log q(x | theta, nuisance), plus CDF when the family has one.
struct ConditionalLikelihood {
    double log_density = 0.0;
    std::optional<double> log_cdf;
};
ConditionalLikelihood conditional_likelihood(const MarginalModel& model, int hypothesis, RowView x, std::size_t m,
                                             const Nuisance& nuisance);

// Density at the maximum-likelihood plug-in estimate of the nuisance parameters.
double log_plugin_likelihood(const MarginalModel& model, int hypothesis, RowView x, std::size_t m);

// Two-sample summaries of a TwoGroupGaussian row.
struct TwoGroupStats {
    double mean1 = 0.0, mean2 = 0.0, mean_all = 0.0;
    double ss1 = 0.0, ss2 = 0.0, ss_all = 0.0;  // centred sums of squares
};
TwoGroupStats two_group_stats(RowView x, std::size_t n1, std::size_t n2);

}  // namespace bmdf
