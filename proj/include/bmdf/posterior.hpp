#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bmdf/copula.hpp"
#include "bmdf/loss.hpp"
#include "bmdf/models.hpp"
#include "bmdf/posterior_table.hpp"
#include "bmdf/solver.hpp"

namespace bmdf {

// phi_m = pi_m q1 / (pi_m q1 + (1 - pi_m) q0) per component, in log space.
// Throws DegenerateLikelihoodError when both densities vanish.
std::vector<double> posterior_mean_simple(const PriorSpec& prior, const MarginalModel& model, const DataMatrix& data);

// Nuisance-integrated likelihood of one row; only for composite families.
double marginal_likelihood_composite(const MarginalModel& model, int hypothesis, RowView x, std::size_t m = 0);
double log_marginal_likelihood_composite(const MarginalModel& model, int hypothesis, RowView x, std::size_t m = 0);

// log q_theta(x): nulls independent, alternatives coupled by the frailty when
// one is given. `saturated` (optional) reports CDF clamping.
double log_joint_likelihood(const MarginalModel& model, const std::optional<GammaFrailty>& frailty,
                            const DataMatrix& data, BitSpan theta, bool* saturated = nullptr);

inline constexpr std::size_t kExactTableMaxM = 12;

// Normalized pi(theta | x) over all 2^M states; refuses M > 12.
PosteriorTable exact_posterior_table(const PriorSpec& prior, const MarginalModel& model,
                                     const std::optional<GammaFrailty>& frailty, const DataMatrix& data);

// phi, psi and psi_adj marginalized from a table.
PosteriorSummary summarize(const PosteriorTable& table);

// phi plus psi/psi_adj from the Poisson-binomial recursion (posterior independence).
PosteriorSummary independent_summary(std::vector<double> phi);

// m-th component posterior mean from a table.
std::vector<double> table_phi(const PosteriorTable& table);

// Empirical-Bayes two-group hyperparameters: nu_m = row mean,
// beta_m = S^2(row) (alpha - 1) / (k0 + 1) with S^2 the sample variance of all
// n1 + n2 values. Requires alpha > 1 for a positive beta.
TwoGroupGaussian empirical_bayes_two_group(double k0, double alpha, std::size_t n1, std::size_t n2,
                                           const DataMatrix& data);

}  // namespace bmdf
