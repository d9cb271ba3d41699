#pragma once

#include <span>
#include <vector>

namespace bmdf {

// pmf[s] = P(S = s) for S = sum of independent Bernoulli(p_i); O(M^2).
std::vector<double> poisson_binomial_pmf(std::span<const double> p);

// Distribution of S - B where B ~ Bernoulli(p) is one of the summands of the
// distribution `pmf`. Recurses forward when p <= 1/2 and backward otherwise so
// that rounding errors are damped rather than amplified.
std::vector<double> remove_bernoulli(std::span<const double> pmf, double p);

// psi_m = E(theta_m / max(theta'1, 1)) when theta_m ~ independent Bernoulli(phi_m);
// with `adjusted`, E(theta_m / (theta'1 + 1)) instead. O(M^2) overall.
std::vector<double> psi_exact_independent(std::span<const double> phi, bool adjusted = false);

}  // namespace bmdf
