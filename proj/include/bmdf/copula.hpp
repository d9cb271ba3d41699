#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bmdf {

// Gamma(kappa, rate kappa) frailty (mean 1). Coupling the alternatives through
// it yields the Clayton copula with parameter 1/kappa; Kendall's tau = 1/(2 kappa + 1).
struct GammaFrailty {
    double kappa = 1.0;

    void validate() const;

    // E exp(-u Z) = (1 + u/kappa)^-kappa.
    double laplace(double u) const;
    // Inverse of laplace on (0, 1]: kappa (t^(-1/kappa) - 1). t = 0 gives +inf.
    double generator_inverse(double t) const;
    // laplace(sum generator_inverse(u_i)).
    double copula_value(std::span<const double> u) const;
};

// Running summary of the dependent block (the alternatives seen so far).
//   k           block size
//   s           sum of generator_inverse(F_t)
//   log_w       log(1 + s/kappa), kept separately because s overflows far in the tails
//   log_density log joint density of the block's observations
struct CopulaState {
    std::size_t k = 0;
    double s = 0.0;
    double log_w = 0.0;
    double log_density = 0.0;
    bool saturated = false;  // a CDF value had to be clamped away from {0, 1}
};

inline constexpr double kCdfFloor = 1e-300;

// Adds one observation with marginal CDF value F and density f to the block.
// The joint density of a block of size k is
//   (-1)^k L^(k)(s) * prod f_t / |L'(L^-1(F_t))|
// and the difference of successive log_density values is the conditional
// density of the new observation given the earlier ones.
CopulaState block_log_density_step(const GammaFrailty& frailty, const CopulaState& state, double F, double f);
CopulaState block_log_density_step_log(const GammaFrailty& frailty, const CopulaState& state, double log_F,
                                       double log_f);

// Joint log density computed in one pass (no recursion) for cross-checks.
double block_log_density(const GammaFrailty& frailty, std::span<const double> F, std::span<const double> f);

// Draws one dependent block: Z ~ Gamma(kappa, kappa), then component t is
// quantile_t(L(E_t / Z)) with E_t ~ Exp(1) independent.
std::vector<double> sample_dependent_block(const GammaFrailty& frailty,
                                           const std::vector<std::function<double(double)>>& quantiles,
                                           std::uint64_t seed);

// Same with every component sharing one quantile function.
std::vector<double> sample_dependent_block(const GammaFrailty& frailty, const std::function<double(double)>& quantile,
                                           std::size_t count, std::uint64_t seed);

}  // namespace bmdf
