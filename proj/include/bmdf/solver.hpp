#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bmdf/loss.hpp"
#include "bmdf/posterior_table.hpp"

namespace bmdf {

// Everything the solvers need to know about the posterior.
//   phi[m]     = E(theta_m | x)
//   psi[m]     = E(theta_m / max(theta'1, 1) | x)   (FDP_MDP)
//   psi_adj[m] = E(theta_m / (theta'1 + 1) | x)     (FDP_AMDP)
struct PosteriorSummary {
    std::vector<double> phi;
    std::optional<std::vector<double>> psi;
    std::optional<std::vector<double>> psi_adj;

    std::size_t size() const { return phi.size(); }

    // Length and range checks; throws ConfigurationError if a vector required by
    // `kind` is missing and DimensionError if lengths disagree with m.
    void validate_for(LossPairKind kind, std::size_t m) const;

    std::span<const double> expectation(Expectation which) const;
};

struct SolverResult {
    ActionVector action;
    std::size_t k_star = 0;
    std::vector<double> h_values;  // H(k, x) for k = 0..M
    double posterior_loss = 0.0;   // posterior expected loss of `action`
};

// Values of H(k) closer than this (relative to c0 + c1) are treated as ties and
// resolved toward fewer rejections.
inline constexpr double kTieTolerance = 1e-13;

// Generic search: for each k build e(k) = d0(k) - A1 d1(k), keep its k
// smallest entries, evaluate H(k), and take k* = argmin H (smallest k on ties).
SolverResult solve_generic(const LossSpec& spec, const PosteriorSummary& post);

// Componentwise threshold phi_m > c0 / (c0 + c1).
SolverResult solve_fp_fn(const LossSpec& spec, const PosteriorSummary& post);

// One sort of phi; H(k) from prefix sums.
SolverResult solve_fdp_fnp(const LossSpec& spec, const PosteriorSummary& post);

// FDP_MDP and FDP_AMDP. Uses a single sort when phi and psi induce the same
// descending order, otherwise evaluates e~(k) for every k.
SolverResult solve_fdp_mdp(const LossSpec& spec, const PosteriorSummary& post);

// Dispatches to the fastest applicable path for spec.kind.
SolverResult solve(const LossSpec& spec, const PosteriorSummary& post);

// L~(a, x) computed from the posterior summary.
double posterior_expected_loss(const LossSpec& spec, const PosteriorSummary& post, BitSpan a);

// L~(a, x) = sum_theta pi(theta | x) L(a, theta) from a full table.
double posterior_expected_loss(const LossSpec& spec, const PosteriorTable& table, BitSpan a);

// Exhaustive search over all 2^M actions; returns the lexicographically smallest
// minimizer. h_values[k] holds the minimum over actions with exactly k ones.
SolverResult brute_force_oracle(const LossSpec& spec, const PosteriorSummary& post);
SolverResult brute_force_oracle(const LossSpec& spec, const PosteriorTable& table);

inline constexpr std::size_t kOracleMaxSummaryM = 20;
inline constexpr std::size_t kOracleMaxTableM = 12;

}  // namespace bmdf
