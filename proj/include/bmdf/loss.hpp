#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bmdf {

// a in {0,1}^M (the decision) and theta in {0,1}^M (the state of reality).
using ActionVector = std::vector<std::uint8_t>;
using StateVector = std::vector<std::uint8_t>;
using BitSpan = std::span<const std::uint8_t>;

enum class Proportion { FP, FN, FDP, MDP, FNP, AMDP };

// The (Type I, Type II) loss pairs that can be combined into a compound loss.
enum class LossPairKind { FpFn, FdpFnp, FdpMdp, FdpAmdp };

std::string_view to_string(LossPairKind kind);
std::string_view to_string(Proportion p);
LossPairKind parse_loss_pair(std::string_view name);

// (L0, L1) for a pair kind.
std::pair<Proportion, Proportion> proportions_of(LossPairKind kind);

struct LossSpec {
    LossPairKind kind = LossPairKind::FpFn;
    double c0 = 1.0;  // cost of the Type I loss
    double c1 = 1.0;  // cost of the Type II loss
    std::size_t m = 1;

    // Throws ConfigurationError unless c0, c1 >= 0, c0 + c1 > 0 and m >= 1.
    void validate() const;
};

// The named proportion with max(., 1) guards in the denominators; AMDP uses
// (theta'1) + 1 instead. Throws DimensionError on a length mismatch.
double proportion(Proportion kind, BitSpan a, BitSpan theta);

// c0 * L0(a, theta) + c1 * L1(a, theta).
double loss(const LossSpec& spec, BitSpan a, BitSpan theta);

// Which posterior expectation E[beta(theta'1) h(theta) | x] a loss term needs.
enum class Expectation {
    OneMinusPhi,  // E(1 - theta_m | x)
    Phi,          // E(theta_m | x)
    Psi,          // E(theta_m / max(theta'1, 1) | x)
    PsiAdj,       // E(theta_m / (theta'1 + 1) | x)
};

// Generic decomposition L_j(a, theta) = alpha_j(a'1) g_j(a)' beta_j(theta'1) h_j(theta).
// For every implemented pair g0(a) = a, g1(a) = a0 - A1 g0(a) with a0 = 1,
// A1 = 1, and tau0 is the identity.
struct LossAlgebra {
    LossPairKind kind;
    Expectation type1_expectation;
    Expectation type2_expectation;

    double alpha0(std::size_t k, std::size_t m) const;
    double alpha1(std::size_t k, std::size_t m) const;

    static constexpr double complementarity_a0 = 1.0;
    static constexpr double complementarity_A1 = 1.0;

    static ActionVector g0(BitSpan a);
    static ActionVector g1(BitSpan a);
    static std::size_t tau0(std::size_t k) { return k; }
};

LossAlgebra algebra_of(LossPairKind kind);

std::size_t count_ones(BitSpan bits);

}  // namespace bmdf
