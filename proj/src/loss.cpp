#include "bmdf/loss.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "bmdf/errors.hpp"

namespace bmdf {

std::string_view to_string(LossPairKind kind) {
    switch (kind) {
        case LossPairKind::FpFn: return "FP_FN";
        case LossPairKind::FdpFnp: return "FDP_FNP";
        case LossPairKind::FdpMdp: return "FDP_MDP";
        case LossPairKind::FdpAmdp: return "FDP_AMDP";
    }
    return "?";
}

std::string_view to_string(Proportion p) {
    switch (p) {
        case Proportion::FP: return "FP";
        case Proportion::FN: return "FN";
        case Proportion::FDP: return "FDP";
        case Proportion::MDP: return "MDP";
        case Proportion::FNP: return "FNP";
        case Proportion::AMDP: return "AMDP";
    }
    return "?";
}

LossPairKind parse_loss_pair(std::string_view name) {
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) {
        return c == '-' || c == ',' || c == '/' ? '_' : static_cast<char>(std::toupper(c));
    });
    if (up == "FP_FN") return LossPairKind::FpFn;
    if (up == "FDP_FNP") return LossPairKind::FdpFnp;
    if (up == "FDP_MDP") return LossPairKind::FdpMdp;
    if (up == "FDP_AMDP") return LossPairKind::FdpAmdp;
    throw ConfigurationError("unknown loss pair '" + std::string(name) + "'");
}

std::pair<Proportion, Proportion> proportions_of(LossPairKind kind) {
    switch (kind) {
        case LossPairKind::FpFn: return {Proportion::FP, Proportion::FN};
        case LossPairKind::FdpFnp: return {Proportion::FDP, Proportion::FNP};
        case LossPairKind::FdpMdp: return {Proportion::FDP, Proportion::MDP};
        case LossPairKind::FdpAmdp: return {Proportion::FDP, Proportion::AMDP};
    }
    throw ConfigurationError("invalid loss pair kind");
}

void LossSpec::validate() const {
    if (!(c0 >= 0.0) || !(c1 >= 0.0) || !(c0 + c1 > 0.0) || !std::isfinite(c0 + c1)) {
        throw ConfigurationError("loss costs must satisfy c0 >= 0, c1 >= 0, c0 + c1 > 0");
    }
    if (m < 1) throw ConfigurationError("loss dimension m must be >= 1");
}

std::size_t count_ones(BitSpan bits) {
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

double proportion(Proportion kind, BitSpan a, BitSpan theta) {
    if (a.size() != theta.size() || a.empty()) {
        throw DimensionError("proportion: action and state must have the same nonzero length");
    }
    const auto m = a.size();
    std::size_t rejected = 0, alternatives = 0, false_disc = 0, missed = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const bool ai = a[i] != 0;
        const bool ti = theta[i] != 0;
        rejected += ai;
        alternatives += ti;
        false_disc += ai && !ti;
        missed += !ai && ti;
    }
    const auto guard = [](std::size_t d) { return static_cast<double>(std::max<std::size_t>(d, 1)); };
    switch (kind) {
        case Proportion::FP: return static_cast<double>(false_disc) / static_cast<double>(m);
        case Proportion::FN: return static_cast<double>(missed) / static_cast<double>(m);
        case Proportion::FDP: return static_cast<double>(false_disc) / guard(rejected);
        case Proportion::MDP: return static_cast<double>(missed) / guard(alternatives);
        case Proportion::FNP: return static_cast<double>(missed) / guard(m - rejected);
        case Proportion::AMDP: return static_cast<double>(missed) / static_cast<double>(alternatives + 1);
    }
    return 0.0;
}

double loss(const LossSpec& spec, BitSpan a, BitSpan theta) {
    if (a.size() != spec.m || theta.size() != spec.m) {
        throw DimensionError("loss: vectors must have length spec.m");
    }
    const auto [l0, l1] = proportions_of(spec.kind);
    return spec.c0 * proportion(l0, a, theta) + spec.c1 * proportion(l1, a, theta);
}

double LossAlgebra::alpha0(std::size_t k, std::size_t m) const {
    if (kind == LossPairKind::FpFn) return 1.0 / static_cast<double>(m);
    return 1.0 / static_cast<double>(std::max<std::size_t>(k, 1));
}

double LossAlgebra::alpha1(std::size_t k, std::size_t m) const {
    switch (kind) {
        case LossPairKind::FpFn: return 1.0 / static_cast<double>(m);
        case LossPairKind::FdpFnp: return 1.0 / static_cast<double>(std::max<std::size_t>(m - k, 1));
        case LossPairKind::FdpMdp:
        case LossPairKind::FdpAmdp: return 1.0;
    }
    return 1.0;
}

ActionVector LossAlgebra::g0(BitSpan a) { return ActionVector(a.begin(), a.end()); }

ActionVector LossAlgebra::g1(BitSpan a) {
    ActionVector out(a.size());
    std::transform(a.begin(), a.end(), out.begin(), [](auto b) { return static_cast<std::uint8_t>(b ? 0 : 1); });
    return out;
}

LossAlgebra algebra_of(LossPairKind kind) {
    switch (kind) {
        case LossPairKind::FpFn: return {kind, Expectation::OneMinusPhi, Expectation::Phi};
        case LossPairKind::FdpFnp: return {kind, Expectation::OneMinusPhi, Expectation::Phi};
        case LossPairKind::FdpMdp: return {kind, Expectation::OneMinusPhi, Expectation::Psi};
        case LossPairKind::FdpAmdp: return {kind, Expectation::OneMinusPhi, Expectation::PsiAdj};
    }
    throw ConfigurationError("invalid loss pair kind");
}

}  // namespace bmdf
