#include "bmdf/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "bmdf/errors.hpp"

namespace bmdf {

namespace {

void check_unit_interval(std::span<const double> v, const char* name) {
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw DomainError(std::string("posterior summary: ") + name + " entries must lie in [0, 1]");
        }
    }
}

std::size_t select_k_star(const std::vector<double>& h, const LossSpec& spec) {
    const double best = *std::min_element(h.begin(), h.end());
    const double tol = kTieTolerance * (spec.c0 + spec.c1);
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (h[k] <= best + tol) return k;
    }
    return 0;
}

// Marks the k entries with the largest keys; equal keys go to the smaller index.
ActionVector top_k_mask(std::span<const double> keys, std::size_t k) {
    ActionVector action(keys.size(), 0);
    if (k == 0) return action;
    std::vector<std::size_t> idx(keys.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto before = [&](std::size_t i, std::size_t j) {
        return keys[i] > keys[j] || (keys[i] == keys[j] && i < j);
    };
    if (k < idx.size()) std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), before);
    for (std::size_t i = 0; i < k; ++i) action[idx[i]] = 1;
    return action;
}

// Descending order of (primary, secondary), ties broken by index.
std::vector<std::size_t> descending_order(std::span<const double> primary, std::span<const double> secondary) {
    std::vector<std::size_t> idx(primary.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        if (primary[i] != primary[j]) return primary[i] > primary[j];
        if (!secondary.empty() && secondary[i] != secondary[j]) return secondary[i] > secondary[j];
        return i < j;
    });
    return idx;
}

SolverResult finish(std::vector<double> h, ActionVector action, std::size_t k_star) {
    SolverResult out;
    out.posterior_loss = h[k_star];
    out.k_star = k_star;
    out.h_values = std::move(h);
    out.action = std::move(action);
    return out;
}

void check_kind(const LossSpec& spec, std::initializer_list<LossPairKind> allowed, const char* who) {
    if (std::find(allowed.begin(), allowed.end(), spec.kind) == allowed.end()) {
        throw ConfigurationError(std::string(who) + ": unsupported loss pair " + std::string(to_string(spec.kind)));
    }
}

}  // namespace

void PosteriorSummary::validate_for(LossPairKind kind, std::size_t m) const {
    if (phi.size() != m) throw DimensionError("posterior summary: phi has the wrong length");
    check_unit_interval(phi, "phi");
    if (kind == LossPairKind::FdpMdp) {
        if (!psi) throw ConfigurationError("FDP_MDP requires psi = E(theta / max(theta'1, 1) | x)");
        if (psi->size() != m) throw DimensionError("posterior summary: psi has the wrong length");
        check_unit_interval(*psi, "psi");
    }
    if (kind == LossPairKind::FdpAmdp) {
        if (!psi_adj) throw ConfigurationError("FDP_AMDP requires psi_adj = E(theta / (theta'1 + 1) | x)");
        if (psi_adj->size() != m) throw DimensionError("posterior summary: psi_adj has the wrong length");
        check_unit_interval(*psi_adj, "psi_adj");
    }
}

std::span<const double> PosteriorSummary::expectation(Expectation which) const {
    switch (which) {
        case Expectation::Phi: return phi;
        case Expectation::Psi:
            if (!psi) throw ConfigurationError("psi not available");
            return *psi;
        case Expectation::PsiAdj:
            if (!psi_adj) throw ConfigurationError("psi_adj not available");
            return *psi_adj;
        case Expectation::OneMinusPhi: break;
    }
    throw ConfigurationError("1 - phi is not stored; derive it from phi");
}

SolverResult solve_generic(const LossSpec& spec, const PosteriorSummary& post) {
    spec.validate();
    post.validate_for(spec.kind, spec.m);
    const std::size_t m = spec.m;
    const LossAlgebra alg = algebra_of(spec.kind);

    // All implemented pairs use h0 = 1 - theta, beta0 = 1.
    std::vector<double> type1(m);
    std::transform(post.phi.begin(), post.phi.end(), type1.begin(), [](double p) { return 1.0 - p; });
    const auto type2 = post.expectation(alg.type2_expectation);
    const double type2_total = std::accumulate(type2.begin(), type2.end(), 0.0);

    std::vector<double> h(m + 1);
    std::vector<double> e(m);
    auto build_e = [&](std::size_t k) {
        const double w0 = spec.c0 * alg.alpha0(k, m);
        const double w1 = spec.c1 * alg.alpha1(k, m);
        for (std::size_t i = 0; i < m; ++i) e[i] = w0 * type1[i] - alg.complementarity_A1 * w1 * type2[i];
        return w1;
    };
    for (std::size_t k = 0; k <= m; ++k) {
        const double w1 = build_e(k);
        double selected = 0.0;
        if (k > 0) {
            if (k < m) std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(k - 1), e.end());
            selected = std::accumulate(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
        }
        // a0' d1(k) with a0 = 1.
        h[k] = alg.complementarity_a0 * w1 * type2_total + selected;
    }
    const std::size_t k_star = select_k_star(h, spec);
    build_e(k_star);
    std::vector<double> key(m);
    std::transform(e.begin(), e.end(), key.begin(), [](double v) { return -v; });
    return finish(std::move(h), top_k_mask(key, LossAlgebra::tau0(k_star)), k_star);
}

SolverResult solve_fp_fn(const LossSpec& spec, const PosteriorSummary& post) {
    spec.validate();
    check_kind(spec, {LossPairKind::FpFn}, "solve_fp_fn");
    post.validate_for(spec.kind, spec.m);
    const std::size_t m = spec.m;
    const double threshold = spec.c0 / (spec.c0 + spec.c1);

    ActionVector action(m, 0);
    std::size_t k_star = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (post.phi[i] > threshold) {
            action[i] = 1;
            ++k_star;
        }
    }

    // H(k) = (c1 sum(phi) + sum of the k smallest (c0 (1 - phi) - c1 phi)) / M.
    const double inv_m = 1.0 / static_cast<double>(m);
    std::vector<double> e(m);
    for (std::size_t i = 0; i < m; ++i) {
        e[i] = spec.c0 * inv_m * (1.0 - post.phi[i]) - spec.c1 * inv_m * post.phi[i];
    }
    std::sort(e.begin(), e.end());
    std::vector<double> h(m + 1);
    h[0] = spec.c1 * inv_m * std::accumulate(post.phi.begin(), post.phi.end(), 0.0);
    for (std::size_t k = 1; k <= m; ++k) h[k] = h[k - 1] + e[k - 1];
    return finish(std::move(h), std::move(action), k_star);
}

SolverResult solve_fdp_fnp(const LossSpec& spec, const PosteriorSummary& post) {
    spec.validate();
    check_kind(spec, {LossPairKind::FdpFnp}, "solve_fdp_fnp");
    post.validate_for(spec.kind, spec.m);
    const std::size_t m = spec.m;
    const auto order = descending_order(post.phi, {});

    std::vector<double> prefix(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + post.phi[order[i]];
    const double total = prefix[m];

    std::vector<double> h(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        double value = 0.0;
        if (k > 0) value += spec.c0 * (static_cast<double>(k) - prefix[k]) / static_cast<double>(k);
        if (k < m) value += spec.c1 * (total - prefix[k]) / static_cast<double>(m - k);
        h[k] = value;
    }
    const std::size_t k_star = select_k_star(h, spec);
    ActionVector action(m, 0);
    for (std::size_t i = 0; i < k_star; ++i) action[order[i]] = 1;
    return finish(std::move(h), std::move(action), k_star);
}

SolverResult solve_fdp_mdp(const LossSpec& spec, const PosteriorSummary& post) {
    spec.validate();
    check_kind(spec, {LossPairKind::FdpMdp, LossPairKind::FdpAmdp}, "solve_fdp_mdp");
    post.validate_for(spec.kind, spec.m);
    const std::size_t m = spec.m;
    const auto psi = post.expectation(spec.kind == LossPairKind::FdpMdp ? Expectation::Psi : Expectation::PsiAdj);
    const auto& phi = post.phi;
    const double psi_total = std::accumulate(psi.begin(), psi.end(), 0.0);

    std::vector<double> h(m + 1);
    h[0] = spec.c1 * psi_total;

    // When phi and psi are similarly ordered, e~(k) = (c0/k) phi + c1 psi has the
    // same ranking for every k.
    const auto order = descending_order(phi, psi);
    bool same_order = true;
    for (std::size_t i = 1; i < m && same_order; ++i) same_order = psi[order[i]] <= psi[order[i - 1]];

    if (same_order) {
        double phi_sum = 0.0, psi_sum = 0.0;
        for (std::size_t k = 1; k <= m; ++k) {
            phi_sum += phi[order[k - 1]];
            psi_sum += psi[order[k - 1]];
            const double top = spec.c0 * phi_sum / static_cast<double>(k) + spec.c1 * psi_sum;
            h[k] = spec.c1 * psi_total + spec.c0 - top;
        }
        const std::size_t k_star = select_k_star(h, spec);
        ActionVector action(m, 0);
        for (std::size_t i = 0; i < k_star; ++i) action[order[i]] = 1;
        return finish(std::move(h), std::move(action), k_star);
    }

    std::vector<double> e_tilde(m);
    auto build = [&](std::size_t k) {
        const double w = spec.c0 / static_cast<double>(k);
        for (std::size_t i = 0; i < m; ++i) e_tilde[i] = w * phi[i] + spec.c1 * psi[i];
    };
    for (std::size_t k = 1; k <= m; ++k) {
        build(k);
        if (k < m) {
            std::nth_element(e_tilde.begin(), e_tilde.begin() + static_cast<std::ptrdiff_t>(k - 1), e_tilde.end(),
                             std::greater<>());
        }
        const double top = std::accumulate(e_tilde.begin(), e_tilde.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
        h[k] = spec.c1 * psi_total + spec.c0 - top;
    }
    const std::size_t k_star = select_k_star(h, spec);
    ActionVector action(m, 0);
    if (k_star > 0) {
        build(k_star);
        action = top_k_mask(e_tilde, k_star);
    }
    return finish(std::move(h), std::move(action), k_star);
}

SolverResult solve(const LossSpec& spec, const PosteriorSummary& post) {
    switch (spec.kind) {
        case LossPairKind::FpFn: return solve_fp_fn(spec, post);
        case LossPairKind::FdpFnp: return solve_fdp_fnp(spec, post);
        case LossPairKind::FdpMdp:
        case LossPairKind::FdpAmdp: return solve_fdp_mdp(spec, post);
    }
    throw ConfigurationError("invalid loss pair kind");
}

double posterior_expected_loss(const LossSpec& spec, const PosteriorSummary& post, BitSpan a) {
    spec.validate();
    post.validate_for(spec.kind, spec.m);
    if (a.size() != spec.m) throw DimensionError("posterior_expected_loss: action has the wrong length");
    const std::size_t m = spec.m;
    const std::size_t rejected = count_ones(a);
    double null_mass_rejected = 0.0;  // sum over a_m = 1 of (1 - phi_m)
    double alt_mass_accepted = 0.0;   // sum over a_m = 0 of the type-II expectation
    const LossAlgebra alg = algebra_of(spec.kind);
    const auto type2 = post.expectation(alg.type2_expectation);
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i]) {
            null_mass_rejected += 1.0 - post.phi[i];
        } else {
            alt_mass_accepted += type2[i];
        }
    }
    return spec.c0 * alg.alpha0(rejected, m) * null_mass_rejected +
           spec.c1 * alg.alpha1(rejected, m) * alt_mass_accepted;
}

namespace {

double mask_loss(const LossSpec& spec, std::uint32_t a, std::uint32_t theta, std::uint32_t all) {
    const int m = std::popcount(all);
    const int rejected = std::popcount(a);
    const int alternatives = std::popcount(theta);
    const int false_disc = std::popcount(a & ~theta & all);
    const int missed = std::popcount(~a & theta & all);
    auto guard = [](int d) { return static_cast<double>(std::max(d, 1)); };
    double l0 = 0.0, l1 = 0.0;
    switch (spec.kind) {
        case LossPairKind::FpFn:
            l0 = false_disc / static_cast<double>(m);
            l1 = missed / static_cast<double>(m);
            break;
        case LossPairKind::FdpFnp:
            l0 = false_disc / guard(rejected);
            l1 = missed / guard(m - rejected);
            break;
        case LossPairKind::FdpMdp:
            l0 = false_disc / guard(rejected);
            l1 = missed / guard(alternatives);
            break;
        case LossPairKind::FdpAmdp:
            l0 = false_disc / guard(rejected);
            l1 = missed / static_cast<double>(alternatives + 1);
            break;
    }
    return spec.c0 * l0 + spec.c1 * l1;
}

// Bit m of the mask is a_{m+1}; lexicographic order on (a_1, ..., a_M) is the
// order of the reversed mask.
ActionVector mask_to_action(std::uint32_t mask, std::size_t m) {
    ActionVector a(m);
    for (std::size_t i = 0; i < m; ++i) a[i] = (mask >> i) & 1U;
    return a;
}

template <class LossOf>
SolverResult exhaustive(std::size_t m, LossOf&& loss_of) {
    const std::uint32_t count = 1U << m;
    std::vector<double> h(m + 1, std::numeric_limits<double>::infinity());
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 0;
    // Enumerate in lexicographic order of (a_1, ..., a_M): a_1 is the most
    // significant digit of `code`.
    for (std::uint32_t code = 0; code < count; ++code) {
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < m; ++i) mask |= ((code >> (m - 1 - i)) & 1U) << i;
        const double value = loss_of(mask);
        const auto k = static_cast<std::size_t>(std::popcount(mask));
        h[k] = std::min(h[k], value);
        if (value < best) {
            best = value;
            best_mask = mask;
        }
    }
    SolverResult out;
    out.action = mask_to_action(best_mask, m);
    out.k_star = static_cast<std::size_t>(std::popcount(best_mask));
    out.h_values = std::move(h);
    out.posterior_loss = best;
    return out;
}

}  // namespace

double posterior_expected_loss(const LossSpec& spec, const PosteriorTable& table, BitSpan a) {
    spec.validate();
    if (table.m != spec.m || a.size() != spec.m || table.prob.size() != (std::size_t{1} << spec.m)) {
        throw DimensionError("posterior_expected_loss: table and action must match spec.m");
    }
    if (spec.m > kOracleMaxTableM) throw RefusalError("posterior table too large for exact loss evaluation");
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < a.size(); ++i) mask |= static_cast<std::uint32_t>(a[i] != 0) << i;
    const std::uint32_t all = (1U << spec.m) - 1U;
    double total = 0.0;
    for (std::uint32_t theta = 0; theta <= all; ++theta) total += table.prob[theta] * mask_loss(spec, mask, theta, all);
    return total;
}

SolverResult brute_force_oracle(const LossSpec& spec, const PosteriorSummary& post) {
    spec.validate();
    if (spec.m > kOracleMaxSummaryM) throw RefusalError("brute_force_oracle: M > 20 refused");
    post.validate_for(spec.kind, spec.m);
    ActionVector a(spec.m);
    return exhaustive(spec.m, [&](std::uint32_t mask) {
        for (std::size_t i = 0; i < spec.m; ++i) a[i] = (mask >> i) & 1U;
        return posterior_expected_loss(spec, post, a);
    });
}

SolverResult brute_force_oracle(const LossSpec& spec, const PosteriorTable& table) {
    spec.validate();
    if (spec.m > kOracleMaxTableM) throw RefusalError("brute_force_oracle: table oracle limited to M <= 12");
    if (table.m != spec.m || table.prob.size() != (std::size_t{1} << spec.m)) {
        throw DimensionError("brute_force_oracle: table does not match spec.m");
    }
    const std::uint32_t all = (1U << spec.m) - 1U;
    return exhaustive(spec.m, [&](std::uint32_t mask) {
        double total = 0.0;
        for (std::uint32_t theta = 0; theta <= all; ++theta) total += table.prob[theta] * mask_loss(spec, mask, theta, all);
        return total;
    });
}

}  // namespace bmdf
