#include "bmdf/copula.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/rng.hpp"

namespace bmdf {

void GammaFrailty::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigurationError("frailty kappa must be finite and positive");
}

double GammaFrailty::laplace(double u) const {
    if (!(u >= 0.0)) throw DomainError("laplace: argument must be >= 0");
    if (std::isinf(u)) return 0.0;
    return std::exp(-kappa * std::log1p(u / kappa));
}

double GammaFrailty::generator_inverse(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("generator_inverse: argument must lie in (0, 1]");
    if (t == 0.0) return std::numeric_limits<double>::infinity();
    return kappa * std::expm1(-std::log(t) / kappa);
}

double GammaFrailty::copula_value(std::span<const double> u) const {
    double s = 0.0;
    for (double v : u) {
        if (!(v > 0.0 && v <= 1.0)) throw DomainError("copula_value: arguments must lie in (0, 1]");
        s += generator_inverse(v);
    }
    return laplace(s);
}

CopulaState block_log_density_step_log(const GammaFrailty& frailty, const CopulaState& state, double log_F,
                                       double log_f) {
    const double kappa = frailty.kappa;
    CopulaState next = state;
    const double lo = std::log(kCdfFloor);
    const double hi = std::log(std::nextafter(1.0, 0.0));
    if (!(log_F >= lo)) {
        log_F = lo;
        next.saturated = true;
    } else if (log_F > hi) {
        log_F = hi;
        next.saturated = true;
    }
    // generator_inverse(F) / kappa = e^b - 1 with b = -log(F)/kappa > 0.
    const double b = -log_F / kappa;
    const double log_g = b < 30.0 ? std::log(std::expm1(b)) : b + std::log1p(-std::exp(-b));
    next.log_w = num::log_add_exp(state.log_w, log_g);
    next.s = state.s + kappa * std::expm1(b);
    const double k = static_cast<double>(state.k);
    next.log_density = state.log_density + std::log1p(k / kappa) - (kappa + k + 1.0) * next.log_w +
                       (kappa + k) * state.log_w + log_f - (1.0 + 1.0 / kappa) * log_F;
    next.k = state.k + 1;
    return next;
}

CopulaState block_log_density_step(const GammaFrailty& frailty, const CopulaState& state, double F, double f) {
    if (!(f > 0.0)) throw DomainError("block_log_density_step: density must be positive");
    if (std::isnan(F)) throw DomainError("block_log_density_step: CDF value is NaN");
    return block_log_density_step_log(frailty, state, F > 0.0 ? std::log(F) : num::kNegInf, std::log(f));
}

double block_log_density(const GammaFrailty& frailty, std::span<const double> F, std::span<const double> f) {
    if (F.size() != f.size()) throw DimensionError("block_log_density: length mismatch");
    const double kappa = frailty.kappa;
    double s = 0.0, out = 0.0;
    for (std::size_t t = 0; t < F.size(); ++t) {
        s += frailty.generator_inverse(F[t]);
        out += std::log(f[t]) - (1.0 + 1.0 / kappa) * std::log(F[t]);
    }
    const double k = static_cast<double>(F.size());
    for (std::size_t j = 0; j < F.size(); ++j) out += std::log1p(static_cast<double>(j) / kappa);
    return out - (kappa + k) * std::log1p(s / kappa);
}

std::vector<double> sample_dependent_block(const GammaFrailty& frailty,
                                           const std::vector<std::function<double(double)>>& quantiles,
                                           std::uint64_t seed) {
    frailty.validate();
    Philox4x32 rng(seed, 0x636f70u, 0);
    std::gamma_distribution<double> frail(frailty.kappa, 1.0 / frailty.kappa);
    const double z = frail(rng);
    std::vector<double> out(quantiles.size());
    for (std::size_t t = 0; t < quantiles.size(); ++t) {
        const double e = -std::log(rng.uniform_open());
        double u = frailty.laplace(e / z);
        u = std::max(u, std::numeric_limits<double>::min());
        out[t] = quantiles[t](u);
    }
    return out;
}

std::vector<double> sample_dependent_block(const GammaFrailty& frailty, const std::function<double(double)>& quantile,
                                           std::size_t count, std::uint64_t seed) {
    return sample_dependent_block(frailty, std::vector<std::function<double(double)>>(count, quantile), seed);
}

}  // namespace bmdf
