#include "bmdf/poisson_binomial.hpp"

#include <algorithm>

#include "bmdf/errors.hpp"

namespace bmdf {

std::vector<double> poisson_binomial_pmf(std::span<const double> p) {
    std::vector<double> pmf(p.size() + 1, 0.0);
    pmf[0] = 1.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double q = p[j];
        for (std::size_t s = j + 1; s > 0; --s) pmf[s] = pmf[s] * (1.0 - q) + pmf[s - 1] * q;
        pmf[0] *= 1.0 - q;
    }
    return pmf;
}

std::vector<double> remove_bernoulli(std::span<const double> pmf, double p) {
    if (pmf.empty()) throw DimensionError("remove_bernoulli: empty distribution");
    const std::size_t n = pmf.size() - 1;  // support of the reduced sum is 0..n-1
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    if (p <= 0.5) {
        // pmf[s] = (1 - p) out[s] + p out[s - 1]
        const double q = 1.0 - p;
        double prev = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            prev = (pmf[s] - p * prev) / q;
            out[s] = std::max(prev, 0.0);
        }
    } else {
        // pmf[s] = (1 - p) out[s] + p out[s - 1], solved from the top.
        const double q = 1.0 - p;
        double next = 0.0;
        for (std::size_t s = n; s > 0; --s) {
            next = (pmf[s] - q * next) / p;
            out[s - 1] = std::max(next, 0.0);
        }
    }
    return out;
}

std::vector<double> psi_exact_independent(std::span<const double> phi, bool adjusted) {
    for (double x : phi) {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("psi_exact_independent: phi must lie in [0, 1]");
    }
    const auto pmf = poisson_binomial_pmf(phi);
    const double offset = adjusted ? 2.0 : 1.0;
    std::vector<double> psi(phi.size());
    for (std::size_t m = 0; m < phi.size(); ++m) {
        if (phi[m] == 0.0) {
            psi[m] = 0.0;
            continue;
        }
        const auto rest = remove_bernoulli(pmf, phi[m]);
        double expectation = 0.0;
        for (std::size_t s = 0; s < rest.size(); ++s) expectation += rest[s] / (static_cast<double>(s) + offset);
        psi[m] = phi[m] * expectation;
    }
    return psi;
}

}  // namespace bmdf
