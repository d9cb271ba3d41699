#include "bmdf/models.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"

namespace bmdf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigurationError(std::string(name) + " must be a finite positive number");
    }
}

void check_row(RowView x, std::size_t expected, std::size_t m) {
    if (x.size() != expected) {
        throw DimensionError("row " + std::to_string(m) + " has " + std::to_string(x.size()) + " values, expected " +
                             std::to_string(expected));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("row " + std::to_string(m) + " contains a non-finite value");
    }
}

double row_sum(RowView x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

double exponential_sum(const ExponentialPair& e, RowView x, std::size_t m) {
    check_row(x, e.n, m);
    for (double v : x) {
        if (!(v > 0.0)) throw DomainError("exponential observations must be positive (row " + std::to_string(m) + ")");
    }
    return row_sum(x);
}

// log of the normal-inverse-gamma marginal of a two-group row.
double two_group_log_marginal(const TwoGroupGaussian& t, int hypothesis, RowView x, std::size_t m) {
    check_row(x, t.n1 + t.n2, m);
    const auto st = two_group_stats(x, t.n1, t.n2);
    const double nu = t.nu_at(m);
    const double beta = t.beta_at(m);
    const double n1 = static_cast<double>(t.n1), n2 = static_cast<double>(t.n2);
    const double n = n1 + n2;
    double q = 0.0, log_det = 0.0;
    if (hypothesis == 1) {
        const double d1 = st.mean1 - nu, d2 = st.mean2 - nu;
        q = st.ss1 + st.ss2 + n1 * d1 * d1 / (1.0 + n1 * t.k0) + n2 * d2 * d2 / (1.0 + n2 * t.k0);
        log_det = std::log1p(n1 * t.k0) + std::log1p(n2 * t.k0);
    } else {
        const double d = st.mean_all - nu;
        q = st.ss_all + n * d * d / (1.0 + n * t.k0);
        log_det = std::log1p(n * t.k0);
    }
    const double a_post = t.alpha + 0.5 * n;
    return -0.5 * n * std::log(2.0 * std::numbers::pi) + t.alpha * std::log(beta) - std::lgamma(t.alpha) +
           std::lgamma(a_post) - a_post * std::log(beta + 0.5 * q) - 0.5 * log_det;
}

double gaussian_log_lik(RowView x, double mu1, double mu2, double tau, std::size_t n1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - (i < n1 ? mu1 : mu2);
        ss += d * d;
    }
    const double n = static_cast<double>(x.size());
    return 0.5 * n * (std::log(tau) - std::log(2.0 * std::numbers::pi)) - 0.5 * tau * ss;
}

void check_hypothesis(int h) {
    if (h != 0 && h != 1) throw ConfigurationError("hypothesis must be 0 or 1");
}

}  // namespace

void PriorSpec::validate() const {
    if (pi.empty()) throw DimensionError("prior: empty probability vector");
    for (double p : pi) {
        if (!(p > 0.0 && p < 1.0)) throw ConfigurationError("prior probabilities must lie in the open interval (0, 1)");
    }
}

TwoGroupStats two_group_stats(RowView x, std::size_t n1, std::size_t n2) {
    if (x.size() != n1 + n2 || n1 == 0 || n2 == 0) throw DimensionError("two-group row has the wrong length");
    TwoGroupStats s;
    for (std::size_t i = 0; i < n1; ++i) s.mean1 += x[i];
    for (std::size_t i = n1; i < n1 + n2; ++i) s.mean2 += x[i];
    s.mean_all = (s.mean1 + s.mean2) / static_cast<double>(n1 + n2);
    s.mean1 /= static_cast<double>(n1);
    s.mean2 /= static_cast<double>(n2);
    for (std::size_t i = 0; i < n1 + n2; ++i) {
        const double d = x[i] - (i < n1 ? s.mean1 : s.mean2);
        const double e = x[i] - s.mean_all;
        (i < n1 ? s.ss1 : s.ss2) += d * d;
        s.ss_all += e * e;
    }
    return s;
}

void validate_model(const MarginalModel& model) {
    std::visit(overloaded{
                   [](const SimpleDensityPair& s) {
                       if (!s.log_q0 || !s.log_q1) throw ConfigurationError("density pair needs both log densities");
                   },
                   [](const GaussianSpike& g) { require_positive(g.sigma2, "sigma2"); },
                   [](const TwoGroupGaussian& t) {
                       require_positive(t.k0, "k0");
                       require_positive(t.alpha, "alpha");
                       if (t.beta.empty() || t.nu.empty()) throw ConfigurationError("two-group beta/nu missing");
                       for (double b : t.beta) require_positive(b, "beta");
                       for (double v : t.nu) {
                           if (!std::isfinite(v)) throw ConfigurationError("nu must be finite");
                       }
                       if (t.n1 < 1 || t.n2 < 1) throw ConfigurationError("two-group sizes must be >= 1");
                   },
                   [](const ExponentialPair& e) {
                       require_positive(e.lambda0, "lambda0");
                       require_positive(e.lambda1, "lambda1");
                       if (e.n < 1) throw ConfigurationError("exponential replicate count must be >= 1");
                   },
               },
               model);
}

void validate_data(const MarginalModel& model, const DataMatrix& data) {
    validate_model(model);
    if (data.size() == 0) throw DimensionError("data matrix has no rows");
    if (const auto* t = std::get_if<TwoGroupGaussian>(&model)) {
        if (t->beta.size() != 1 && t->beta.size() != data.size()) throw DimensionError("beta length mismatch");
        if (t->nu.size() != 1 && t->nu.size() != data.size()) throw DimensionError("nu length mismatch");
    }
    for (std::size_t m = 0; m < data.size(); ++m) {
        const auto x = data.row(m);
        std::visit(overloaded{
                       [&](const SimpleDensityPair&) {
                           if (x.empty()) throw DimensionError("empty row " + std::to_string(m));
                       },
                       [&](const GaussianSpike&) { check_row(x, 1, m); },
                       [&](const TwoGroupGaussian& t) { check_row(x, t.n1 + t.n2, m); },
                       [&](const ExponentialPair& e) { exponential_sum(e, x, m); },
                   },
                   model);
    }
}

ComponentLikelihood evaluate_component(const MarginalModel& model, RowView x, std::size_t m) {
    return std::visit(
        overloaded{
            [&](const SimpleDensityPair& s) {
                ComponentLikelihood c{s.log_q0(x), s.log_q1(x), std::nullopt};
                if (s.log_cdf1) c.log_cdf1 = s.log_cdf1(x);
                return c;
            },
            [&](const GaussianSpike& g) {
                check_row(x, 1, m);
                const double v1 = 1.0 + g.sigma2;
                return ComponentLikelihood{num::log_normal_pdf(x[0], 0.0, 1.0), num::log_normal_pdf(x[0], 0.0, v1),
                                           num::log_normal_cdf(x[0] / std::sqrt(v1))};
            },
            [&](const TwoGroupGaussian& t) {
                return ComponentLikelihood{two_group_log_marginal(t, 0, x, m), two_group_log_marginal(t, 1, x, m),
                                           std::nullopt};
            },
            [&](const ExponentialPair& e) {
                const double s = exponential_sum(e, x, m);
                const double n = static_cast<double>(e.n);
                return ComponentLikelihood{n * std::log(e.lambda0) - e.lambda0 * s,
                                           n * std::log(e.lambda1) - e.lambda1 * s,
                                           num::log_gamma_cdf(s, n, e.lambda1)};
            },
        },
        model);
}

double log_marginal_likelihood(const MarginalModel& model, int hypothesis, RowView x, std::size_t m) {
    check_hypothesis(hypothesis);
    const auto c = evaluate_component(model, x, m);
    return hypothesis == 0 ? c.log_q0 : c.log_q1;
}

bool is_composite(const MarginalModel& model) {
    return std::holds_alternative<GaussianSpike>(model) || std::holds_alternative<TwoGroupGaussian>(model);
}

bool supports_copula(const MarginalModel& model) {
    if (const auto* s = std::get_if<SimpleDensityPair>(&model)) return static_cast<bool>(s->log_cdf1);
    return !std::holds_alternative<TwoGroupGaussian>(model);
}

Nuisance sample_nuisance(const MarginalModel& model, int hypothesis, std::size_t m, Philox4x32& rng) {
    check_hypothesis(hypothesis);
    return std::visit(overloaded{
                          [&](const GaussianSpike& g) -> Nuisance {
                              if (hypothesis == 0) return {0.0, 0.0, 0.0};
                              std::normal_distribution<double> nd(0.0, std::sqrt(g.sigma2));
                              return {nd(rng), 0.0, 0.0};
                          },
                          [&](const TwoGroupGaussian& t) -> Nuisance {
                              std::gamma_distribution<double> gd(t.alpha, 1.0 / t.beta_at(m));
                              const double tau = gd(rng);
                              std::normal_distribution<double> nd(t.nu_at(m), std::sqrt(t.k0 / tau));
                              const double mu1 = nd(rng);
                              const double mu2 = hypothesis == 0 ? mu1 : nd(rng);
                              return {mu1, mu2, tau};
                          },
                          [](const auto&) -> Nuisance { return {0.0, 0.0, 0.0}; },
                      },
                      model);
}

ConditionalLikelihood conditional_likelihood(const MarginalModel& model, int hypothesis, RowView x, std::size_t m,
                                             const Nuisance& nuisance) {
    check_hypothesis(hypothesis);
    return std::visit(overloaded{
                          [&](const GaussianSpike&) {
                              check_row(x, 1, m);
                              const double mu = hypothesis == 0 ? 0.0 : nuisance[0];
                              return ConditionalLikelihood{num::log_normal_pdf(x[0], mu, 1.0),
                                                           num::log_normal_cdf(x[0] - mu)};
                          },
                          [&](const TwoGroupGaussian& t) {
                              check_row(x, t.n1 + t.n2, m);
                              return ConditionalLikelihood{
                                  gaussian_log_lik(x, nuisance[0], nuisance[1], nuisance[2], t.n1), std::nullopt};
                          },
                          [&](const auto&) {
                              const auto c = evaluate_component(model, x, m);
                              if (hypothesis == 0) return ConditionalLikelihood{c.log_q0, std::nullopt};
                              return ConditionalLikelihood{c.log_q1, c.log_cdf1};
                          },
                      },
                      model);
}

double log_plugin_likelihood(const MarginalModel& model, int hypothesis, RowView x, std::size_t m) {
    check_hypothesis(hypothesis);
    return std::visit(overloaded{
                          [&](const GaussianSpike&) {
                              check_row(x, 1, m);
                              // MLE of mu is x itself under the alternative.
                              return hypothesis == 0 ? num::log_normal_pdf(x[0], 0.0, 1.0)
                                                     : num::log_normal_pdf(0.0, 0.0, 1.0);
                          },
                          [&](const TwoGroupGaussian& t) {
                              check_row(x, t.n1 + t.n2, m);
                              const auto st = two_group_stats(x, t.n1, t.n2);
                              const double n = static_cast<double>(t.n1 + t.n2);
                              const double ss = hypothesis == 0 ? st.ss_all : st.ss1 + st.ss2;
                              if (!(ss > 0.0)) {
                                  throw DegenerateLikelihoodError("zero within-group spread in row " +
                                                                  std::to_string(m));
                              }
                              return -0.5 * n * (std::log(2.0 * std::numbers::pi * ss / n) + 1.0);
                          },
                          [&](const auto&) { return log_marginal_likelihood(model, hypothesis, x, m); },
                      },
                      model);
}

}  // namespace bmdf
