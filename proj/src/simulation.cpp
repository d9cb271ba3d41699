#include "bmdf/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "bmdf/bh.hpp"
#include "bmdf/errors.hpp"
#include "bmdf/numerics.hpp"
#include "bmdf/posterior.hpp"
#include "bmdf/solver.hpp"

namespace bmdf {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

constexpr std::uint32_t kDataStream = 0x64617461u;
constexpr std::uint32_t kSmcStream = 0x736d6300u;

void draw_theta(double pi, std::size_t m, Philox4x32& rng, StateVector& theta) {
    theta.assign(m, 0);
    for (auto& t : theta) t = rng.uniform_open() < pi ? 1 : 0;
}

void require(bool ok, const char* what) {
    if (!ok) throw ConfigurationError(what);
}

void validate_params(const ScenarioParams& p, Scenario s, bool is_prior) {
    if (is_prior) {
        require(p.pi > 0.0 && p.pi < 1.0, "prior pi must lie in (0, 1)");
    } else {
        require(p.pi >= 0.0 && p.pi <= 1.0, "true pi must lie in [0, 1]");
    }
    switch (s) {
        case Scenario::CompositeGaussian: require(p.sigma > 0.0, "sigma must be positive"); break;
        case Scenario::DependentExponential:
            require(p.lambda0 > 0.0 && p.lambda1 > 0.0, "exponential rates must be positive");
            require(p.kappa > 0.0, "kappa must be positive");
            require(p.n >= 1, "n must be >= 1");
            break;
        case Scenario::TwoGroupGaussian:
            require(p.k0 > 0.0 && p.alpha > 0.0 && p.beta > 0.0, "k0, alpha, beta must be positive");
            require(p.n1 >= 1 && p.n2 >= 1, "group sizes must be >= 1");
            if (p.empirical_bayes) require(p.alpha > 1.0, "empirical Bayes needs alpha > 1");
            break;
    }
}

const char* procedure_name(LossPairKind k) {
    switch (k) {
        case LossPairKind::FpFn: return "FP_FN";
        case LossPairKind::FdpFnp: return "FDP_FNP";
        case LossPairKind::FdpMdp: return "FDP_MDP";
        case LossPairKind::FdpAmdp: return "FDP_AMDP";
    }
    return "?";
}

struct ReplicateOutput {
    std::vector<ReplicateRow> rows;
    bool saturated = false;
};

ReplicateOutput run_replicate(const ExperimentConfig& cfg, std::size_t rep) {
    ReplicateOutput out;
    const auto gen = generate(cfg.scenario, cfg.truth, cfg.m, derive_seed(cfg.seed, kDataStream, static_cast<std::uint32_t>(rep)));
    const auto assumed = assumed_model(cfg.scenario, cfg.prior, gen.data);
    if (!cfg.losses.empty()) {
        auto smc = cfg.smc;
        smc.seed = derive_seed(cfg.seed, kSmcStream, static_cast<std::uint32_t>(rep));
        const auto post = compute_posterior(assumed, gen.data, cfg.backend, smc, &out.saturated);
        for (const auto kind : cfg.losses) {
            for (const double ratio : cfg.cost_ratios) {
                const LossSpec spec{kind, ratio, 1.0, cfg.m};
                const auto res = solve(spec, post);
                out.rows.push_back({rep, procedure_name(kind), ratio, empirical_metrics(res.action, gen.theta)});
            }
        }
    }
    if (!cfg.bh_levels.empty()) {
        const auto p = p_values_for_model(assumed.model, gen.data);
        for (const double q : cfg.bh_levels) {
            out.rows.push_back({rep, "BH", q, empirical_metrics(bh_decide(p, q), gen.theta)});
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::CompositeGaussian: return "composite_gaussian";
        case Scenario::DependentExponential: return "dependent_exponential";
        case Scenario::TwoGroupGaussian: return "two_group_gaussian";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    const auto u = upper(name);
    if (u == "COMPOSITE_GAUSSIAN") return Scenario::CompositeGaussian;
    if (u == "DEPENDENT_EXPONENTIAL") return Scenario::DependentExponential;
    if (u == "TWO_GROUP_GAUSSIAN") return Scenario::TwoGroupGaussian;
    throw ConfigurationError("unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(Backend b) { return b == Backend::Exact ? "exact" : "smc"; }

Backend parse_backend(std::string_view name) {
    const auto u = upper(name);
    if (u == "EXACT") return Backend::Exact;
    if (u == "SMC") return Backend::Smc;
    throw ConfigurationError("unknown backend '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::FDP: return "FDP";
        case Metric::FNP: return "FNP";
        case Metric::MDP: return "MDP";
        case Metric::FP: return "FP";
        case Metric::FN: return "FN";
        case Metric::AMDP: return "AMDP";
    }
    return "?";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
    const auto out = Philox4x32::block({a, b, 0x5eedu, 0u},
                                       {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ExperimentConfig ExperimentConfig::defaults(Scenario scenario) {
    ExperimentConfig c;
    c.scenario = scenario;
    switch (scenario) {
        case Scenario::CompositeGaussian:
            c.truth.pi = 0.5;
            c.truth.sigma = 4.0;
            c.prior = c.truth;
            c.m = 12;
            c.n_sims = 1000;
            c.backend = Backend::Exact;
            break;
        case Scenario::DependentExponential:
            c.truth.pi = 0.3;
            c.truth.lambda0 = 1.0;
            c.truth.lambda1 = 0.5;
            c.truth.kappa = 2.0;
            c.truth.n = 30;
            c.prior = c.truth;
            c.prior.pi = 0.2;
            c.prior.kappa = 3.0;
            c.m = 500;
            c.n_sims = 20;
            c.backend = Backend::Smc;
            break;
        case Scenario::TwoGroupGaussian:
            c.truth.pi = 0.1;
            c.truth.k0 = 200.0;
            c.truth.alpha = 4.0;
            c.truth.beta = 4.0;
            c.truth.nu = 20.0;
            c.truth.n1 = c.truth.n2 = 5;
            c.prior = c.truth;
            c.m = 500;
            c.n_sims = 20;
            c.backend = Backend::Exact;
            c.losses = {LossPairKind::FpFn, LossPairKind::FdpFnp, LossPairKind::FdpAmdp};
            c.cost_ratios = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0};
            c.bh_levels = {0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
            break;
    }
    return c;
}

void ExperimentConfig::validate() const {
    require(n_sims >= 1, "n_sims must be >= 1");
    require(m >= 1, "m must be >= 1");
    require(!losses.empty() || !bh_levels.empty(), "nothing to run: no losses and no BH levels");
    require(losses.empty() || !cost_ratios.empty(), "BMDF rules need at least one cost ratio");
    for (double r : cost_ratios) require(r >= 0.0 && std::isfinite(r), "cost ratios must be finite and >= 0");
    for (double q : bh_levels) require(q > 0.0 && q < 1.0, "BH levels must lie in (0, 1)");
    validate_params(truth, scenario, false);
    validate_params(prior, scenario, true);
    require(!truth.empirical_bayes, "empirical_bayes applies to the assumed model only");
    if (prior.empirical_bayes) require(scenario == Scenario::TwoGroupGaussian, "empirical Bayes is two-group only");
    if (scenario == Scenario::TwoGroupGaussian) {
        require(prior.n1 == truth.n1 && prior.n2 == truth.n2, "assumed group sizes must match the data");
    }
    if (scenario == Scenario::DependentExponential) require(prior.n == truth.n, "assumed n must match the data");
    if (backend == Backend::Exact && scenario == Scenario::DependentExponential && m > kExactTableMaxM) {
        throw ConfigurationError("the exact backend enumerates 2^M states under dependence; use m <= 12 or the smc backend");
    }
    if (backend == Backend::Smc) smc.validate();
    require(threads >= 1, "threads must be >= 1");
}

MetricRecord empirical_metrics(BitSpan a, BitSpan theta) {
    if (a.size() != theta.size() || a.empty()) throw DimensionError("empirical_metrics: length mismatch");
    MetricRecord r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (theta[i]) {
            (a[i] ? r.counts.alt_reject : r.counts.alt_accept)++;
        } else {
            (a[i] ? r.counts.null_reject : r.counts.null_accept)++;
        }
    }
    static constexpr std::array<Proportion, 6> props{Proportion::FDP, Proportion::FNP, Proportion::MDP,
                                                     Proportion::FP,  Proportion::FN,  Proportion::AMDP};
    for (std::size_t i = 0; i < props.size(); ++i) r.values[i] = proportion(props[i], a, theta);
    return r;
}

GeneratedData generate(Scenario scenario, const ScenarioParams& truth, std::size_t m, std::uint64_t seed) {
    validate_params(truth, scenario, false);
    Philox4x32 rng(seed, kDataStream, 0);
    GeneratedData g;
    draw_theta(truth.pi, m, rng, g.theta);
    g.data.rows.resize(m);
    switch (scenario) {
        case Scenario::CompositeGaussian: {
            std::normal_distribution<double> noise(0.0, 1.0);
            for (std::size_t i = 0; i < m; ++i) {
                const double mu = g.theta[i] ? truth.sigma * noise(rng) : 0.0;
                g.data.rows[i] = {mu + noise(rng)};
            }
            break;
        }
        case Scenario::DependentExponential: {
            const std::size_t n = truth.n;
            std::size_t alts = 0;
            for (auto t : g.theta) alts += t;
            const double shape = static_cast<double>(n);
            const double rate = truth.lambda1;
            const auto quantile = [shape, rate](double u) {
                u = std::min(u, std::nextafter(1.0, 0.0));
                return boost::math::gamma_p_inv(shape, u) / rate;
            };
            const auto totals = sample_dependent_block(GammaFrailty{truth.kappa}, quantile, alts,
                                                       derive_seed(seed, kDataStream, 1));
            std::exponential_distribution<double> null_draw(truth.lambda0);
            std::exponential_distribution<double> split(1.0);
            std::size_t next_alt = 0;
            for (std::size_t i = 0; i < m; ++i) {
                auto& row = g.data.rows[i];
                row.resize(n);
                if (!g.theta[i]) {
                    for (auto& v : row) v = null_draw(rng);
                    continue;
                }
                // Uniform split of the coupled total: given T the replicates
                // are T times a flat Dirichlet vector.
                double s = 0.0;
                for (auto& v : row) {
                    v = split(rng);
                    s += v;
                }
                const double total = std::max(totals[next_alt++], std::numeric_limits<double>::min());
                for (auto& v : row) v = std::max(v * total / s, std::numeric_limits<double>::denorm_min());
            }
            break;
        }
        case Scenario::TwoGroupGaussian: {
            std::gamma_distribution<double> precision(truth.alpha, 1.0 / truth.beta);
            std::normal_distribution<double> z(0.0, 1.0);
            for (std::size_t i = 0; i < m; ++i) {
                const double tau = precision(rng);
                const double sd = 1.0 / std::sqrt(tau);
                const double spread = std::sqrt(truth.k0) * sd;
                const double mu1 = truth.nu + spread * z(rng);
                const double mu2 = g.theta[i] ? truth.nu + spread * z(rng) : mu1;
                auto& row = g.data.rows[i];
                row.resize(truth.n1 + truth.n2);
                for (std::size_t j = 0; j < row.size(); ++j) row[j] = (j < truth.n1 ? mu1 : mu2) + sd * z(rng);
            }
            break;
        }
    }
    return g;
}

AssumedModel assumed_model(Scenario scenario, const ScenarioParams& p, const DataMatrix& data) {
    AssumedModel a;
    a.prior = PriorSpec::uniform(data.size(), p.pi);
    switch (scenario) {
        case Scenario::CompositeGaussian: a.model = GaussianSpike{p.sigma * p.sigma}; break;
        case Scenario::DependentExponential:
            a.model = ExponentialPair{p.lambda0, p.lambda1, p.n};
            a.frailty = GammaFrailty{p.kappa};
            break;
        case Scenario::TwoGroupGaussian:
            if (p.empirical_bayes) {
                a.model = empirical_bayes_two_group(p.k0, p.alpha, p.n1, p.n2, data);
            } else {
                a.model = TwoGroupGaussian{p.k0, p.alpha, {p.beta}, {p.nu}, p.n1, p.n2};
            }
            break;
    }
    return a;
}

PosteriorSummary compute_posterior(const AssumedModel& assumed, const DataMatrix& data, Backend backend,
                                   const SmcConfig& smc, bool* saturated) {
    if (backend == Backend::Smc) {
        auto cfg = smc;
        cfg.estimands = {Estimand::Phi, Estimand::Psi, Estimand::PsiAdj};
        const auto est = run_smc(cfg, assumed.prior, assumed.model, assumed.frailty, data);
        if (saturated) *saturated = *saturated || est.saturated;
        return est.summary();
    }
    if (assumed.frailty) {
        return summarize(exact_posterior_table(assumed.prior, assumed.model, assumed.frailty, data));
    }
    return independent_summary(posterior_mean_simple(assumed.prior, assumed.model, data));
}

const RiskCell& RiskReport::cell(std::string_view procedure, double parameter) const {
    for (const auto& c : cells) {
        if (c.procedure == procedure && std::fabs(c.parameter - parameter) <= 1e-12 * std::max(1.0, parameter)) return c;
    }
    throw ConfigurationError("no report cell for " + std::string(procedure));
}

void RiskReport::write_curve_csv(std::ostream& out) const {
    out << "procedure,parameter,metric,mean,se,n\n";
    out.precision(10);
    for (const auto& c : cells) {
        for (const auto metric : kAllMetrics) {
            out << c.procedure << ',' << c.parameter << ',' << to_string(metric) << ',' << c.mean_of(metric) << ','
                << c.se_of(metric) << ',' << c.n << '\n';
        }
    }
}

void RiskReport::write_replicates_csv(std::ostream& out) const {
    out << "replicate,procedure,parameter,null_accept,null_reject,alt_accept,alt_reject,FDP,FNP,MDP,FP,FN,AMDP\n";
    out.precision(10);
    for (const auto& r : replicates) {
        const auto& k = r.metrics.counts;
        out << r.replicate << ',' << r.procedure << ',' << r.parameter << ',' << k.null_accept << ',' << k.null_reject
            << ',' << k.alt_accept << ',' << k.alt_reject;
        for (double v : r.metrics.values) out << ',' << v;
        out << '\n';
    }
}

RiskReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<ReplicateOutput> outputs(config.n_sims);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= config.n_sims) return;
            try {
                outputs[rep] = run_replicate(config, rep);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = config.n_sims;
                return;
            }
        }
    };
    const std::size_t workers = std::min(config.threads, config.n_sims);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    RiskReport report;
    // Cells in first-appearance order; values gathered per cell then reduced pairwise.
    const std::size_t per_rep = outputs.front().rows.size();
    for (std::size_t j = 0; j < per_rep; ++j) {
        RiskCell cell;
        cell.procedure = outputs.front().rows[j].procedure;
        cell.parameter = outputs.front().rows[j].parameter;
        cell.n = config.n_sims;
        for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
            std::vector<double> v(config.n_sims), sq(config.n_sims);
            for (std::size_t rep = 0; rep < config.n_sims; ++rep) v[rep] = outputs[rep].rows[j].metrics.values[k];
            const double mean = num::pairwise_sum(v) / static_cast<double>(config.n_sims);
            for (std::size_t rep = 0; rep < config.n_sims; ++rep) sq[rep] = (v[rep] - mean) * (v[rep] - mean);
            const double n = static_cast<double>(config.n_sims);
            cell.mean[k] = mean;
            cell.se[k] = config.n_sims > 1 ? std::sqrt(num::pairwise_sum(sq) / (n - 1.0) / n) : 0.0;
        }
        report.cells.push_back(std::move(cell));
    }
    for (auto& o : outputs) {
        report.saturated = report.saturated || o.saturated;
        if (config.keep_replicates) {
            for (auto& row : o.rows) report.replicates.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace bmdf
