#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bmdf/copula.hpp"
#include "bmdf/loss.hpp"
#include "bmdf/models.hpp"
#include "bmdf/smc.hpp"

namespace bmdf {

enum class Scenario {
    CompositeGaussian,     // x_m ~ N(mu_m, 1), mu_m = 0 or N(0, sigma^2)
    DependentExponential,  // exponential replicates, alternatives frailty-coupled
    TwoGroupGaussian,      // two-group conjugate normal model
};

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

enum class Backend { Exact, Smc };
std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

// One parameter set for a scenario; used for both the data-generating truth and
// the (possibly misspecified) model the decision rule assumes.
struct ScenarioParams {
    double pi = 0.5;  // P(theta_m = 1)
    // CompositeGaussian
    double sigma = 4.0;  // standard deviation of the alternative means
    // DependentExponential
    double lambda0 = 1.0, lambda1 = 0.5, kappa = 2.0;
    std::size_t n = 30;
    // TwoGroupGaussian
    double k0 = 200.0, alpha = 4.0, beta = 4.0, nu = 20.0;
    std::size_t n1 = 5, n2 = 5;
    bool empirical_bayes = false;  // assumed model only: nu, beta from the data
};

struct ExperimentConfig {
    Scenario scenario = Scenario::CompositeGaussian;
    ScenarioParams truth;
    ScenarioParams prior;
    std::vector<LossPairKind> losses{LossPairKind::FpFn, LossPairKind::FdpFnp, LossPairKind::FdpMdp};
    std::vector<double> cost_ratios{1.0};  // c0 / c1 (c1 = 1)
    std::vector<double> bh_levels{0.05};
    std::size_t n_sims = 20;
    std::size_t m = 12;
    std::uint64_t seed = 1;
    Backend backend = Backend::Exact;
    SmcConfig smc;
    std::size_t threads = 1;
    bool keep_replicates = true;

    // Reference settings per scenario (n_sims reduced to 20 for the larger ones).
    static ExperimentConfig defaults(Scenario scenario);
    void validate() const;
};

struct ConfusionCounts {
    std::size_t null_accept = 0, null_reject = 0, alt_accept = 0, alt_reject = 0;
};

enum class Metric { FDP, FNP, MDP, FP, FN, AMDP };
inline constexpr std::array<Metric, 6> kAllMetrics{Metric::FDP, Metric::FNP, Metric::MDP,
                                                   Metric::FP,  Metric::FN,  Metric::AMDP};
std::string_view to_string(Metric metric);

struct MetricRecord {
    std::array<double, 6> values{};  // indexed by Metric
    ConfusionCounts counts;

    double operator[](Metric metric) const { return values[static_cast<std::size_t>(metric)]; }
};

MetricRecord empirical_metrics(BitSpan a, BitSpan theta);

struct GeneratedData {
    StateVector theta;
    DataMatrix data;
};

// Draws theta from the true prior, nuisance parameters, then the data.
GeneratedData generate(Scenario scenario, const ScenarioParams& truth, std::size_t m, std::uint64_t seed);

// The model a decision rule assumes, given the data (needed for empirical Bayes).
struct AssumedModel {
    PriorSpec prior;
    MarginalModel model;
    std::optional<GammaFrailty> frailty;
};
AssumedModel assumed_model(Scenario scenario, const ScenarioParams& params, const DataMatrix& data);

// Procedure labels: "FP_FN", "FDP_FNP", "FDP_MDP", "FDP_AMDP", "BH".
struct RiskCell {
    std::string procedure;
    double parameter = 0.0;  // cost ratio for BMDF rules, FDR level for BH
    std::array<double, 6> mean{};
    std::array<double, 6> se{};
    std::size_t n = 0;

    double mean_of(Metric metric) const { return mean[static_cast<std::size_t>(metric)]; }
    double se_of(Metric metric) const { return se[static_cast<std::size_t>(metric)]; }
};

struct ReplicateRow {
    std::size_t replicate = 0;
    std::string procedure;
    double parameter = 0.0;
    MetricRecord metrics;
};

struct RiskReport {
    std::vector<RiskCell> cells;
    std::vector<ReplicateRow> replicates;
    bool saturated = false;  // SMC reported CDF clamping somewhere

    const RiskCell& cell(std::string_view procedure, double parameter) const;

    // procedure,parameter,metric,mean,se,n
    void write_curve_csv(std::ostream& out) const;
    // replicate,procedure,parameter,null_accept,null_reject,alt_accept,alt_reject,FDP,FNP,MDP,FP,FN,AMDP
    void write_replicates_csv(std::ostream& out) const;
};

// Runs every replicate, procedure and sweep value.
RiskReport run_experiment(const ExperimentConfig& config);

// Posterior summary of one data set under the assumed model and backend.
PosteriorSummary compute_posterior(const AssumedModel& assumed, const DataMatrix& data, Backend backend,
                                   const SmcConfig& smc, bool* saturated = nullptr);

// Deterministic 64-bit seed for a sub-task.
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t a, std::uint32_t b);

}  // namespace bmdf
