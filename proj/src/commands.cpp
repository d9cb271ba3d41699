#include "bmdf/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bmdf/bh.hpp"
#include "bmdf/errors.hpp"
#include "bmdf/posterior.hpp"
#include "bmdf/smc.hpp"

namespace bmdf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxSize = std::numeric_limits<std::uint32_t>::max();

const std::vector<std::string> kKnownSections{"decide", "model", "smc", "simulate", "truth", "prior", "bench"};

const std::vector<std::string> kParamKeys{"pi", "sigma", "lambda0", "lambda1", "kappa", "n",
                                          "k0", "alpha", "beta",    "nu",      "n1",    "n2"};

std::vector<std::string> keys_for(const std::string& section, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const auto& n : names) out.push_back(section + "." + n);
    return out;
}

// Keys of `sections` must be in `allowed`; sections outside kKnownSections are rejected.
void check_keys(const RunConfig& cfg, const std::vector<std::string>& sections, const std::vector<std::string>& allowed) {
    for (const auto& line : cfg.entries()) {
        const auto key = line.substr(0, line.find(' '));
        const auto section = key.substr(0, key.find('.'));
        if (std::find(kKnownSections.begin(), kKnownSections.end(), section) == kKnownSections.end()) {
            throw ConfigurationError("unknown configuration section [" + section + "]");
        }
        if (std::find(sections.begin(), sections.end(), section) == sections.end()) continue;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigurationError("unknown configuration key '" + key + "'");
        }
    }
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

SmcConfig smc_from_config(const RunConfig& cfg, std::uint64_t seed) {
    SmcConfig s;
    s.r = cfg.get_size("smc.particles", 1000, 2, kMaxSize);
    s.rho = cfg.get_double("smc.rho", 0.5, std::numeric_limits<double>::min(), 1.0);
    s.seed = seed;
    const auto scheme = lower(cfg.get_string("smc.scheme", "multinomial"));
    if (scheme == "multinomial") {
        s.scheme = ResamplingScheme::Multinomial;
    } else if (scheme == "systematic") {
        s.scheme = ResamplingScheme::Systematic;
    } else {
        throw ConfigurationError("smc.scheme must be multinomial or systematic");
    }
    const auto mode = lower(cfg.get_string("smc.mode", "auto"));
    if (mode == "auto") {
        s.mode = SmcMode::Auto;
    } else if (mode == "simple") {
        s.mode = SmcMode::Simple;
    } else if (mode == "composite") {
        s.mode = SmcMode::Composite;
    } else {
        throw ConfigurationError("smc.mode must be auto, simple or composite");
    }
    return s;
}

ScenarioParams params_from_config(const RunConfig& cfg, const std::string& section, ScenarioParams p) {
    const auto k = [&](const char* name) { return section + "." + name; };
    p.pi = cfg.get_double(k("pi"), p.pi, 0.0, 1.0);
    p.sigma = cfg.get_double(k("sigma"), p.sigma, 0.0, kInf);
    p.lambda0 = cfg.get_double(k("lambda0"), p.lambda0, 0.0, kInf);
    p.lambda1 = cfg.get_double(k("lambda1"), p.lambda1, 0.0, kInf);
    p.kappa = cfg.get_double(k("kappa"), p.kappa, 0.0, kInf);
    p.n = cfg.get_size(k("n"), p.n, 1, kMaxSize);
    p.k0 = cfg.get_double(k("k0"), p.k0, 0.0, kInf);
    p.alpha = cfg.get_double(k("alpha"), p.alpha, 0.0, kInf);
    p.beta = cfg.get_double(k("beta"), p.beta, 0.0, kInf);
    p.nu = cfg.get_double(k("nu"), p.nu, -kInf, kInf);
    p.n1 = cfg.get_size(k("n1"), p.n1, 1, kMaxSize);
    p.n2 = cfg.get_size(k("n2"), p.n2, 1, kMaxSize);
    if (section == "prior") p.empirical_bayes = cfg.get_bool(k("empirical_bayes"), p.empirical_bayes);
    return p;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write '" + path + "'");
    return out;
}

}  // namespace

DecideResult decide(const RunConfig& cfg, const TwoGroupCsv& csv, std::uint64_t seed) {
    auto allowed = keys_for("decide", {"input", "n1", "n2", "loss", "c0", "c1", "backend", "bh_level"});
    for (auto& k : keys_for("model", {"pi", "k0", "alpha", "beta", "nu", "empirical_bayes", "kappa"})) allowed.push_back(k);
    for (auto& k : keys_for("smc", {"particles", "rho", "scheme", "mode"})) allowed.push_back(k);
    check_keys(cfg, {"decide", "model", "smc"}, allowed);

    const std::size_t cols = csv.value_columns();
    std::size_t n1 = 0, n2 = 0;
    const bool has1 = cfg.has("decide.n1"), has2 = cfg.has("decide.n2");
    if (has1 || has2) {
        n1 = has1 ? cfg.get_size("decide.n1", 0, 0, kMaxSize) : 0;
        n2 = has2 ? cfg.get_size("decide.n2", 0, 0, kMaxSize) : 0;
        if (!has1) n1 = cols >= n2 ? cols - n2 : 0;
        if (!has2) n2 = cols >= n1 ? cols - n1 : 0;
    } else {
        if (cols % 2 != 0) throw ConfigurationError("odd number of value columns; set decide.n1 and decide.n2");
        n1 = n2 = cols / 2;
    }
    if (n1 + n2 != cols) {
        throw ConfigurationError("decide.n1 + decide.n2 = " + std::to_string(n1 + n2) + " but the CSV has " +
                                 std::to_string(cols) + " value columns");
    }
    if (n1 < 2 || n2 < 2) throw ConfigurationError("each group needs at least two replicates");

    const double pi = cfg.get_double("model.pi", 0.1, 0.0, 1.0);
    const double k0 = cfg.get_double("model.k0", 200.0, 0.0, kInf);
    const double alpha = cfg.get_double("model.alpha", 4.0, 0.0, kInf);
    if (cfg.has("model.kappa")) {
        throw ConfigurationError("model.kappa: the two-group model has no scalar CDF, so frailty coupling is unavailable");
    }
    AssumedModel assumed;
    assumed.prior = PriorSpec::uniform(csv.data.size(), pi);
    if (cfg.get_bool("model.empirical_bayes", false)) {
        if (cfg.has("model.nu") || cfg.has("model.beta")) {
            throw ConfigurationError("model.nu and model.beta are estimated when model.empirical_bayes is set");
        }
        assumed.model = empirical_bayes_two_group(k0, alpha, n1, n2, csv.data);
    } else {
        assumed.model = TwoGroupGaussian{k0, alpha, {cfg.get_double("model.beta", 4.0, 0.0, kInf)},
                                         {cfg.get_double("model.nu", 20.0, -kInf, kInf)}, n1, n2};
    }
    validate_data(assumed.model, csv.data);

    DecideResult r;
    r.ids = csv.ids;
    r.spec = LossSpec{parse_loss_pair(cfg.get_string("decide.loss", "FDP_FNP")), cfg.get_double("decide.c0", 1.0, 0.0, kInf),
                      cfg.get_double("decide.c1", 1.0, 0.0, kInf), csv.data.size()};
    r.spec.validate();
    const auto backend = parse_backend(cfg.get_string("decide.backend", "exact"));
    r.posterior = compute_posterior(assumed, csv.data, backend, smc_from_config(cfg, seed));
    r.solution = solve(r.spec, r.posterior);

    std::vector<std::size_t> order(csv.data.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return r.posterior.phi[a] > r.posterior.phi[b];
    });
    r.rank.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) r.rank[order[i]] = i + 1;

    if (cfg.has("decide.bh_level")) {
        r.bh_level = cfg.get_double("decide.bh_level", 0.05, 0.0, 1.0);
        r.bh_action = bh_decide(p_values_for_model(assumed.model, csv.data), *r.bh_level);
    }
    return r;
}

void write_decisions(std::ostream& out, const DecideResult& r) {
    out << "id,phi,action,rank";
    if (r.bh_level) out << ",bh_action";
    out << '\n';
    out.precision(12);
    for (std::size_t m = 0; m < r.ids.size(); ++m) {
        out << r.ids[m] << ',' << r.posterior.phi[m] << ',' << static_cast<int>(r.solution.action[m]) << ','
            << r.rank[m];
        if (r.bh_level) out << ',' << static_cast<int>(r.bh_action[m]);
        out << '\n';
    }
}

void write_decide_summary(std::ostream& out, const DecideResult& r, const RunConfig& config, std::uint64_t seed) {
    out.precision(12);
    out << "components = " << r.ids.size() << '\n';
    out << "loss = " << to_string(r.spec.kind) << '\n';
    out << "k_star = " << r.solution.k_star << '\n';
    out << "posterior_loss = " << r.solution.posterior_loss << '\n';
    if (r.bh_level) {
        std::size_t bh = 0, covered = 0;
        for (std::size_t m = 0; m < r.bh_action.size(); ++m) {
            bh += r.bh_action[m];
            covered += r.bh_action[m] && r.solution.action[m];
        }
        out << "bh_level = " << *r.bh_level << '\n';
        out << "bh_rejections = " << bh << '\n';
        out << "bh_within_bmdf = " << (covered == bh ? "true" : "false") << '\n';
    }
    out << "seed = " << seed << '\n';
    out << "[settings]\n";
    for (const auto& e : config.entries()) out << e << '\n';
}

ExperimentConfig experiment_from_config(const RunConfig& cfg, std::uint64_t seed, std::size_t threads) {
    auto allowed = keys_for("simulate", {"scenario", "n_sims", "m", "backend", "losses", "cost_ratios", "bh_levels",
                                         "replicates", "full"});
    for (auto& k : keys_for("truth", kParamKeys)) allowed.push_back(k);
    for (auto& k : keys_for("prior", kParamKeys)) allowed.push_back(k);
    allowed.push_back("prior.empirical_bayes");
    for (auto& k : keys_for("smc", {"particles", "rho", "scheme", "mode"})) allowed.push_back(k);
    check_keys(cfg, {"simulate", "truth", "prior", "smc"}, allowed);

    auto c = ExperimentConfig::defaults(parse_scenario(cfg.get_string("simulate.scenario", "composite_gaussian")));
    if (cfg.get_bool("simulate.full", false)) c.n_sims = 1000;
    c.n_sims = cfg.get_size("simulate.n_sims", c.n_sims, 1, kMaxSize);
    c.m = cfg.get_size("simulate.m", c.m, 1, kMaxSize);
    if (cfg.has("simulate.backend")) c.backend = parse_backend(cfg.get_string("simulate.backend", "exact"));
    if (cfg.has("simulate.losses")) {
        c.losses.clear();
        for (const auto& name : cfg.get_strings("simulate.losses", {})) {
            if (lower(name) == "none") continue;
            c.losses.push_back(parse_loss_pair(name));
        }
    }
    c.cost_ratios = cfg.get_doubles("simulate.cost_ratios", c.cost_ratios);
    if (cfg.has("simulate.bh_levels") && lower(cfg.get_string("simulate.bh_levels", "")) == "none") {
        c.bh_levels.clear();
    } else {
        c.bh_levels = cfg.get_doubles("simulate.bh_levels", c.bh_levels);
    }
    c.truth = params_from_config(cfg, "truth", c.truth);
    c.prior = params_from_config(cfg, "prior", c.prior);
    c.smc = smc_from_config(cfg, seed);
    c.seed = seed;
    c.threads = threads;
    c.keep_replicates = cfg.get_bool("simulate.replicates", false);
    c.validate();
    return c;
}

BenchConfig bench_from_config(const RunConfig& cfg, std::uint64_t seed) {
    check_keys(cfg, {"bench"}, keys_for("bench", {"sizes", "paths", "oracle_samples", "oracle_max_m", "min_seconds"}));
    BenchConfig b;
    b.seed = seed;
    if (cfg.has("bench.sizes")) {
        b.sizes.clear();
        for (double v : cfg.get_doubles("bench.sizes", {})) {
            if (!(v >= 1.0) || v != std::floor(v)) throw ConfigurationError("bench.sizes must be positive integers");
            b.sizes.push_back(static_cast<std::size_t>(v));
        }
    }
    b.paths = cfg.get_strings("bench.paths", b.paths);
    for (const auto& p : b.paths) {
        if (p != "fp_fn" && p != "fdp_fnp" && p != "fdp_mdp" && p != "generic") {
            throw ConfigurationError("unknown bench path '" + p + "'");
        }
    }
    b.oracle_samples = cfg.get_size("bench.oracle_samples", b.oracle_samples, 0, kMaxSize);
    b.oracle_max_m = cfg.get_size("bench.oracle_max_m", b.oracle_max_m, 1, kOracleMaxSummaryM);
    b.min_seconds = cfg.get_double("bench.min_seconds", b.min_seconds, 0.0, 3600.0);
    return b;
}

int run_decide_command(const CommandContext& ctx, std::ostream& data_out, std::ostream& err) {
    const auto input = ctx.config.raw("decide.input");
    if (!input) throw ConfigurationError("decide needs decide.input (or --input)");
    const auto csv = read_two_group_csv(*input);
    const auto result = decide(ctx.config, csv, ctx.seed);
    if (ctx.to_stdout || !ctx.out) {
        write_decisions(data_out, result);
    } else {
        auto f = open_output(*ctx.out);
        write_decisions(f, result);
    }
    if (ctx.out) {
        auto f = open_output(*ctx.out + ".summary");
        write_decide_summary(f, result, ctx.config, ctx.seed);
    } else {
        write_decide_summary(err, result, ctx.config, ctx.seed);
    }
    return kExitOk;
}

int run_simulate_command(const CommandContext& ctx, std::ostream& data_out, std::ostream& err) {
    const auto cfg = experiment_from_config(ctx.config, ctx.seed, ctx.threads);
    const auto report = run_experiment(cfg);
    if (ctx.to_stdout || !ctx.out) {
        report.write_curve_csv(data_out);
    } else {
        auto f = open_output(*ctx.out);
        report.write_curve_csv(f);
    }
    if (cfg.keep_replicates) {
        if (!ctx.out) throw ConfigurationError("simulate.replicates needs --out for the replicate file");
        auto f = open_output(*ctx.out + ".replicates.csv");
        report.write_replicates_csv(f);
    }
    if (report.saturated) err << "warning: CDF values were clamped during SMC (extreme tails)\n";
    err << "simulate: scenario " << to_string(cfg.scenario) << ", " << cfg.n_sims << " replicates, M = " << cfg.m
        << '\n';
    return kExitOk;
}

int run_bench_command(const CommandContext& ctx, std::ostream& data_out, std::ostream& err) {
    const auto cfg = bench_from_config(ctx.config, ctx.seed);
    const auto report = run_bench(cfg);
    if (ctx.to_stdout || !ctx.out) {
        report.write_csv(data_out);
    } else {
        auto f = open_output(*ctx.out);
        report.write_csv(f);
    }
    err << "bench: " << report.oracle.cases << " oracle cases, " << report.oracle.violations << " violations\n";
    return report.oracle.violations == 0 ? kExitOk : kExitNumeric;
}

int exit_code_for_current_exception(std::ostream& err) {
    try {
        throw;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigurationError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DimensionError& e) {
        err << "dimension error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const RefusalError& e) {
        err << "refused: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DegenerateLikelihoodError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace bmdf
