#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmdf/commands.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out;
    bool to_stdout = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "INI-style configuration file");
    cmd->add_option("--seed", f.seed, "seed for every random draw");
    cmd->add_option("--threads", f.threads, "worker thread cap")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "output file");
    cmd->add_flag("--stdout", f.to_stdout, "write data to stdout and diagnostics to stderr");
    cmd->add_option("--set", f.sets, "override a configuration value: section.key=value (repeatable)");
}

std::string exact(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayes multiple decision functions: decide, simulate, bench"};
    app.require_subcommand(1);
    Flags f;

    auto* decide = app.add_subcommand("decide", "decisions for a two-group CSV");
    add_common(decide, f);
    std::string input, loss;
    std::optional<double> c0, c1, bh_level;
    decide->add_option("--input", input, "two-group CSV (decide.input)");
    decide->add_option("--loss", loss, "FP_FN | FDP_FNP | FDP_MDP | FDP_AMDP (decide.loss)");
    decide->add_option("--c0", c0, "Type I cost (decide.c0)");
    decide->add_option("--c1", c1, "Type II cost (decide.c1)");
    decide->add_option("--bh-level", bh_level, "also report BH decisions at this level (decide.bh_level)");

    auto* simulate = app.add_subcommand("simulate", "replicated simulation experiments");
    add_common(simulate, f);
    std::string scenario;
    std::optional<std::size_t> n_sims, m;
    simulate->add_option("--scenario", scenario, "composite_gaussian | dependent_exponential | two_group_gaussian");
    simulate->add_option("--n-sims", n_sims, "replications (simulate.n_sims)");
    simulate->add_option("--m", m, "components (simulate.m)");

    auto* bench = app.add_subcommand("bench", "oracle equivalence and timing sweeps");
    add_common(bench, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bmdf::kExitConfig;
    }

    try {
        bmdf::CommandContext ctx;
        if (!f.config_path.empty()) ctx.config = bmdf::RunConfig::load_file(f.config_path);
        // Flags win over the file.
        if (!input.empty()) ctx.config.set("decide.input", input);
        if (!loss.empty()) ctx.config.set("decide.loss", loss);
        if (c0) ctx.config.set("decide.c0", exact(*c0));
        if (c1) ctx.config.set("decide.c1", exact(*c1));
        if (bh_level) ctx.config.set("decide.bh_level", exact(*bh_level));
        if (!scenario.empty()) ctx.config.set("simulate.scenario", scenario);
        if (n_sims) ctx.config.set("simulate.n_sims", std::to_string(*n_sims));
        if (m) ctx.config.set("simulate.m", std::to_string(*m));
        for (const auto& s : f.sets) ctx.config.set_assignment(s);
        ctx.seed = f.seed;
        ctx.threads = f.threads;
        if (!f.out.empty()) ctx.out = f.out;
        ctx.to_stdout = f.to_stdout;

        if (decide->parsed()) return bmdf::run_decide_command(ctx, std::cout, std::cerr);
        if (simulate->parsed()) return bmdf::run_simulate_command(ctx, std::cout, std::cerr);
        return bmdf::run_bench_command(ctx, std::cout, std::cerr);
    } catch (...) {
        return bmdf::exit_code_for_current_exception(std::cerr);
    }
}
