#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bmdf/bench.hpp"
#include "bmdf/config.hpp"
#include "bmdf/simulation.hpp"
#include "bmdf/solver.hpp"
#include "bmdf/two_group_csv.hpp"

namespace bmdf {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // parse or configuration error
inline constexpr int kExitNumeric = 3;  // numeric failure

struct CommandContext {
    RunConfig config;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::optional<std::string> out;  // output path
    bool to_stdout = false;          // data on stdout, nothing else
};

// --- decide ---------------------------------------------------------------

struct DecideResult {
    std::vector<std::string> ids;
    PosteriorSummary posterior;
    LossSpec spec;
    SolverResult solution;
    std::optional<double> bh_level;
    ActionVector bh_action;  // empty unless bh_level is set
    std::vector<std::size_t> rank;  // 1 = largest posterior mean
};

DecideResult decide(const RunConfig& config, const TwoGroupCsv& csv, std::uint64_t seed);

// id,phi,action,rank[,bh_action]
void write_decisions(std::ostream& out, const DecideResult& result);
// k*, posterior loss, counts and the settings echo.
void write_decide_summary(std::ostream& out, const DecideResult& result, const RunConfig& config, std::uint64_t seed);

// --- simulate -------------------------------------------------------------

ExperimentConfig experiment_from_config(const RunConfig& config, std::uint64_t seed, std::size_t threads);

// --- bench ----------------------------------------------------------------

BenchConfig bench_from_config(const RunConfig& config, std::uint64_t seed);

// Subcommand drivers: write outputs, diagnostics to `err`, return an exit code.
int run_decide_command(const CommandContext& ctx, std::ostream& data_out, std::ostream& err);
int run_simulate_command(const CommandContext& ctx, std::ostream& data_out, std::ostream& err);
int run_bench_command(const CommandContext& ctx, std::ostream& data_out, std::ostream& err);

// Maps an in-flight exception to an exit code, printing it to `err`.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace bmdf
