#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bmdf/solver.hpp"

namespace bmdf {

struct OracleSuiteResult {
    std::size_t cases = 0;
    std::size_t violations = 0;  // solver loss above the brute-force minimum by more than the tolerance
    double max_gap = 0.0;
    double seconds = 0.0;
};

// Random independent posterior summaries for every loss pair, c0/c1 in
// {0.5, 1, 2} and M = 1..max_m, `samples` per cell; compares solve() with the
// exhaustive oracle.
OracleSuiteResult run_oracle_suite(std::size_t samples, std::uint64_t seed, std::size_t max_m = 12,
                                   double tolerance = 1e-12);

// Random summary of size m with exact ties and 0/1 entries mixed in.
PosteriorSummary random_independent_summary(std::size_t m, std::uint64_t seed, std::size_t draw);

struct TimingRow {
    std::string path;
    std::size_t m = 0;
    double seconds = 0.0;  // per call
};

struct BenchConfig {
    std::vector<std::size_t> sizes{100, 1000, 10000, 100000};
    std::vector<std::string> paths{"fp_fn", "fdp_fnp", "fdp_mdp", "generic"};
    std::size_t oracle_samples = 500;
    std::size_t oracle_max_m = 12;
    std::uint64_t seed = 1;
    double min_seconds = 0.2;  // repeat small problems until this much time has passed
};

struct BenchReport {
    OracleSuiteResult oracle;
    std::vector<TimingRow> timings;
    std::map<std::string, double> slopes;  // fitted log-log growth exponent per path

    void write_csv(std::ostream& out) const;
};

BenchReport run_bench(const BenchConfig& config);

// Seconds per call of one solver path on random data of size m.
double time_solver_path(const std::string& path, std::size_t m, std::uint64_t seed, double min_seconds);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace bmdf
