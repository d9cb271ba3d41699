#include "bmdf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "bmdf/errors.hpp"
#include "bmdf/poisson_binomial.hpp"
#include "bmdf/rng.hpp"

namespace bmdf {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

// Cheap psi consistent with phi's order (the DP is O(M^2) and not what is timed).
PosteriorSummary timing_summary(std::size_t m, std::uint64_t seed, std::uint32_t variant) {
    Philox4x32 rng(seed, 0x7e570000u + variant, static_cast<std::uint32_t>(m));
    PosteriorSummary s;
    s.phi.resize(m);
    for (auto& p : s.phi) p = rng.uniform_open();
    const double total = std::accumulate(s.phi.begin(), s.phi.end(), 0.0);
    std::vector<double> psi(m), adj(m);
    for (std::size_t i = 0; i < m; ++i) {
        psi[i] = s.phi[i] / std::max(1.0, total);
        adj[i] = s.phi[i] / (total + 1.0);
    }
    s.psi = std::move(psi);
    s.psi_adj = std::move(adj);
    return s;
}

}  // namespace

PosteriorSummary random_independent_summary(std::size_t m, std::uint64_t seed, std::size_t draw) {
    Philox4x32 rng(seed, static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(m));
    std::vector<double> phi(m);
    for (auto& p : phi) {
        const double u = rng.uniform_open();
        const double v = rng.uniform_open();
        if (u < 0.08) {
            p = 0.0;
        } else if (u < 0.16) {
            p = 1.0;
        } else if (u < 0.35) {
            p = std::round(v * 10.0) / 10.0;  // exact ties
        } else {
            p = v;
        }
    }
    PosteriorSummary s;
    s.psi = psi_exact_independent(phi, false);
    s.psi_adj = psi_exact_independent(phi, true);
    s.phi = std::move(phi);
    return s;
}

OracleSuiteResult run_oracle_suite(std::size_t samples, std::uint64_t seed, std::size_t max_m, double tolerance) {
    if (max_m > kOracleMaxSummaryM) throw RefusalError("oracle suite limited to M <= 20");
    const auto start = Clock::now();
    OracleSuiteResult res;
    const LossPairKind kinds[] = {LossPairKind::FpFn, LossPairKind::FdpFnp, LossPairKind::FdpMdp,
                                  LossPairKind::FdpAmdp};
    const double costs[][2] = {{0.5, 1.0}, {1.0, 1.0}, {2.0, 1.0}, {1.0, 0.5}, {1.0, 2.0}};
    std::size_t draw = 0;
    for (std::size_t m = 1; m <= max_m; ++m) {
        for (std::size_t s = 0; s < samples; ++s) {
            const auto post = random_independent_summary(m, seed, draw++);
            for (const auto kind : kinds) {
                for (const auto& c : costs) {
                    const LossSpec spec{kind, c[0], c[1], m};
                    const auto got = solve(spec, post);
                    const auto best = brute_force_oracle(spec, post);
                    const double gap = posterior_expected_loss(spec, post, got.action) - best.posterior_loss;
                    ++res.cases;
                    res.max_gap = std::max(res.max_gap, gap);
                    if (gap > tolerance) ++res.violations;
                }
            }
        }
    }
    res.seconds = elapsed(start);
    return res;
}

double time_solver_path(const std::string& path, std::size_t m, std::uint64_t seed, double min_seconds) {
    // Rotate through distinct inputs so small problems are not timed on a
    // branch history the CPU has already memorized.
    const std::size_t pool_size = std::clamp<std::size_t>(200000 / std::max<std::size_t>(m, 1), 1, 64);
    std::vector<PosteriorSummary> pool;
    for (std::size_t v = 0; v < pool_size; ++v) pool.push_back(timing_summary(m, seed, static_cast<std::uint32_t>(v)));
    LossSpec spec{LossPairKind::FdpFnp, 1.0, 1.0, m};
    SolverResult (*fn)(const LossSpec&, const PosteriorSummary&) = nullptr;
    if (path == "fp_fn") {
        spec.kind = LossPairKind::FpFn;
        fn = &solve_fp_fn;
    } else if (path == "fdp_fnp") {
        fn = &solve_fdp_fnp;
    } else if (path == "fdp_mdp") {
        spec.kind = LossPairKind::FdpMdp;
        fn = &solve_fdp_mdp;
    } else if (path == "generic") {
        fn = &solve_generic;
    } else {
        throw ConfigurationError("unknown solver path '" + path + "'");
    }
    std::size_t calls = 0;
    std::size_t sink = 0;
    const auto start = Clock::now();
    double t = 0.0;
    do {
        sink += fn(spec, pool[calls % pool_size]).k_star;
        ++calls;
        t = elapsed(start);
    } while (t < min_seconds);
    if (sink == static_cast<std::size_t>(-1)) return 0.0;  // keep the calls observable
    return t / static_cast<double>(calls);
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(points.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BenchReport run_bench(const BenchConfig& config) {
    BenchReport report;
    if (config.oracle_samples > 0) report.oracle = run_oracle_suite(config.oracle_samples, config.seed, config.oracle_max_m);
    for (const auto& path : config.paths) {
        std::vector<std::pair<double, double>> pts;
        for (const auto m : config.sizes) {
            const double t = time_solver_path(path, m, config.seed, config.min_seconds);
            report.timings.push_back({path, m, t});
            pts.emplace_back(static_cast<double>(m), t);
        }
        report.slopes[path] = loglog_slope(pts);
    }
    return report;
}

void BenchReport::write_csv(std::ostream& out) const {
    out << "section,path,m,value\n";
    out.precision(8);
    out << "oracle,cases,," << oracle.cases << '\n';
    out << "oracle,violations,," << oracle.violations << '\n';
    out << "oracle,max_gap,," << oracle.max_gap << '\n';
    out << "oracle,seconds,," << oracle.seconds << '\n';
    for (const auto& t : timings) out << "timing," << t.path << ',' << t.m << ',' << t.seconds << '\n';
    for (const auto& [path, slope] : slopes) out << "slope," << path << ",," << slope << '\n';
}

}  // namespace bmdf
