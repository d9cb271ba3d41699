#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmdf/commands.hpp"
#include "bmdf/config.hpp"
#include "bmdf/errors.hpp"
#include "bmdf/simulation.hpp"
#include "bmdf/two_group_csv.hpp"

using namespace bmdf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "bmdf_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BMDF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path synthetic_csv(const std::string& name, std::size_t m, std::uint64_t seed) {
    ScenarioParams truth;
    truth.pi = 0.1;
    const auto g = generate(Scenario::TwoGroupGaussian, truth, m, seed);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < m; ++i) ids.push_back("g" + std::to_string(i + 1));
    const auto path = scratch(name);
    std::ofstream out(path);
    write_two_group_csv(out, ids, g.data, 5, 5);
    return path;
}

TwoGroupCsv parse(const std::string& text) {
    std::istringstream in(text);
    return parse_two_group_csv(in);
}

std::size_t parse_error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST(Config, SectionsAndOverrides) {
    auto c = RunConfig::load_string("# comment\n[decide]\nloss = FDP_FNP\nc0 = 2\n[model]\npi = 0.2\n");
    EXPECT_EQ(c.get_string("decide.loss", ""), "FDP_FNP");
    EXPECT_DOUBLE_EQ(c.get_double("decide.c0", 1, 0, 1e9), 2.0);
    c.set_assignment("decide.c0=5");
    EXPECT_DOUBLE_EQ(c.get_double("decide.c0", 1, 0, 1e9), 5.0);
    EXPECT_DOUBLE_EQ(c.get_double("decide.c1", 1.5, 0, 1e9), 1.5);
    EXPECT_THROW(c.get_double("model.pi", 0.1, 0.5, 1.0), ConfigurationError);
    EXPECT_THROW(c.require_known({"decide.loss", "decide.c0"}), ConfigurationError);
    EXPECT_NO_THROW(c.require_known({"decide.loss", "decide.c0", "model.pi"}));
    c.set("simulate.cost_ratios", "0.5, 1, 2");
    EXPECT_EQ(c.get_doubles("simulate.cost_ratios", {}), (std::vector<double>{0.5, 1, 2}));
    c.set("x.flag", "yes");
    EXPECT_TRUE(c.get_bool("x.flag", false));
    c.set("x.flag", "maybe");
    EXPECT_THROW(c.get_bool("x.flag", false), ConfigurationError);
    EXPECT_THROW(c.set_assignment("no_equals_sign"), ConfigurationError);
    EXPECT_THROW(c.set("nosection", "1"), ConfigurationError);
    c.set("x.n", "-3");
    EXPECT_THROW(c.get_size("x.n", 1, 0, 10), ConfigurationError);
}

TEST(Config, MalformedFileReportsLine) {
    try {
        RunConfig::load_string("[decide]\nloss = FP_FN\n[broken\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Csv, ParsesAndRoundTrips) {
    const auto csv = parse("id,c1,c2,t1,t2\ng1,1,2,3,4\n\ng2,5.5,6,7,-8e-1\n");
    EXPECT_EQ(csv.ids, (std::vector<std::string>{"g1", "g2"}));
    EXPECT_EQ(csv.value_columns(), 4u);
    EXPECT_DOUBLE_EQ(csv.data.rows[1][3], -0.8);
    std::ostringstream out;
    write_two_group_csv(out, csv.ids, csv.data, 2, 2);
    const auto again = parse(out.str());
    EXPECT_EQ(again.data.rows, csv.data.rows);
}

TEST(Csv, ErrorsCarryLineNumbers) {
    EXPECT_EQ(parse_error_line("id,a,b\n"), 1u);           // empty data section
    EXPECT_EQ(parse_error_line(""), 1u);                  // missing header
    EXPECT_EQ(parse_error_line("id,a,b\ng1,1,2\ng2,NA,3\n"), 3u);
    EXPECT_EQ(parse_error_line("id,a,b\ng1,1,2,3\n"), 2u);
    EXPECT_EQ(parse_error_line("id,a,b\ng1,1,2\ng1,3,4\n"), 3u);
    EXPECT_EQ(parse_error_line("id,a,b\ng1,1,x\n"), 2u);
    EXPECT_EQ(parse_error_line("id,a,b\ng1,1,inf\n"), 2u);
}

TEST(Decide, LibraryPath) {
    const auto path = synthetic_csv("lib.csv", 60, 3);
    auto cfg = RunConfig{};
    cfg.set("decide.loss", "FDP_FNP");
    cfg.set("decide.bh_level", "0.05");
    const auto r = decide(cfg, read_two_group_csv(path.string()), 1);
    EXPECT_EQ(r.ids.size(), 60u);
    EXPECT_EQ(count_ones(r.solution.action), r.solution.k_star);
    EXPECT_EQ(r.bh_action.size(), 60u);
    std::vector<std::size_t> ranks = r.rank;
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < ranks.size(); ++i) EXPECT_EQ(ranks[i], i + 1);
    cfg.set("model.kappa", "2");
    EXPECT_THROW(decide(cfg, read_two_group_csv(path.string()), 1), ConfigurationError);
}

TEST(Decide, ByteIdenticalRuns) {
    const auto path = synthetic_csv("same.csv", 80, 5);
    const auto a = scratch("same_a.csv"), b = scratch("same_b.csv");
    const std::string common = "decide --input " + path.string() + " --loss FDP_MDP --bh-level 0.05 --seed 9 --out ";
    ASSERT_EQ(run_cli(common + a.string()), 0);
    ASSERT_EQ(run_cli(common + b.string()), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a.string() + ".summary"), slurp(b.string() + ".summary"));
    EXPECT_EQ(slurp(a).rfind("id,phi,action,rank,bh_action\n", 0), 0u);
    // SMC backend is seeded as well.
    const std::string smc = "decide --input " + path.string() +
                            " --set decide.backend=smc --set smc.particles=300 --seed 4 --out ";
    ASSERT_EQ(run_cli(smc + a.string()), 0);
    ASSERT_EQ(run_cli(smc + b.string()), 0);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, ExitCodes) {
    const auto good = synthetic_csv("codes.csv", 20, 1);
    const auto empty = scratch("empty.csv");
    std::ofstream(empty) << "id,c1,c2,c3,t1,t2,t3\n";
    const auto na = scratch("na.csv");
    std::ofstream(na) << "id,c1,c2,t1,t2\ng1,1,2,3,4\ng2,1,NA,3,4\n";
    const auto out = scratch("codes_out.csv").string();
    EXPECT_EQ(run_cli("decide --input " + good.string() + " --out " + out), 0);
    EXPECT_EQ(run_cli("decide --input " + empty.string() + " --out " + out), 2);
    EXPECT_EQ(run_cli("decide --input " + na.string() + " --out " + out), 2);
    EXPECT_EQ(run_cli("decide --input /nonexistent/file.csv --out " + out), 2);
    EXPECT_EQ(run_cli("decide --input " + good.string() + " --loss NOPE --out " + out), 2);
    EXPECT_EQ(run_cli("decide --input " + good.string() + " --c0 -1 --out " + out), 2);
    EXPECT_EQ(run_cli("decide --input " + good.string() + " --set model.typo=1 --out " + out), 2);
    EXPECT_EQ(run_cli("simulate --scenario nonsense --n-sims 1"), 2);
    EXPECT_EQ(run_cli("simulate --scenario composite_gaussian --n-sims 1 --stdout"), 0);
    EXPECT_EQ(run_cli("simulate --scenario dependent_exponential --set simulate.backend=exact --n-sims 1 --stdout"), 2);
    EXPECT_EQ(run_cli("--bogus-flag"), 2);
    EXPECT_EQ(run_cli(""), 2);
}

TEST(Cli, StdoutCarriesOnlyData) {
    const auto good = synthetic_csv("stdout.csv", 20, 2);
    const auto captured = scratch("stdout_capture.txt");
    const std::string cmd = std::string(BMDF_CLI_PATH) + " decide --stdout --input " + good.string() + " > " +
                            captured.string() + " 2>/dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    const auto text = slurp(captured);
    EXPECT_EQ(text.rfind("id,phi,action,rank\n", 0), 0u);
    std::istringstream lines(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) ++n;
    EXPECT_EQ(n, 21u);
}
