#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "viewgame/cli/commands.hpp"

using namespace viewgame;
using namespace viewgame::cli;
namespace fs = std::filesystem;

namespace {

RunConfig reference_config(double pi_g = 0.75)
{
    auto c = parse_config(json::parse(R"({
        "scenario": "exponential",
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 150, "n_pool": 1000, "tau": 10},
        "alpha": 40, "n_surface": 401, "n_samples": 501
    })"));
    c.belief = Belief::from_good(pi_g);
    return c;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& body)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(VIEWGAME_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path scratch_dir()
{
    auto d = fs::temp_directory_path() / "viewgame_cli_test";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST(Config, RejectsUnknownFieldsAtEveryLevel)
{
    EXPECT_THROW(parse_config(json::parse(R"({"bogus": 1})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"params": {"lambda": 1}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"sim": {"seeds": 1}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"grid": {"n": 1}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"sim": {"initial": {"lo": 0, "mid": 1}}})")),
                 ConfigError);
}

TEST(Config, RejectsWrongTypesAndNames)
{
    EXPECT_THROW(parse_config(json::parse(R"({"alpha": "x"})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"grid": {"n_beta": 2.5}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"scenario": "cubic"})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"seed": -3})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"belief": {}})")), ConfigError);
}

TEST(Config, ValidationMapsModelErrorsToConfigErrors)
{
    auto c = parse_config(json::parse(R"({"params": {"tau": 0}})"));
    EXPECT_THROW(validate_config(c), ConfigError);
    c = parse_config(json::parse(R"({"scenario": "variable_horizon",
        "params": {"n_pool": 1000, "lambda_pu": 150, "gamma_th": 100}})"));
    EXPECT_THROW(validate_config(c), ConfigError);
    c = parse_config(json::parse(R"({"alpha": -1})"));
    EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(Config, ReadsEverySection)
{
    const auto c = parse_config(json::parse(R"({
        "scenario": "side_information",
        "params": {"lambda_ps_g": 0.3, "lambda_ps_b": 0.1, "lambda_pu": 0.2, "tau": 5},
        "belief": {"pi_g": 0.6}, "alpha": 1.5, "seed": 9, "draws": 7, "corrupt": true,
        "grid": {"n_beta": 300, "n_alpha": 150, "tol_factor": 1e-7},
        "sweep_lambda_pu": [0.1, 0.2],
        "sim": {"mode": "views", "quality": "bad", "runs": 3, "n_push_pool": 50,
                "n_agents": 5, "rounds": 9, "update_fraction": 0.5, "initial": [1, 2, 3, 4, 5]},
        "out": "x.json"})"));
    EXPECT_EQ(c.scenario, Scenario::SideInformation);
    EXPECT_EQ(c.params.tau, 5.0);
    EXPECT_DOUBLE_EQ(c.belief.pi_b, 0.4);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.grid.n_alpha, 150);
    EXPECT_EQ(c.sweep_lambda_pu.size(), 2u);
    EXPECT_EQ(c.sim_mode, SimMode::Views);
    EXPECT_EQ(c.sim_quality, Quality::Bad);
    EXPECT_EQ(c.sim.initial.kind, InitialThresholds::Kind::Sequence);
    EXPECT_EQ(c.out, "x.json");
    EXPECT_NO_THROW(validate_config(c));
}

TEST(Format, TwelveSignificantDigits)
{
    EXPECT_EQ(fmt(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(fmt(123456789.123456789), "123456789.123");
    EXPECT_EQ(fmt(0.0), "0");
    EXPECT_EQ(fmt(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Trajectory, GoodAboveBadAndMonotone)
{
    const auto r = cmd_trajectory(reference_config());
    ASSERT_EQ(r.documents.size(), 2u);
    const auto good = csv_rows(r.documents[0].body);
    const auto bad = csv_rows(r.documents[1].body);
    EXPECT_EQ(good[0], (std::vector<std::string>{"t", "x", "xdot"}));
    ASSERT_EQ(good.size(), bad.size());
    for (std::size_t i = 2; i < good.size(); ++i) {
        EXPECT_GE(std::stod(good[i][1]), std::stod(bad[i][1]));
        EXPECT_GE(std::stod(good[i][1]), std::stod(good[i - 1][1]));
    }
    EXPECT_EQ(r.documents[0].body.find('\r'), std::string::npos);
}

TEST(Trajectory, NoPullMeansAlphaIsIrrelevant)
{
    auto c = reference_config();
    c.params.lambda_pu = 0.0;
    c.alpha = 5.0;
    const auto a = cmd_trajectory(c);
    c.alpha = 60.0;
    const auto b = cmd_trajectory(c);
    // sample grids differ only by the inserted activation time
    const auto ra = csv_rows(a.documents[0].body);
    const auto rb = csv_rows(b.documents[0].body);
    std::size_t j = 1;
    for (std::size_t i = 1; i < ra.size(); ++i) {
        while (j < rb.size() && std::stod(rb[j][0]) < std::stod(ra[i][0])) {
            ++j;
        }
        if (j < rb.size() && rb[j][0] == ra[i][0]) {
            EXPECT_EQ(rb[j][1], ra[i][1]);
        }
    }
}

TEST(Surface, ShapeSequenceAndTwoPointGrid)
{
    auto c = reference_config(0.0);
    auto argmax = [](const CommandResult& r) {
        const auto rows = csv_rows(r.documents[0].body);
        double best = -1e300, at = 0.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double u = std::stod(rows[i][1]);
            if (u > best) {
                best = u;
                at = std::stod(rows[i][0]);
            }
        }
        return at;
    };
    const double cap = strategy_cap(40.0, c.params, c.scenario);
    EXPECT_NEAR(argmax(cmd_surface(c)), cap, 1e-9 * cap);
    c.belief = Belief::from_good(1.0);
    EXPECT_EQ(argmax(cmd_surface(c)), 0.0);
    c.belief = Belief::from_good(0.75);
    EXPECT_NEAR(argmax(cmd_surface(c)), 40.0, 1e-9);

    c.n_surface = 2;
    const auto rows = csv_rows(cmd_surface(c).documents[0].body);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"beta", "utility", "branch"}));
    EXPECT_GE(rows.size(), 3u);
}

TEST(BestResponse, MatchesSurfaceMaximum)
{
    const auto r = cmd_best_response(reference_config());
    EXPECT_EQ(r.code, kExitOk);
    const auto j = json::parse(r.documents[0].body);
    EXPECT_TRUE(j["oracle_checked"].get<bool>());
    EXPECT_EQ(j["method"], "closed_form");
    EXPECT_NEAR(j["points"][0].get<double>(), 40.0, 1e-9);
}

TEST(Classify, ReportFieldsAndCaseDraws)
{
    auto c = parse_config(json::parse(R"({"scenario": "linear",
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 150}, "belief": {"pi_g": 1}})"));
    auto j = json::parse(cmd_classify(c).documents[0].body);
    for (const char* k : {"scenario", "params", "belief", "kind", "points", "intervals", "oracle_checked"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j["points"], json::array({0.0}));
    EXPECT_TRUE(j["oracle_checked"].get<bool>());

    c.belief = Belief::from_good(0.75);
    j = json::parse(cmd_classify(c).documents[0].body);
    EXPECT_EQ(j["case"], "ii");
    EXPECT_EQ(j["kind"], "interval");
}

TEST(Classify, SideInfoSweepShowsPhaseTransition)
{
    auto c = parse_config(json::parse(R"({"scenario": "side_information",
        "params": {"lambda_ps_g": 0.3, "lambda_ps_b": 0.1, "tau": 10}, "belief": {"pi_g": 0.6},
        "grid": {"n_beta": 200, "n_alpha": 100},
        "sweep_lambda_pu": [0.1, 0.2, 0.4, 0.8]})"));
    const auto j = json::parse(cmd_classify(c).documents[0].body);
    const auto& rows = j["sweep"];
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.contains("diagnostics"));
        EXPECT_NEAR(r["diagnostics"]["lambda_pu_s"].get<double>(), 0.3, 1e-12);
    }
    EXPECT_EQ(rows[1]["kind"], "finite_points");
    EXPECT_EQ(rows[2]["kind"], "interval");
}

TEST(Classify, TrendLinearUsesSquaredRates)
{
    auto c = parse_config(json::parse(R"({"scenario": "trend_viewcount_linear",
        "params": {"lambda_ps_g": 0.5, "lambda_ps_b": 0.2, "lambda_pu": 1.0, "tau": 4},
        "belief": {"pi_g": 0.7}})"));
    const auto j = json::parse(cmd_classify(c).documents[0].body);
    EXPECT_EQ(j["case"].get<std::string>().rfind("squared-", 0), 0u);
    EXPECT_TRUE(j["oracle_checked"].get<bool>());
}

TEST(Verify, LinearDrawsPassAndCorruptionFails)
{
    auto c = parse_config(json::parse(R"({"scenario": "linear", "draws": 20, "seed": 5})"));
    const auto ok = cmd_verify(c);
    EXPECT_EQ(ok.code, kExitOk);
    EXPECT_NE(ok.documents[0].body.find("passed=20/20"), std::string::npos);
    c.corrupt = true;
    const auto bad = cmd_verify(c);
    EXPECT_EQ(bad.code, kExitFailure);
    EXPECT_NE(bad.documents[0].body.find("FAIL"), std::string::npos);
}

TEST(Verify, Deterministic)
{
    auto c = parse_config(json::parse(R"({"scenario": "exponential", "draws": 5, "seed": 3,
                                          "grid": {"n_beta": 300}})"));
    EXPECT_EQ(cmd_verify(c).documents[0].body, cmd_verify(c).documents[0].body);
}

TEST(Simulate, DynamicsOutputsAndDeterminism)
{
    auto c = parse_config(json::parse(R"({"scenario": "linear",
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 150},
        "belief": {"pi_g": 0.75}, "seed": 4,
        "sim": {"n_agents": 11, "rounds": 200, "update_fraction": 0.3, "initial": {"lo": 0.05, "hi": 0.1}}})"));
    const auto a = cmd_simulate(c);
    const auto b = cmd_simulate(c);
    ASSERT_EQ(a.documents.size(), 2u);
    EXPECT_EQ(a.documents[0].body, b.documents[0].body);
    EXPECT_EQ(a.documents[1].body, b.documents[1].body);
    EXPECT_EQ(csv_rows(a.documents[0].body)[0],
              (std::vector<std::string>{"round", "agent_id", "threshold"}));
    const auto s = json::parse(a.documents[1].body);
    EXPECT_EQ(s["status"], "converged");
    EXPECT_TRUE(s["median_oracle_fixed_point"].get<bool>());
}

TEST(Simulate, ViewsMode)
{
    auto c = parse_config(json::parse(R"({"scenario": "exponential",
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 0, "n_pool": 2000},
        "n_samples": 101, "sim": {"mode": "views", "runs": 20, "n_push_pool": 2000}})"));
    const auto r = cmd_simulate(c);
    EXPECT_EQ(csv_rows(r.documents[0].body)[0],
              (std::vector<std::string>{"t", "mean_x", "model_x"}));
    EXPECT_LT(json::parse(r.documents[1].body)["relative_error"].get<double>(), 0.05);
}

TEST(Binary, ExitCodes)
{
    const auto dir = scratch_dir();
    {
        std::ofstream(dir / "tau0.json") << R"({"params": {"tau": 0}})";
        std::ofstream(dir / "unknown.json") << R"({"colour": "red"})";
        std::ofstream(dir / "broken.json") << "{";
    }
    EXPECT_EQ(run_cli("trajectory --config " + (dir / "tau0.json").string()), 2);
    EXPECT_EQ(run_cli("classify --config " + (dir / "unknown.json").string()), 2);
    EXPECT_EQ(run_cli("classify --config " + (dir / "broken.json").string()), 2);
    EXPECT_EQ(run_cli("classify --config " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("classify --scenario nope"), 2);
    EXPECT_EQ(run_cli("classify --pi-g 0.75"), 0);
    EXPECT_EQ(run_cli("verify --draws 5 --seed 1"), 0);
    EXPECT_EQ(run_cli("verify --draws 5 --seed 1 --corrupt"), 1);
    EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Binary, ByteIdenticalReruns)
{
    const auto dir = scratch_dir();
    std::ofstream(dir / "expo.json") << R"({"scenario": "exponential", "draws": 3,
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 150, "n_pool": 1000}})";
    for (int k : {1, 2}) {
        const auto tag = std::to_string(k);
        ASSERT_EQ(run_cli("verify --config " + (dir / "expo.json").string() + " --seed 8 --out " +
                          (dir / ("v" + tag + ".txt")).string()),
                  0);
        ASSERT_EQ(run_cli("simulate --scenario linear --pi-g 0.75 --seed 8 --out " +
                          (dir / ("s" + tag + ".csv")).string()),
                  0);
    }
    EXPECT_EQ(read_file(dir / "v1.txt"), read_file(dir / "v2.txt"));
    EXPECT_EQ(read_file(dir / "s1.csv"), read_file(dir / "s2.csv"));
    EXPECT_EQ(read_file(dir / "s1.summary.json"), read_file(dir / "s2.summary.json"));
    EXPECT_FALSE(read_file(dir / "s1.csv").empty());
}
