#pragma once

// Run configuration for the command-line tool: one JSON document, strictly
// checked. Needs nlohmann/json on the include path.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewgame/errors.hpp"
#include "viewgame/model.hpp"
#include "viewgame/oracle.hpp"
#include "viewgame/stochastic.hpp"

namespace viewgame::cli {

using nlohmann::json;

enum class SimMode { Dynamics, Views };

struct RunConfig {
    Scenario scenario = Scenario::LinearFixedHorizon;
    ModelParams params;
    Belief belief;
    double alpha = 0.0;
    oracle::GridSpec grid;
    int n_surface = 201;
    int n_samples = 1001;
    std::uint64_t seed = 1;
    int draws = 100;
    bool corrupt = false;
    std::vector<double> sweep_lambda_pu;
    SimConfig sim;
    SimMode sim_mode = SimMode::Dynamics;
    Quality sim_quality = Quality::Good;
    int sim_runs = 1;
    std::string out;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where)
{
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(where + ": unknown field '" + key + "'");
        }
    }
}

inline double number(const json& obj, const std::string& key, const std::string& where)
{
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + "." + key + ": expected a number");
    }
    return v.get<double>();
}

inline long long integer(const json& obj, const std::string& key, const std::string& where)
{
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(where + "." + key + ": expected an integer");
    }
    return v.get<long long>();
}

inline std::string text(const json& obj, const std::string& key, const std::string& where)
{
    const auto& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError(where + "." + key + ": expected a string");
    }
    return v.get<std::string>();
}

inline std::vector<double> numbers(const json& v, const std::string& where)
{
    if (!v.is_array()) {
        throw ConfigError(where + ": expected an array of numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            throw ConfigError(where + ": expected an array of numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

inline Scenario parse_scenario(const std::string& name)
{
    if (auto s = scenario_from_string(name)) {
        return *s;
    }
    std::string known;
    for (Scenario s : kScenarios) {
        known += (known.empty() ? "" : ", ") + std::string(to_string(s));
    }
    throw ConfigError("unknown scenario '" + name + "' (expected one of: " + known + ")");
}

inline void parse_params(const json& j, ModelParams& p)
{
    const std::string w = "params";
    reject_unknown(j, {"lambda_ps_g", "lambda_ps_b", "lambda_pu", "n_pool", "tau", "gamma_th"}, w);
    if (j.contains("lambda_ps_g")) p.lambda_ps_g = number(j, "lambda_ps_g", w);
    if (j.contains("lambda_ps_b")) p.lambda_ps_b = number(j, "lambda_ps_b", w);
    if (j.contains("lambda_pu")) p.lambda_pu = number(j, "lambda_pu", w);
    if (j.contains("n_pool")) p.n_pool = number(j, "n_pool", w);
    if (j.contains("tau")) p.tau = number(j, "tau", w);
    if (j.contains("gamma_th")) p.gamma_th = number(j, "gamma_th", w);
}

inline void parse_belief(const json& j, Belief& b)
{
    const std::string w = "belief";
    reject_unknown(j, {"pi_g", "pi_b"}, w);
    if (!j.contains("pi_g")) {
        throw ConfigError("belief.pi_g is required");
    }
    b = Belief::from_good(number(j, "pi_g", w));
    if (j.contains("pi_b")) {
        b.pi_b = number(j, "pi_b", w);
    }
}

inline void parse_grid(const json& j, oracle::GridSpec& g)
{
    const std::string w = "grid";
    reject_unknown(j, {"n_beta", "n_alpha", "tol_factor"}, w);
    if (j.contains("n_beta")) g.n_beta = static_cast<int>(integer(j, "n_beta", w));
    if (j.contains("n_alpha")) g.n_alpha = static_cast<int>(integer(j, "n_alpha", w));
    if (j.contains("tol_factor")) g.tol_factor = number(j, "tol_factor", w);
}

inline void parse_sim(const json& j, RunConfig& c)
{
    const std::string w = "sim";
    reject_unknown(j,
                   {"mode", "quality", "runs", "n_push_pool", "n_agents", "rounds",
                    "update_fraction", "initial"},
                   w);
    if (j.contains("mode")) {
        const auto m = text(j, "mode", w);
        if (m == "dynamics") {
            c.sim_mode = SimMode::Dynamics;
        } else if (m == "views") {
            c.sim_mode = SimMode::Views;
        } else {
            throw ConfigError("sim.mode must be 'dynamics' or 'views'");
        }
    }
    if (j.contains("quality")) {
        const auto q = text(j, "quality", w);
        if (q != "good" && q != "bad") {
            throw ConfigError("sim.quality must be 'good' or 'bad'");
        }
        c.sim_quality = q == "good" ? Quality::Good : Quality::Bad;
    }
    if (j.contains("runs")) c.sim_runs = static_cast<int>(integer(j, "runs", w));
    if (j.contains("n_push_pool")) c.sim.n_push_pool = static_cast<long>(integer(j, "n_push_pool", w));
    if (j.contains("n_agents")) c.sim.n_agents = static_cast<int>(integer(j, "n_agents", w));
    if (j.contains("rounds")) c.sim.rounds = static_cast<int>(integer(j, "rounds", w));
    if (j.contains("update_fraction")) c.sim.update_fraction = number(j, "update_fraction", w);
    if (j.contains("initial")) {
        const auto& init = j.at("initial");
        if (init.is_array()) {
            c.sim.initial.kind = InitialThresholds::Kind::Sequence;
            c.sim.initial.values = numbers(init, "sim.initial");
        } else {
            reject_unknown(init, {"lo", "hi"}, "sim.initial");
            c.sim.initial.kind = InitialThresholds::Kind::Uniform;
            c.sim.initial.lo = number(init, "lo", "sim.initial");
            c.sim.initial.hi = number(init, "hi", "sim.initial");
        }
    }
}

} // namespace detail

/// Builds a RunConfig from a JSON document. Every field is optional; unknown
/// fields and wrongly typed values raise ConfigError.
inline RunConfig parse_config(const json& j)
{
    using namespace detail;
    RunConfig c;
    reject_unknown(j,
                   {"scenario", "params", "belief", "alpha", "grid", "n_surface", "n_samples",
                    "seed", "draws", "corrupt", "sweep_lambda_pu", "sim", "out"},
                   "config");
    try {
        if (j.contains("scenario")) c.scenario = parse_scenario(text(j, "scenario", "config"));
        if (j.contains("params")) parse_params(j.at("params"), c.params);
        if (j.contains("belief")) parse_belief(j.at("belief"), c.belief);
        if (j.contains("alpha")) c.alpha = number(j, "alpha", "config");
        if (j.contains("grid")) parse_grid(j.at("grid"), c.grid);
        if (j.contains("n_surface")) c.n_surface = static_cast<int>(integer(j, "n_surface", "config"));
        if (j.contains("n_samples")) c.n_samples = static_cast<int>(integer(j, "n_samples", "config"));
        if (j.contains("seed")) {
            const auto s = integer(j, "seed", "config");
            if (s < 0) {
                throw ConfigError("config.seed must be non-negative");
            }
            c.seed = static_cast<std::uint64_t>(s);
        }
        if (j.contains("draws")) c.draws = static_cast<int>(integer(j, "draws", "config"));
        if (j.contains("corrupt")) {
            if (!j.at("corrupt").is_boolean()) {
                throw ConfigError("config.corrupt: expected a boolean");
            }
            c.corrupt = j.at("corrupt").get<bool>();
        }
        if (j.contains("sweep_lambda_pu")) {
            c.sweep_lambda_pu = numbers(j.at("sweep_lambda_pu"), "config.sweep_lambda_pu");
        }
        if (j.contains("sim")) parse_sim(j.at("sim"), c);
        if (j.contains("out")) c.out = text(j, "out", "config");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

/// Checks run-wide settings once flags have been applied. Model-level problems
/// (tau <= 0, gamma_th <= lambda_pu, ...) surface as ConfigError here.
inline void validate_config(const RunConfig& c)
{
    try {
        validate(c.params, c.scenario);
        c.belief.validate();
        c.grid.validate();
        c.sim.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) {
        throw ConfigError("alpha must be finite and non-negative");
    }
    if (c.n_surface < 2 || c.n_samples < 2) {
        throw ConfigError("n_surface and n_samples must be >= 2");
    }
    if (c.draws < 1 || c.sim_runs < 1) {
        throw ConfigError("draws and sim.runs must be >= 1");
    }
}

} // namespace viewgame::cli
