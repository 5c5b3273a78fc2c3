#pragma once

// The six subcommands as pure functions RunConfig -> documents. The binary
// decides where the documents go; tests inspect them directly.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewgame/cli/config.hpp"
#include "viewgame/dynamics.hpp"
#include "viewgame/equilibrium.hpp"
#include "viewgame/oracle.hpp"
#include "viewgame/stochastic.hpp"
#include "viewgame/utility.hpp"

namespace viewgame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct Document {
    std::string suffix;    // "" for the primary output
    std::string extension; // csv, json or txt
    std::string body;
};

struct CommandResult {
    int code = kExitOk;
    std::vector<Document> documents;
};

/// 12 significant digits, C locale.
inline std::string fmt(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// JSON number, or a string for non-finite values (JSON has no infinity).
inline json jnum(double v)
{
    return std::isfinite(v) ? json(v) : json(fmt(v));
}

inline json params_json(const ModelParams& p)
{
    json j{{"lambda_ps_g", p.lambda_ps_g},
           {"lambda_ps_b", p.lambda_ps_b},
           {"lambda_pu", p.lambda_pu},
           {"tau", p.tau}};
    if (p.n_pool) j["n_pool"] = *p.n_pool;
    if (p.gamma_th) j["gamma_th"] = *p.gamma_th;
    return j;
}

inline json belief_json(const Belief& b) { return json{{"pi_g", b.pi_g}, {"pi_b", b.pi_b}}; }

inline json intervals_json(const std::vector<Interval>& ivs)
{
    json a = json::array();
    for (const auto& iv : ivs) {
        a.push_back(json::array({iv.lo, iv.hi}));
    }
    return a;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

inline CommandResult cmd_trajectory(const RunConfig& c)
{
    CommandResult r;
    const PushKind push = push_of(c.scenario);
    const MetricKind metric = metric_of(c.scenario);
    for (Quality q : kQualities) {
        const auto tr = dynamics::sample_trajectory(q, c.alpha, c.params, push, metric, c.n_samples);
        std::string body = "t,x,xdot\n";
        for (const auto& s : tr.samples) {
            body += fmt(s.t) + "," + fmt(s.x) + "," + fmt(s.xdot) + "\n";
        }
        r.documents.push_back({q == Quality::Good ? "good" : "bad", "csv", std::move(body)});
    }
    return r;
}

inline CommandResult cmd_surface(const RunConfig& c)
{
    CommandResult r;
    std::string body = "beta,utility,branch\n";
    for (const auto& row : utility_surface(c.alpha, c.belief, c.params, c.scenario, c.n_surface)) {
        body += fmt(row.beta) + "," + fmt(row.utility) + "," + row.branch + "\n";
    }
    r.documents.push_back({"", "csv", std::move(body)});
    return r;
}

inline CommandResult cmd_best_response(const RunConfig& c)
{
    const auto br = response_set(c.alpha, c.belief, c.params, c.scenario);
    const auto grid = oracle::grid_best_response(c.alpha, c.belief, c.params, c.scenario, c.grid);
    const bool closed_form = c.scenario == Scenario::LinearFixedHorizon ||
                             c.scenario == Scenario::ExponentialFixedHorizon ||
                             c.scenario == Scenario::SideInformation;
    const double tol = c.grid.tol(c.params);
    // utilities of reported points are real evaluations, so only a shortfall
    // against the grid can reveal an error
    const bool agrees = br.utility >= grid.best - tol;
    json j{{"scenario", std::string(to_string(c.scenario))},
           {"params", params_json(c.params)},
           {"belief", belief_json(c.belief)},
           {"alpha", c.alpha},
           {"method", closed_form ? "closed_form" : "grid"},
           {"kind", to_string(br.kind)},
           {"points", br.points},
           {"intervals", intervals_json(br.intervals)},
           {"utility", br.utility},
           {"oracle_best", grid.best},
           {"oracle_checked", agrees}};
    CommandResult r;
    r.code = agrees ? kExitOk : kExitFailure;
    r.documents.push_back({"", "json", dump(j)});
    return r;
}

// ---------------------------------------------------------------------------

struct Report {
    EquilibriumSet set;
    std::optional<SideInfoDiagnostics> diagnostics;
};

/// Closed-form classification. The trend-times-viewcount linear game reduces
/// to the plain linear game with squared rates; the exponential one has no
/// closed form and falls back to the grid search.
inline Report classify(const Belief& b, const ModelParams& p, Scenario s, const oracle::GridSpec& g)
{
    switch (s) {
    case Scenario::LinearFixedHorizon:
        return {classify_linear(b, p), std::nullopt};
    case Scenario::ExponentialFixedHorizon:
        return {classify_exponential(b, p), std::nullopt};
    case Scenario::VariableHorizon:
        return {classify_variable_horizon(b, p), std::nullopt};
    case Scenario::SideInformation: {
        auto c = classify_side_info(b, p);
        return {c.set, c.diagnostics};
    }
    case Scenario::TrendViewcountLinear: {
        ModelParams sq = p;
        sq.lambda_ps_g *= p.lambda_ps_g;
        sq.lambda_ps_b *= p.lambda_ps_b;
        sq.lambda_pu *= p.lambda_pu;
        auto set = classify_linear(b, sq);
        set.case_label = "squared-" + set.case_label;
        return {set, std::nullopt};
    }
    case Scenario::TrendViewcountExponential:
        break;
    }
    return {make_equilibrium_set(oracle::find_symmetric_equilibria(b, p, s, g), {}, "grid-search"),
            std::nullopt};
}

inline json report_json(const Report& rep, const Belief& b, const ModelParams& p, Scenario s,
                        const oracle::Verdict& v)
{
    json syms = json::object();
    for (const auto& sym : rep.set.symbols) {
        syms[sym.name] = jnum(sym.value);
    }
    json j{{"scenario", std::string(to_string(s))},
           {"params", params_json(p)},
           {"belief", belief_json(b)},
           {"case", rep.set.case_label},
           {"kind", to_string(rep.set.kind)},
           {"points", rep.set.points},
           {"intervals", intervals_json(rep.set.intervals)},
           {"symbols", syms},
           {"oracle_checked", v.ok()},
           {"oracle", {{"sound", v.sound}, {"complete", v.complete},
                       {"unsound", v.unsound}, {"missing", v.missing}}}};
    if (rep.diagnostics) {
        const auto& d = *rep.diagnostics;
        j["diagnostics"] = {{"beta1", jnum(d.beta1)},
                            {"beta2", jnum(d.beta2)},
                            {"lambda_pu_s", jnum(d.lambda_pu_s)},
                            {"L", d.L},
                            {"x", d.x},
                            {"positive_measure", d.positive_measure}};
    }
    return j;
}

inline json classify_one(const Belief& b, const ModelParams& p, Scenario s, const oracle::GridSpec& g)
{
    const auto rep = classify(b, p, s, g);
    const auto v = oracle::check_classification(rep.set, b, p, s, g);
    return report_json(rep, b, p, s, v);
}

/// One report, or with sweep_lambda_pu a table of reports over the pull rate.
inline CommandResult cmd_classify(const RunConfig& c)
{
    CommandResult r;
    if (c.sweep_lambda_pu.empty()) {
        r.documents.push_back({"", "json", dump(classify_one(c.belief, c.params, c.scenario, c.grid))});
        return r;
    }
    json rows = json::array();
    for (double lpu : c.sweep_lambda_pu) {
        ModelParams p = c.params;
        p.lambda_pu = lpu;
        try {
            validate(p, c.scenario);
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("sweep_lambda_pu: ") + e.what());
        }
        rows.push_back(classify_one(c.belief, p, c.scenario, c.grid));
    }
    r.documents.push_back({"", "json", dump(json{{"sweep", rows}})});
    return r;
}

/// Negative control: swap the reported set for a wrong one.
inline EquilibriumSet corrupted(const EquilibriumSet& s, const ModelParams& p, Scenario sc)
{
    const double top = alpha_domain_max(p, sc);
    if (s.contains(0.0, 1e-12 * top)) {
        return make_equilibrium_set({0.5 * top}, {}, "corrupt");
    }
    return make_equilibrium_set({0.0}, {}, "corrupt");
}

inline CommandResult cmd_verify(const RunConfig& c)
{
    Rng rng(c.seed);
    std::string body;
    int passed = 0;
    for (int i = 0; i < c.draws; ++i) {
        const auto d = oracle::random_draw(c.scenario, rng);
        auto rep = classify(d.belief, d.params, c.scenario, c.grid);
        if (c.corrupt) {
            rep.set = corrupted(rep.set, d.params, c.scenario);
        }
        const auto v = oracle::check_classification(rep.set, d.belief, d.params, c.scenario, c.grid);
        passed += v.ok() ? 1 : 0;
        char line[256];
        std::snprintf(line, sizeof line, "draw %04d %s case=%s kind=%s sound=%d complete=%d pi_g=%s\n",
                      i, v.ok() ? "PASS" : "FAIL", rep.set.case_label.c_str(),
                      to_string(rep.set.kind).c_str(), v.sound ? 1 : 0, v.complete ? 1 : 0,
                      fmt(d.belief.pi_g).c_str());
        body += line;
    }
    body += "summary scenario=" + std::string(to_string(c.scenario)) + " seed=" +
            std::to_string(c.seed) + " passed=" + std::to_string(passed) + "/" +
            std::to_string(c.draws) + (c.corrupt ? " corrupt=1" : "") + "\n";
    CommandResult r;
    r.code = passed == c.draws ? kExitOk : kExitFailure;
    r.documents.push_back({"", "txt", std::move(body)});
    return r;
}

// ---------------------------------------------------------------------------

inline CommandResult cmd_simulate(const RunConfig& c)
{
    SimConfig sim = c.sim;
    sim.seed = c.seed;
    CommandResult r;
    if (c.sim_mode == SimMode::Views) {
        const auto mf = mean_field_check(c.sim_quality, c.alpha, c.params, push_of(c.scenario), sim,
                                         c.sim_runs, c.n_samples);
        std::string body = "t,mean_x,model_x\n";
        for (std::size_t i = 0; i < mf.t.size(); ++i) {
            body += fmt(mf.t[i]) + "," + fmt(mf.mean_x[i]) + "," + fmt(mf.model_x[i]) + "\n";
        }
        json s{{"mode", "views"},
               {"scenario", std::string(to_string(c.scenario))},
               {"params", params_json(c.params)},
               {"alpha", c.alpha},
               {"quality", c.sim_quality == Quality::Good ? "good" : "bad"},
               {"seed", c.seed},
               {"runs", c.sim_runs},
               {"n_push_pool", sim.n_push_pool},
               {"sup_error", mf.sup_error},
               {"relative_error", mf.relative_error}};
        r.documents.push_back({"", "csv", std::move(body)});
        r.documents.push_back({"summary", "json", dump(s)});
        return r;
    }
    const auto dyn = best_response_dynamics(c.belief, c.params, c.scenario, sim);
    std::string body = "round,agent_id,threshold\n";
    for (const auto& snap : dyn.snapshots) {
        for (std::size_t i = 0; i < snap.thresholds.size(); ++i) {
            body += std::to_string(snap.round) + "," + std::to_string(i) + "," +
                    fmt(snap.thresholds[i]) + "\n";
        }
    }
    const bool fixed = oracle::is_grid_fixed_point(std::clamp(dyn.final_median, 0.0,
                                                              alpha_domain_max(c.params, c.scenario)),
                                                   c.belief, c.params, c.scenario, c.grid);
    json s{{"mode", "dynamics"},
           {"scenario", std::string(to_string(c.scenario))},
           {"params", params_json(c.params)},
           {"belief", belief_json(c.belief)},
           {"seed", c.seed},
           {"n_agents", sim.n_agents},
           {"update_fraction", sim.update_fraction},
           {"status", to_string(dyn.status)},
           {"rounds_run", dyn.rounds_run},
           {"tolerance", dyn.tolerance},
           {"settled", {{"median", dyn.final_median},
                        {"min", dyn.final_min},
                        {"max", dyn.final_max},
                        {"mean", dyn.final_mean}}},
           {"median_oracle_fixed_point", fixed}};
    r.documents.push_back({"", "csv", std::move(body)});
    r.documents.push_back({"summary", "json", dump(s)});
    return r;
}

} // namespace viewgame::cli
