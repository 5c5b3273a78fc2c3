// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "viewgame/crossing_oracle.hpp"
#include "viewgame/dynamics.hpp"
#include "viewgame/equilibrium.hpp"
#include "viewgame/numerics.hpp"
#include "viewgame/oracle.hpp"
#include "viewgame/stochastic.hpp"
#include "viewgame/utility.hpp"

using namespace viewgame;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

ModelParams reference_params()
{
    ModelParams p;
    p.lambda_ps_g = 0.1;
    p.lambda_ps_b = 0.01;
    p.lambda_pu = 150.0;
    p.n_pool = 1000.0;
    p.tau = 10.0;
    return p;
}

// 1 -------------------------------------------------------------------------

Outcome lambert_residual()
{
    constexpr int n = 10000;
    const double lo = -1.0 / M_E + 1e-9;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        // half the points on [lo, 1], half log-spaced on [1, 1e6]
        const double x = i < n / 2 ? lo + (1.0 - lo) * i / (n / 2 - 1)
                                   : std::pow(10.0, 6.0 * (i - n / 2) / (n / 2 - 1));
        const double w = numerics::lambert_w0(x);
        worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
    }
    return {worst <= 1e-12, "max |W e^W - x| / max(1,|x|) = " + sci(worst) + " over 10000 points"};
}

// 2 -------------------------------------------------------------------------

double metric_peak(Quality q, double t_alpha, const ModelParams& p, PushKind push, MetricKind m)
{
    double best = 0.0;
    for (int i = 0; i <= 400; ++i) {
        best = std::max(best, dynamics::metric_at(p.tau * i / 400.0, q, t_alpha, p, push, m));
    }
    return best;
}

Outcome crossing_agreement()
{
    constexpr int draws = 1000;
    Rng rng(2);
    int bad = 0, total = 0, infinite = 0;
    for (PushKind push : {PushKind::Linear, PushKind::ExponentialSaturating}) {
        for (MetricKind metric : {MetricKind::PlainViewcount, MetricKind::Trend,
                                  MetricKind::TrendTimesViewcount, MetricKind::SideInformation}) {
            for (int d = 0; d < draws; ++d) {
                ModelParams p;
                p.n_pool = rng.uniform(100.0, 5000.0);
                p.lambda_ps_g = rng.uniform(0.01, 0.31);
                p.lambda_ps_b = p.lambda_ps_g * rng.uniform(0.05, 1.0);
                p.lambda_pu = push == PushKind::Linear ? p.lambda_ps_g * rng.uniform(0.0, 3.0)
                                                       : p.lambda_ps_g * *p.n_pool * rng.uniform(0.0, 3.0);
                p.tau = rng.uniform(2.0, 42.0);
                const Quality q = rng.uniform() < 0.5 ? Quality::Good : Quality::Bad;
                const double alpha = 1.2 * rng.uniform() * metric_peak(q, numerics::kInf, p, push, metric);
                const double ta = dynamics::activation_time(q, alpha, p, push, metric);
                const double beta = 1.2 * rng.uniform() * metric_peak(q, ta, p, push, metric);
                const double fast = dynamics::crossing_time(beta, q, alpha, p, push, metric);
                const double slow = oracle::crossing_time_by_search(beta, q, alpha, p, push, metric);
                ++total;
                if (std::isinf(fast) || std::isinf(slow)) {
                    ++infinite;
                    bad += fast == slow ? 0 : 1;
                } else {
                    bad += std::abs(fast - slow) <= 1e-9 * std::max(std::abs(fast), std::abs(slow)) ? 0 : 1;
                }
            }
        }
    }
    return {bad == 0, std::to_string(total - bad) + "/" + std::to_string(total) +
                          " draws agree over 8 pairings (" + std::to_string(infinite) +
                          " never-crossing cases)"};
}

// 3-5 -----------------------------------------------------------------------

Outcome classification_draws(Scenario s, const std::function<EquilibriumSet(const Belief&, const ModelParams&)>& classify,
                      std::uint64_t seed, int draws, std::string* failures = nullptr)
{
    Rng rng(seed);
    const oracle::GridSpec g; // 2000-point beta grid, tol 1e-6 tau
    int ok = 0, near_ties = 0;
    double worst_deficit = 0.0;
    std::string why;
    for (int d = 0; d < draws; ++d) {
        const auto dr = oracle::random_draw(s, rng);
        const auto set = classify(dr.belief, dr.params);
        const auto v = oracle::check_classification(set, dr.belief, dr.params, s, g);
        if (v.ok()) {
            ++ok;
            continue;
        }
        // diagnosis only: how far from a best response are the missed points really?
        if (v.sound) {
            oracle::GridSpec fine;
            fine.n_beta = 20000;
            bool all_near = true;
            for (double a : v.missing) {
                const double best = oracle::grid_best_response(a, dr.belief, dr.params, s, fine).best;
                const double deficit = best - utility(a, a, dr.belief, dr.params, s);
                all_near = all_near && deficit > 1e-12 * dr.params.tau && deficit <= g.tol(dr.params);
                worst_deficit = std::max(worst_deficit, deficit / dr.params.tau);
            }
            near_ties += all_near ? 1 : 0;
        }
        if (why.size() < 400) {
            why += " draw " + std::to_string(d) + " case " + set.case_label +
                   (v.sound ? "" : " unsound@" + sci(v.unsound.front())) +
                   (v.complete ? "" : " missing@" + sci(v.missing.front()) + " (dist " +
                                          sci(set.distance(v.missing.front())) + ")") + ";";
        }
    }
    if (failures) {
        *failures = why;
        if (near_ties > 0) {
            *failures += " " + std::to_string(near_ties) + " of the failing draws miss only " +
                         "epsilon-equilibria: strictly suboptimal thresholds whose utility deficit " +
                         "(up to " + sci(worst_deficit) + " tau on a 20000-point grid) lies inside " +
                         "the 1e-6 tau slack";
        }
    }
    return {ok == draws, std::to_string(ok) + "/" + std::to_string(draws) +
                             " random draws sound and complete against the grid oracle"};
}

Outcome linear_check()
{
    std::string why;
    auto o = classification_draws(Scenario::LinearFixedHorizon, classify_linear, 1, 100, &why);
    o.detail += why;
    return o;
}

/// Best grid point, and whether alpha beats its neighbours at +-0.1% of the cap.
struct Shape {
    double argmax = 0.0;
    bool local_max_at_alpha = false;
};

Shape utility_shape(double alpha, double pi_g, const ModelParams& p)
{
    const auto s = Scenario::ExponentialFixedHorizon;
    const Belief b = Belief::from_good(pi_g);
    const double cap = strategy_cap(alpha, p, s);
    Shape sh;
    double best = -1e300;
    for (double beta : oracle::beta_grid(alpha, p, s, 2000)) {
        const double u = utility(alpha, beta, b, p, s);
        if (u > best) {
            best = u;
            sh.argmax = beta;
        }
    }
    const double h = 1e-3 * cap;
    const double ua = utility(alpha, alpha, b, p, s);
    sh.local_max_at_alpha = alpha > h && alpha + h < cap &&
                            ua > utility(alpha, alpha - h, b, p, s) &&
                            ua > utility(alpha, alpha + h, b, p, s);
    return sh;
}

Outcome exponential_check()
{
    std::string why;
    auto o = classification_draws(Scenario::ExponentialFixedHorizon, classify_exponential, 1, 100, &why);
    const auto p = reference_params();
    const double alpha = 40.0;
    const double cap = strategy_cap(alpha, p, Scenario::ExponentialFixedHorizon);
    const auto s0 = utility_shape(alpha, 0.0, p);
    const auto s1 = utility_shape(alpha, 1.0, p);
    const auto smid = utility_shape(alpha, 0.75, p);
    const bool shape = std::abs(s0.argmax - cap) <= 1e-9 * cap && s1.argmax == 0.0 &&
                       smid.local_max_at_alpha;
    std::string seq;
    for (double pg : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto sh = utility_shape(alpha, pg, p);
        seq += " pi_G=" + sci(pg) + ":argmax " + sci(sh.argmax) +
               (sh.local_max_at_alpha ? " (local max at alpha)" : "");
    }
    const double cap400 = alpha_domain_max(p, Scenario::ExponentialFixedHorizon);
    o.pass = o.pass && shape;
    o.detail += "; utility shape at alpha=40 (cap " + sci(cap) + ") " + (shape ? "ok" : "WRONG") +
                ":" + seq + "; note alpha=400 exceeds the admissible range [0, " + sci(cap400) +
                "] and is not evaluated" + why;
    return o;
}

Outcome variable_horizon_check()
{
    std::string why;
    auto o = classification_draws(Scenario::VariableHorizon, classify_variable_horizon, 1, 100, &why);
    auto p = reference_params();
    bool rejected = false;
    for (double gamma : {p.lambda_pu, 0.5 * p.lambda_pu}) {
        p.gamma_th = gamma;
        try {
            classify_variable_horizon(Belief{0.6, 0.4}, p);
        } catch (const InfiniteHorizonError&) {
            rejected = true;
            continue;
        }
        rejected = false;
        break;
    }
    o.pass = o.pass && rejected;
    o.detail += std::string("; gamma_th <= lambda_pu ") +
                (rejected ? "rejected with the infinite-horizon error" : "NOT rejected") + why;
    return o;
}

// 6 -------------------------------------------------------------------------

Outcome side_info_transition()
{
    struct Family {
        Belief b;
        double lg, lb, tau;
    };
    const Family families[] = {
        {{0.6, 0.4}, 0.3, 0.1, 10.0},
        {{0.7, 0.3}, 0.5, 0.05, 4.0},
        {{0.55, 0.45}, 1.0, 0.4, 20.0},
    };
    constexpr int n = 1000;
    bool ok = true;
    std::string detail;
    double worst_tie = 0.0;
    for (const auto& f : families) {
        ModelParams p;
        p.lambda_ps_g = f.lg;
        p.lambda_ps_b = f.lb;
        p.tau = f.tau;
        p.lambda_pu = 0.0;
        const double crit = side_info_critical_rate(f.b, p);
        if (!(crit > 0.0)) {
            ok = false;
            detail += " family without positive critical rate;";
            continue;
        }
        const auto d0 = side_info_diagnostics(f.b, p);
        const double tie = std::abs(d0.beta1 - d0.beta2);
        worst_tie = std::max(worst_tie, tie / std::max(1.0, std::abs(d0.beta2)));

        int below_extremal = 0, above_interval = 0, below_n = 0, above_n = 0;
        bool mono_below = true, mono_above = true;
        double prev_below = 0.0, prev_above = 0.0;
        int dir_below = 0, dir_above = 0;
        bool first_below = true, first_above = true;
        for (int i = 0; i < n; ++i) {
            p.lambda_pu = 2.0 * crit * (i + 0.5) / n;
            if (std::abs(p.lambda_pu - crit) < 1e-9 * crit) {
                continue;
            }
            const auto c = classify_side_info(f.b, p);
            const double top = alpha_domain_max(p, Scenario::SideInformation);
            const double b1 = c.diagnostics.beta1;
            const bool below = p.lambda_pu < crit;
            double& prev = below ? prev_below : prev_above;
            int& dir = below ? dir_below : dir_above;
            bool& first = below ? first_below : first_above;
            bool& mono = below ? mono_below : mono_above;
            if (!first) {
                const int s = b1 > prev ? 1 : (b1 < prev ? -1 : 0);
                if (dir == 0) {
                    dir = s;
                } else if (s != 0 && s != dir) {
                    mono = false;
                }
            }
            first = false;
            prev = b1;
            if (below) {
                ++below_n;
                bool extremal = c.set.intervals.empty();
                for (double x : c.set.points) {
                    extremal = extremal && (x == 0.0 || x == top);
                }
                below_extremal += extremal ? 1 : 0;
            } else {
                ++above_n;
                above_interval += c.set.kind == EquilibriumKind::Interval &&
                                          c.set.intervals[0].length() > 0.0
                                      ? 1
                                      : 0;
            }
        }
        const bool fam_ok = below_extremal == below_n && above_interval == above_n && mono_below &&
                            mono_above;
        ok = ok && fam_ok;
        detail += " crit " + sci(crit) + ": below " + std::to_string(below_extremal) + "/" +
                  std::to_string(below_n) + " extremal, above " + std::to_string(above_interval) +
                  "/" + std::to_string(above_n) + " interval, beta1 monotone " +
                  (mono_below && mono_above ? "yes" : "NO") + ";";
    }
    ok = ok && worst_tie <= 1e-9;
    return {ok, "3 families, 1000-point sweeps over (0, 2 crit):" + detail +
                    " max |beta1(0)-beta2| rel " + sci(worst_tie)};
}

// 7 -------------------------------------------------------------------------

Outcome squared_reduction()
{
    Rng rng(7);
    int bad = 0, total = 0;
    double worst = 0.0;
    for (int d = 0; d < 10; ++d) {
        ModelParams p;
        p.lambda_ps_g = rng.uniform(0.2, 2.0);
        p.lambda_ps_b = p.lambda_ps_g * rng.uniform(0.1, 1.0);
        p.lambda_pu = rng.uniform(0.0, 2.0);
        p.tau = rng.uniform(1.0, 20.0);
        const Belief b = Belief::from_good(rng.uniform());
        ModelParams sq = p;
        sq.lambda_ps_g = p.lambda_ps_g * p.lambda_ps_g;
        sq.lambda_ps_b = p.lambda_ps_b * p.lambda_ps_b;
        sq.lambda_pu = p.lambda_pu * p.lambda_pu;
        const double top = alpha_domain_max(p, Scenario::TrendViewcountLinear);
        for (int i = 0; i < 10; ++i) {
            const double alpha = top * i / 9.0;
            const double cap = strategy_cap(alpha, p, Scenario::TrendViewcountLinear);
            for (int j = 0; j < 10; ++j) {
                const double beta = cap * j / 9.0;
                const double a = utility(alpha, beta, b, p, Scenario::TrendViewcountLinear);
                const double c = utility(alpha, beta, b, sq, Scenario::LinearFixedHorizon);
                const double err = std::abs(a - c) / std::max(1.0, std::abs(c));
                worst = std::max(worst, err);
                bad += err <= 1e-9 ? 0 : 1;
                ++total;
            }
        }
    }
    return {bad == 0, std::to_string(total - bad) + "/" + std::to_string(total) +
                          " (alpha, beta) points agree, max relative gap " + sci(worst)};
}

// 8 -------------------------------------------------------------------------

Outcome mean_field()
{
    auto p = reference_params();
    p.lambda_pu = 0.0;
    SimConfig c;
    c.seed = 1;
    c.n_push_pool = 10000;
    const auto r = mean_field_check(Quality::Good, 0.0, p, PushKind::ExponentialSaturating, c, 100);
    return {r.relative_error < 0.05, "N=10^4, 100 seeds: sup-norm error " + sci(r.sup_error) +
                                         " views, relative " + sci(r.relative_error)};
}

// 9 -------------------------------------------------------------------------

Outcome initial_condition_dependence()
{
    ModelParams p;
    p.lambda_ps_g = 0.1;
    p.lambda_ps_b = 0.01;
    p.lambda_pu = 150.0;
    p.tau = 10.0;
    const Belief b{0.75, 0.25};
    const auto s = Scenario::LinearFixedHorizon;
    const auto set = classify_linear(b, p);
    const double top = alpha_domain_max(p, s);
    auto run = [&](double lo, double hi) {
        SimConfig c;
        c.seed = 9;
        c.n_agents = 101;
        c.rounds = 1000;
        c.update_fraction = 0.2;
        c.initial.lo = lo;
        c.initial.hi = hi;
        return best_response_dynamics(b, p, s, c);
    };
    const auto low = run(0.0, 0.3 * top);
    const auto high = run(0.6 * top, top);
    bool ok = set.case_label == "ii";
    std::string detail = "case " + set.case_label + ";";
    for (const auto* r : {&low, &high}) {
        const bool fixed = oracle::is_grid_fixed_point(r->final_median, b, p, s, oracle::GridSpec{});
        const bool inside = r->final_median >= 0.0 && r->final_median <= top;
        const bool collapsed = r->final_max - r->final_min <= 2.0 * r->tolerance;
        ok = ok && r->status == DynamicsStatus::Converged && fixed && inside && collapsed;
        detail += " settled at " + sci(r->final_median) + " after " + std::to_string(r->rounds_run) +
                  " rounds (" + to_string(r->status) + ", oracle fixed point " +
                  (fixed ? "yes" : "no") + ");";
    }
    const bool distinct = std::abs(high.final_median - low.final_median) > 0.1 * top;
    ok = ok && distinct;
    detail += distinct ? " distinct" : " NOT distinct";
    return {ok, detail};
}

// 10 ------------------------------------------------------------------------

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    const fs::path dir = fs::temp_directory_path() / "viewgame_acceptance";
    fs::create_directories(dir);
    std::ofstream(dir / "verify.json") << R"({"scenario": "exponential", "draws": 10, "seed": 5,
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 150, "n_pool": 1000}})";
    std::ofstream(dir / "dyn.json") << R"({"scenario": "linear", "seed": 5, "belief": {"pi_g": 0.75},
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 150},
        "sim": {"n_agents": 51, "initial": {"lo": 0, "hi": 0.1}}})";
    std::ofstream(dir / "views.json") << R"({"scenario": "exponential", "seed": 5, "n_samples": 201,
        "params": {"lambda_ps_g": 0.1, "lambda_ps_b": 0.01, "lambda_pu": 150, "n_pool": 1000},
        "alpha": 30, "sim": {"mode": "views", "runs": 10, "n_push_pool": 1000}})";
    const std::string cli = VIEWGAME_CLI_PATH;
    const char* jobs[][3] = {{"verify", "verify.json", "verify.txt"},
                             {"simulate", "dyn.json", "dyn.csv"},
                             {"simulate", "views.json", "views.csv"}};
    std::vector<std::string> files;
    bool ok = true;
    for (int k = 0; k < 2; ++k) {
        for (const auto& j : jobs) {
            const fs::path out = dir / ("run" + std::to_string(k)) / j[2];
            const std::string cmd = cli + " " + j[0] + " --config " + (dir / j[1]).string() +
                                    " --out " + out.string() + " >/dev/null 2>&1";
            ok = ok && std::system(cmd.c_str()) == 0;
        }
    }
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dir / "run0")) {
        const auto other = dir / "run1" / entry.path().filename();
        const auto a = slurp(entry.path());
        ok = ok && !a.empty() && a == slurp(other);
        ++compared;
    }
    ok = ok && compared == 5;
    return {ok, std::to_string(compared) + " output files from verify and simulate byte-identical across two runs"};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double limit_s; // 0 = no runtime limit
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "lambert_residual", 1.0, lambert_residual},
        {2, "crossing_closed_forms", 10.0, crossing_agreement},
        {3, "linear_classification", 30.0, linear_check},
        {4, "exponential_classification", 60.0, exponential_check},
        {5, "variable_horizon_classification", 60.0, variable_horizon_check},
        {6, "side_info_phase_transition", 10.0, side_info_transition},
        {7, "trend_linear_squared_reduction", 0.0, squared_reduction},
        {8, "mean_field_limit", 60.0, mean_field},
        {9, "initial_condition_dependence", 0.0, initial_condition_dependence},
        {10, "determinism", 0.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        char timing[64];
        if (c.limit_s > 0.0) {
            std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", secs, c.limit_s);
        } else {
            std::snprintf(timing, sizeof timing, "%.2f s", secs);
        }
        std::printf("%s %2d %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    timing);
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
