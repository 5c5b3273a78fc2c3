#pragma once

// Grid search over thresholds. Shares only the utility evaluation with the
// closed-form code, so it can referee the classifications.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "viewgame/crossing_oracle.hpp"
#include "viewgame/equilibrium.hpp"
#include "viewgame/random.hpp"
#include "viewgame/utility.hpp"

namespace viewgame::oracle {

struct GridSpec {
    int n_beta = 2000;
    int n_alpha = 100;
    double tol_factor = 1e-6; // utility slack in units of tau

    double tol(const ModelParams& p) const { return tol_factor * p.tau; }

    void validate() const
    {
        if (n_beta < 100 || n_alpha < 100) {
            throw PreconditionError("GridSpec: n_beta and n_alpha must be >= 100");
        }
        if (!(tol_factor > 0.0)) {
            throw PreconditionError("GridSpec: tolerance must be positive");
        }
    }
};

/// Uniform grid on [0, cap(alpha)] with alpha and both sides of every
/// discontinuity pre-image added.
inline std::vector<double> beta_grid(double alpha, const ModelParams& p, Scenario s, int n)
{
    const double cap = strategy_cap(alpha, p, s);
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n) + 16);
    for (int i = 0; i < n; ++i) {
        g.push_back(i == n - 1 ? cap : cap * i / (n - 1));
    }
    if (alpha <= cap) {
        g.push_back(alpha);
    }
    const double delta = 1e-9 * cap;
    for (double b : utility_breakpoints(alpha, p, s)) {
        for (double v : {b - delta, b, b + delta}) {
            if (v >= 0.0 && v <= cap) {
                g.push_back(v);
            }
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

struct GridResponse {
    std::vector<double> betas; // grid points within tol of the best
    double best = 0.0;
};

inline GridResponse grid_best_response(double alpha, const Belief& belief, const ModelParams& p,
                                       Scenario s, const GridSpec& g)
{
    g.validate();
    const auto grid = beta_grid(alpha, p, s, g.n_beta);
    std::vector<double> us(grid.size());
    double best = -numerics::kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        us[i] = utility(alpha, grid[i], belief, p, s);
        best = std::max(best, us[i]);
    }
    GridResponse r;
    r.best = best;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (us[i] >= best - g.tol(p)) {
            r.betas.push_back(grid[i]);
        }
    }
    return r;
}

/// alpha is a best response to itself on the grid.
inline bool is_grid_fixed_point(double alpha, const Belief& belief, const ModelParams& p,
                                Scenario s, const GridSpec& g)
{
    const auto r = grid_best_response(alpha, belief, p, s, g);
    return utility(alpha, alpha, belief, p, s) >= r.best - g.tol(p);
}

inline std::vector<double> alpha_grid(const ModelParams& p, Scenario s, int n)
{
    const double top = alpha_domain_max(p, s);
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) {
        a[i] = i == n - 1 ? top : top * i / (n - 1);
    }
    return a;
}

inline std::vector<double> find_symmetric_equilibria(const Belief& belief, const ModelParams& p,
                                                     Scenario s, const GridSpec& g)
{
    std::vector<double> out;
    for (double a : alpha_grid(p, s, g.n_alpha)) {
        if (is_grid_fixed_point(a, belief, p, s, g)) {
            out.push_back(a);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Checking a classification
// ---------------------------------------------------------------------------

struct Verdict {
    bool sound = true;
    bool complete = true;
    int reported_checked = 0;
    int oracle_points = 0;
    std::vector<double> unsound;     // reported, but not a fixed point
    std::vector<double> missing;     // oracle fixed point far from the report
    bool ok() const { return sound && complete; }
};

/// Representative thresholds of a reported set: every point and, for each
/// interval, its endpoints and interior samples.
inline std::vector<double> probe_points(const EquilibriumSet& set, int per_interval = 9)
{
    std::vector<double> v = set.points;
    for (const auto& iv : set.intervals) {
        for (int i = 0; i < per_interval; ++i) {
            v.push_back(iv.lo + (iv.hi - iv.lo) * i / (per_interval - 1));
        }
    }
    return v;
}

/// Soundness: every probed reported threshold passes the grid fixed-point test.
/// Completeness: every grid fixed point lies within one alpha-grid step of the set.
inline Verdict check_classification(const EquilibriumSet& set, const Belief& belief,
                                    const ModelParams& p, Scenario s, const GridSpec& g)
{
    Verdict v;
    for (double a : probe_points(set)) {
        ++v.reported_checked;
        if (!is_grid_fixed_point(a, belief, p, s, g)) {
            v.sound = false;
            v.unsound.push_back(a);
        }
    }
    const double top = alpha_domain_max(p, s);
    const double step = top / (g.n_alpha - 1);
    const auto found = find_symmetric_equilibria(belief, p, s, g);
    v.oracle_points = static_cast<int>(found.size());
    for (double a : found) {
        if (set.distance(a) > step * (1.0 + 1e-9)) {
            v.complete = false;
            v.missing.push_back(a);
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Random admissible parameter draws
// ---------------------------------------------------------------------------

struct Draw {
    Belief belief;
    ModelParams params;
};

/// Parameters satisfying the hypotheses under which each scenario is characterised.
inline Draw random_draw(Scenario s, Rng& rng)
{
    Draw d;
    d.belief = Belief::from_good(rng.uniform());
    ModelParams& p = d.params;
    switch (s) {
    case Scenario::LinearFixedHorizon:
    case Scenario::TrendViewcountLinear:
    case Scenario::SideInformation:
        p.lambda_ps_g = rng.uniform(0.05, 1.0);
        p.lambda_ps_b = p.lambda_ps_g * rng.uniform(0.1, 1.0);
        p.lambda_pu = rng.uniform(0.0, 2.0);
        p.tau = rng.uniform(1.0, 20.0);
        break;
    case Scenario::ExponentialFixedHorizon:
    case Scenario::VariableHorizon:
    case Scenario::TrendViewcountExponential:
        p.n_pool = rng.uniform(100.0, 5000.0);
        p.lambda_ps_g = rng.uniform(0.01, 0.3);
        p.lambda_ps_b = p.lambda_ps_g * rng.uniform(0.05, 0.95);
        p.lambda_pu = p.lambda_ps_g * *p.n_pool * rng.uniform(1.0, 3.0);
        p.tau = rng.uniform(2.0, 60.0);
        if (s == Scenario::VariableHorizon) {
            p.gamma_th = p.lambda_pu + p.lambda_ps_b * *p.n_pool * rng.uniform(0.05, 0.95);
        }
        break;
    }
    return d;
}

} // namespace viewgame::oracle
