#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "viewgame/dynamics.hpp"
#include "viewgame/model.hpp"
#include "viewgame/numerics.hpp"
#include "viewgame/utility.hpp"

namespace viewgame {

enum class EquilibriumKind { Empty, FinitePoints, Interval, IntervalUnionPoints };

inline std::string to_string(EquilibriumKind k)
{
    switch (k) {
    case EquilibriumKind::Empty:
        return "empty";
    case EquilibriumKind::FinitePoints:
        return "finite_points";
    case EquilibriumKind::Interval:
        return "interval";
    case EquilibriumKind::IntervalUnionPoints:
        return "interval_union_points";
    }
    return "?";
}

/// Named threshold kept alongside the numeric answer so reports stay auditable.
struct Symbol {
    std::string name;
    double value = 0.0;
};

struct EquilibriumSet {
    EquilibriumKind kind = EquilibriumKind::Empty;
    std::vector<double> points;
    std::vector<Interval> intervals;
    std::string case_label;
    std::vector<Symbol> symbols;

    bool contains(double a, double tol = 0.0) const
    {
        for (double x : points) {
            if (std::abs(x - a) <= tol) {
                return true;
            }
        }
        for (const auto& iv : intervals) {
            if (iv.contains(a, tol)) {
                return true;
            }
        }
        return false;
    }

    /// Distance from a to the set (+inf when empty).
    double distance(double a) const
    {
        double d = numerics::kInf;
        for (double x : points) {
            d = std::min(d, std::abs(x - a));
        }
        for (const auto& iv : intervals) {
            d = std::min(d, iv.contains(a) ? 0.0 : std::min(std::abs(a - iv.lo), std::abs(a - iv.hi)));
        }
        return d;
    }

    std::optional<double> symbol(const std::string& name) const
    {
        for (const auto& s : symbols) {
            if (s.name == name) {
                return s.value;
            }
        }
        return std::nullopt;
    }
};

/// Normalises points and intervals (degenerate intervals become points,
/// points inside intervals are dropped) and sets the kind.
inline EquilibriumSet make_equilibrium_set(std::vector<double> points,
                                           std::vector<Interval> intervals, std::string label,
                                           std::vector<Symbol> symbols = {})
{
    EquilibriumSet out;
    out.case_label = std::move(label);
    out.symbols = std::move(symbols);
    for (const auto& iv : intervals) {
        if (iv.hi < iv.lo) {
            continue;
        }
        if (iv.hi == iv.lo) {
            points.push_back(iv.lo);
        } else {
            out.intervals.push_back(iv);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (double x : points) {
        bool inside = false;
        for (const auto& iv : out.intervals) {
            inside |= iv.contains(x);
        }
        if (!inside) {
            out.points.push_back(x);
        }
    }
    if (out.intervals.empty()) {
        out.kind = out.points.empty() ? EquilibriumKind::Empty : EquilibriumKind::FinitePoints;
    } else if (out.points.empty() && out.intervals.size() == 1) {
        out.kind = EquilibriumKind::Interval;
    } else {
        out.kind = EquilibriumKind::IntervalUnionPoints;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Linear push, plain viewcount
// ---------------------------------------------------------------------------

/// Ties go to the first listed case.
inline EquilibriumSet classify_linear(const Belief& belief, const ModelParams& p)
{
    p.validate(PushKind::Linear);
    belief.validate();
    const double top = alpha_domain_max(p, Scenario::LinearFixedHorizon);
    const std::vector<Symbol> syms{{"beta_tau_b", top}};
    const double b_g = belief.pi_g / p.lambda_ps_g;
    const double b_b = belief.pi_b / p.lambda_ps_b;
    const double a_g = belief.pi_g / (p.lambda_ps_g + p.lambda_pu);
    const double a_b = belief.pi_b / (p.lambda_ps_b + p.lambda_pu);
    if (b_g >= b_b) {
        return make_equilibrium_set({0.0}, {}, "i", syms);
    }
    if (a_g >= a_b) {
        return make_equilibrium_set({}, {{0.0, top}}, "ii", syms);
    }
    return make_equilibrium_set({top}, {}, "iii", syms);
}

// ---------------------------------------------------------------------------
// Exponential push, plain viewcount
// ---------------------------------------------------------------------------

/// Lambert ratio on the diagonal, R(alpha; alpha) = (1 + zeta_G q) / (1 + zeta_B q)
/// with q = 1 - alpha/N. Decreasing in alpha.
inline double diagonal_lambert_ratio(double alpha, const ModelParams& p)
{
    const double q = 1.0 - alpha / p.pool();
    const double zg = p.lambda_ps_g * p.pool() / p.lambda_pu;
    const double zb = p.lambda_ps_b * p.pool() / p.lambda_pu;
    return (1.0 + zg * q) / (1.0 + zb * q);
}

/// Smallest population threshold at which the diagonal ratio has fallen to rho,
/// N (1 - q_hat) with q_hat = (rho - 1) / (zeta_G - rho zeta_B); -inf if never.
inline double exponential_switch_point(double rho, const ModelParams& p)
{
    const double n = p.pool();
    const double zg = p.lambda_ps_g * n / p.lambda_pu;
    const double zb = p.lambda_ps_b * n / p.lambda_pu;
    const double den = zg - rho * zb;
    if (!(den > 0.0)) {
        return -numerics::kInf;
    }
    return n * (1.0 - (rho - 1.0) / den);
}

inline EquilibriumSet classify_exponential(const Belief& belief, const ModelParams& p)
{
    require_exponential_hypotheses(p);
    belief.validate();
    const double top = alpha_domain_max(p, Scenario::ExponentialFixedHorizon);
    std::vector<Symbol> syms{{"beta_tau_b", top}};
    if (belief.pi_g <= belief.pi_b) {
        return make_equilibrium_set({top}, {}, "i", syms);
    }
    const double rho = belief.pi_b > 0.0 ? belief.pi_g / belief.pi_b : numerics::kInf;
    const double ell = p.lambda_ps_g / p.lambda_ps_b;
    if (rho > ell) {
        // at alpha = 0 the diagonal ratio (1+zG)/(1+zB) is below zG/zB = ell < rho,
        // so the alternative {beta_tau_b} branch never materialises
        return make_equilibrium_set({0.0}, {}, "iii-a", syms);
    }
    if (rho == ell) {
        return make_equilibrium_set({}, {{0.0, top}}, "ii-a", syms);
    }
    const double hat = exponential_switch_point(rho, p);
    syms.push_back({"beta_bar", hat});
    if (hat <= 0.0) {
        return make_equilibrium_set({}, {{0.0, top}}, "ii-a", syms);
    }
    if (hat >= top) {
        return make_equilibrium_set({top}, {}, "ii-b", syms);
    }
    return make_equilibrium_set({}, {{hat, top}}, "ii-c", syms);
}

// ---------------------------------------------------------------------------
// Trend-gated variable horizon
// ---------------------------------------------------------------------------

namespace detail {

/// Runs of true values on a uniform grid, with run ends refined by bisection.
template <class Pred>
std::vector<Interval> true_runs(Pred&& pred, double lo, double hi, int n)
{
    std::vector<double> xs(n);
    std::vector<char> ok(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
        ok[i] = pred(xs[i]) ? 1 : 0;
    }
    const double tol = 1e-12 * std::max(1.0, hi - lo);
    std::vector<Interval> runs;
    for (int i = 0; i < n;) {
        if (!ok[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && ok[j + 1]) {
            ++j;
        }
        double a = xs[i];
        double b = xs[j];
        if (i > 0) {
            a = numerics::bisect_predicate(pred, xs[i - 1], xs[i], tol);
        }
        if (j < n - 1) {
            b = numerics::bisect_predicate([&](double x) { return !pred(x); }, xs[j], xs[j + 1],
                                           tol);
            // bisect_predicate returns the first failing side; step back inside
            b = std::max(xs[j], b - tol);
        }
        runs.push_back({a, b});
        i = j + 1;
    }
    return runs;
}

} // namespace detail

inline constexpr int kVariableHorizonScan = 4001;

inline EquilibriumSet classify_variable_horizon(const Belief& belief, const ModelParams& p)
{
    const Scenario s = Scenario::VariableHorizon;
    validate(p, s);
    require_exponential_hypotheses(p);
    belief.validate();

    const double n = p.pool();
    const double top = alpha_domain_max(p, s);
    const auto win_b = dynamics::horizon_window(Quality::Bad, p);
    std::vector<Symbol> syms{
        {"beta_window_b", top},
        {"beta_tau_b", -n * std::expm1(-p.lambda_ps_b * p.tau)},
        {"beta_tau0_b", -n * std::expm1(-p.lambda_ps_b * std::min(win_b.tau0, p.tau))},
    };
    if (belief.pi_g <= belief.pi_b) {
        return make_equilibrium_set({top}, {}, "1", syms);
    }
    const double rho = belief.pi_b > 0.0 ? belief.pi_g / belief.pi_b : numerics::kInf;
    syms.push_back({"beta_s", exponential_switch_point(rho, p)});

    const double end_g = detail::hot_window_end(Quality::Good, p);
    auto member = [&](double a) {
        if (a >= top) {
            return true;
        }
        const double ta_g = dynamics::activation_time(Quality::Good, a, p, push_of(s),
                                                      metric_of(s));
        if (!(ta_g < end_g)) {
            return false;
        }
        if (diagonal_lambert_ratio(a, p) > rho) {
            return false;
        }
        const double cap = strategy_cap(a, p, s);
        return utility(a, a, belief, p, s) >= utility(a, cap, belief, p, s) - 1e-12 * p.tau;
    };
    auto runs = detail::true_runs(member, 0.0, top, kVariableHorizonScan);
    std::vector<double> pts;
    std::vector<Interval> ivs;
    for (const auto& r : runs) {
        if (r.hi <= r.lo) {
            pts.push_back(r.lo);
        } else {
            ivs.push_back(r);
        }
    }
    pts.push_back(top);
    return make_equilibrium_set(pts, ivs, "window-scan", syms);
}

// ---------------------------------------------------------------------------
// Side information
// ---------------------------------------------------------------------------

struct SideInfoDiagnostics {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double lambda_pu_s = 0.0; // +inf when pi_G == pi_B
    double L = 0.0;           // lps(G) - lps(B)
    double x = 0.0;           // lps(G) + lpu
    bool positive_measure = false;
};

/// Critical pull rate pi_B/(pi_G - pi_B) (lps(G) - lps(B)) - lps(B).
inline double side_info_critical_rate(const Belief& belief, const ModelParams& p)
{
    if (belief.pi_g == belief.pi_b) {
        return numerics::kInf;
    }
    return belief.pi_b / (belief.pi_g - belief.pi_b) * (p.lambda_ps_g - p.lambda_ps_b) -
           p.lambda_ps_b;
}

/// Stationary points of the two utility branches, evaluated with the push-only
/// forecasts X(tau, theta) = lps(theta) tau.
inline SideInfoDiagnostics side_info_diagnostics(const Belief& belief, const ModelParams& p)
{
    SideInfoDiagnostics d;
    const double kg = std::pow(p.lambda_ps_g * p.tau, 2);
    const double kb = std::pow(p.lambda_ps_b * p.tau, 2);
    d.L = p.lambda_ps_g - p.lambda_ps_b;
    d.x = p.lambda_ps_g + p.lambda_pu;
    d.beta1 = side_info_stationary(kg, kb, belief.pi_g / d.x,
                                   belief.pi_b / (p.lambda_ps_b + p.lambda_pu));
    d.beta2 = side_info_stationary(kg, kb, belief.pi_g / p.lambda_ps_g,
                                   belief.pi_b / p.lambda_ps_b);
    d.lambda_pu_s = side_info_critical_rate(belief, p);
    return d;
}

struct SideInfoClassification {
    EquilibriumSet set;
    SideInfoDiagnostics diagnostics;
};

inline SideInfoClassification classify_side_info(const Belief& belief, const ModelParams& p)
{
    const Scenario s = Scenario::SideInformation;
    p.validate(push_of(s));
    belief.validate();
    const double top = alpha_domain_max(p, s);
    auto d = side_info_diagnostics(belief, p);
    std::vector<Symbol> syms{{"beta_tau_b", top}, {"beta1", d.beta1}, {"beta2", d.beta2}};

    const bool above = belief.pi_g == belief.pi_b || p.lambda_pu > d.lambda_pu_s;
    d.positive_measure = above && d.beta2 >= 0.0 && 0.0 > d.beta1;
    if (above) {
        const double lo = std::max(d.beta1, 0.0);
        const double hi = std::min(d.beta2, top);
        std::vector<Interval> ivs;
        if (lo <= hi) {
            ivs.push_back({lo, hi});
        }
        return {make_equilibrium_set({}, ivs, "i", syms), d};
    }
    // extremal regime: 0 survives when the upper branch's optimum sits at alpha = 0,
    // beta_tau_b survives when the lower branch's optimum sits at alpha = beta_tau_b
    const double rg_up = belief.pi_g / (p.lambda_ps_g + p.lambda_pu);
    const double rb_up = belief.pi_b / (p.lambda_ps_b + p.lambda_pu);
    const double rg_lo = belief.pi_g / p.lambda_ps_g;
    const double rb_lo = belief.pi_b / p.lambda_ps_b;
    std::vector<double> pts;
    if (side_info_ratio_tie(rg_up, rb_up) || d.beta1 <= 0.0) {
        pts.push_back(0.0);
    }
    if (!side_info_ratio_tie(rg_lo, rb_lo) && d.beta2 >= top) {
        pts.push_back(top);
    }
    return {make_equilibrium_set(pts, {}, "ii", syms), d};
}

} // namespace viewgame
