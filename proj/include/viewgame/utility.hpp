#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "viewgame/dynamics.hpp"
#include "viewgame/errors.hpp"
#include "viewgame/model.hpp"
#include "viewgame/numerics.hpp"

namespace viewgame {

using numerics::kInf;

/// Utilities closer than this (times tau) count as tied.
inline double tie_tolerance(const ModelParams& p) { return 1e-9 * p.tau; }

namespace detail {

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

/// Fraction of [s, tau] during which the pulled exponential trajectory stays hot,
/// i.e. dX/dt >= gamma_th. The hot set is [0, tau0] together with
/// [t_alpha, tau1] when the pull stream starts before tau1.
inline double hot_time_after(double s, Quality q, double t_alpha, const ModelParams& p)
{
    if (!std::isfinite(s)) {
        return 0.0;
    }
    const auto w = dynamics::horizon_window(q, p);
    const double t0 = std::min(w.tau0, p.tau);
    const double t1 = std::min(w.tau1, p.tau);
    double m = positive_part(t0 - s);
    if (t_alpha <= t1) {
        m += positive_part(t1 - std::max({t_alpha, t0, s}));
    }
    return m;
}

/// End of the hot window of content of quality q.
inline double hot_window_end(Quality q, const ModelParams& p)
{
    return std::min(dynamics::horizon_window(q, p).tau1, p.tau);
}

/// Crossing time in the reduced squared-rate progression used for the linear
/// trend-times-viewcount scenario: the metric grows at lps^2 before the
/// activation and at lps^2 + lpu^2 afterwards.
inline double reduced_square_crossing(double beta, double alpha, Quality q, const ModelParams& p)
{
    const double l2 = p.lambda_ps(q) * p.lambda_ps(q);
    const double u2 = p.lambda_pu * p.lambda_pu;
    const double t_alpha = alpha / l2;
    const double t = beta <= alpha ? beta / l2 : t_alpha + (beta - alpha) / (l2 + u2);
    return t <= p.tau ? t : kInf;
}

inline double fixed_horizon_utility(double t_good, double t_bad, const Belief& b, double tau)
{
    return b.pi_g * positive_part(tau - t_good) - b.pi_b * positive_part(tau - t_bad);
}

} // namespace detail

/// Crossing time of the scenario's metric for quality q.
inline double scenario_crossing(double beta, double alpha, Quality q, const ModelParams& p,
                                Scenario s)
{
    if (s == Scenario::TrendViewcountLinear) {
        return detail::reduced_square_crossing(beta, alpha, q, p);
    }
    return dynamics::crossing_time(beta, q, alpha, p, push_of(s), metric_of(s));
}

/// Largest threshold a deviating player may choose against population threshold alpha:
/// the metric value bad content reaches by the end of its useful life.
inline double strategy_cap(double alpha, const ModelParams& p, Scenario s)
{
    const Quality bad = Quality::Bad;
    switch (s) {
    case Scenario::TrendViewcountLinear: {
        const double l2 = p.lambda_ps_b * p.lambda_ps_b;
        const double u2 = p.lambda_pu * p.lambda_pu;
        return l2 * p.tau + u2 * detail::positive_part(p.tau - alpha / l2);
    }
    case Scenario::VariableHorizon: {
        const double end = detail::hot_window_end(bad, p);
        const double t_alpha = dynamics::activation_time(bad, alpha, p, push_of(s), metric_of(s));
        return dynamics::viewcount_at(end, bad, t_alpha, p, push_of(s));
    }
    case Scenario::SideInformation:
        // the metric decreases to 0 at tau, so the reachable range is capped by its start value
        return dynamics::metric_value(0.0, bad, alpha, p, push_of(s), metric_of(s));
    default:
        return dynamics::beta_tau(bad, alpha, p, push_of(s), metric_of(s));
    }
}

/// Upper end of the population-threshold domain: the largest alpha with alpha <= cap(alpha).
inline double alpha_domain_max(const ModelParams& p, Scenario s)
{
    const double lb = p.lambda_ps_b;
    switch (s) {
    case Scenario::LinearFixedHorizon:
        return lb * p.tau;
    case Scenario::ExponentialFixedHorizon:
        return -p.pool() * std::expm1(-lb * p.tau);
    case Scenario::VariableHorizon:
        return -p.pool() * std::expm1(-lb * detail::hot_window_end(Quality::Bad, p));
    case Scenario::TrendViewcountLinear:
        return lb * lb * p.tau;
    case Scenario::SideInformation: {
        const double x = (lb + p.lambda_pu) * p.tau;
        return 0.5 * x * x;
    }
    case Scenario::TrendViewcountExponential: {
        // no closed form; scan for the last alpha with alpha <= cap(alpha), then refine
        const double hi = std::max(dynamics::trend_viewcount_peak(Quality::Bad, p),
                                   strategy_cap(0.0, p, s));
        auto admissible = [&](double a) { return a <= strategy_cap(a, p, s); };
        constexpr int kScan = 2000;
        double last = 0.0;
        for (int i = 1; i <= kScan; ++i) {
            const double a = hi * i / kScan;
            if (admissible(a)) {
                last = a;
            }
        }
        if (last >= hi) {
            return hi;
        }
        const double step = hi / kScan;
        // predicate is true at last and false at last + step
        return numerics::bisect_predicate([&](double a) { return !admissible(a); }, last,
                                          last + step, 1e-14 * hi);
    }
    }
    return 0.0;
}

/// Expected utility of a player with threshold beta while everybody else uses alpha.
inline double utility(double alpha, double beta, const Belief& belief, const ModelParams& p,
                      Scenario s)
{
    belief.validate();
    const double cap = strategy_cap(alpha, p, s);
    if (!(beta >= 0.0) || beta > cap * (1.0 + 1e-12) + 1e-300) {
        throw DomainError("utility: beta outside [0, beta_tau(B)] (beta=" + std::to_string(beta) +
                          ", cap=" + std::to_string(cap) + ")");
    }
    beta = std::min(beta, cap);
    const double t_good = scenario_crossing(beta, alpha, Quality::Good, p, s);
    const double t_bad = scenario_crossing(beta, alpha, Quality::Bad, p, s);

    if (s == Scenario::VariableHorizon) {
        const double ta_g = dynamics::activation_time(Quality::Good, alpha, p, push_of(s),
                                                      metric_of(s));
        const double ta_b = dynamics::activation_time(Quality::Bad, alpha, p, push_of(s),
                                                      metric_of(s));
        return belief.pi_g * detail::hot_time_after(t_good, Quality::Good, ta_g, p) -
               belief.pi_b * detail::hot_time_after(t_bad, Quality::Bad, ta_b, p);
    }
    return detail::fixed_horizon_utility(t_good, t_bad, belief, p.tau);
}

// ---------------------------------------------------------------------------
// Best responses
// ---------------------------------------------------------------------------

enum class ResponseKind { Point, IntervalOfOptima, ExtremalPair };

inline std::string to_string(ResponseKind k)
{
    switch (k) {
    case ResponseKind::Point:
        return "point";
    case ResponseKind::IntervalOfOptima:
        return "interval_of_optima";
    case ResponseKind::ExtremalPair:
        return "extremal_pair";
    }
    return "?";
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    double length() const { return hi - lo; }
};

struct BestResponse {
    ResponseKind kind = ResponseKind::Point;
    std::vector<double> points;
    std::vector<Interval> intervals;
    double utility = 0.0;

    bool contains(double v, double tol = 0.0) const
    {
        for (double x : points) {
            if (std::abs(x - v) <= tol) {
                return true;
            }
        }
        for (const auto& iv : intervals) {
            if (iv.contains(v, tol)) {
                return true;
            }
        }
        return false;
    }
};

namespace detail {

struct Candidate {
    double beta;
    double utility;
};

struct FlatPiece {
    Interval range;
    double utility;
};

/// Keep every candidate and flat piece within tol of the best utility.
inline BestResponse assemble(std::vector<Candidate> cands, std::vector<FlatPiece> flats,
                             double tol)
{
    double best = -kInf;
    for (const auto& c : cands) {
        best = std::max(best, c.utility);
    }
    for (const auto& f : flats) {
        best = std::max(best, f.utility);
    }
    BestResponse br;
    br.utility = best;
    for (const auto& f : flats) {
        if (f.utility >= best - tol) {
            br.intervals.push_back(f.range);
        }
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.beta < b.beta; });
    for (const auto& c : cands) {
        if (c.utility < best - tol) {
            continue;
        }
        bool covered = false;
        for (const auto& iv : br.intervals) {
            covered |= iv.contains(c.beta);
        }
        if (!br.points.empty() && br.points.back() == c.beta) {
            covered = true;
        }
        if (!covered) {
            br.points.push_back(c.beta);
        }
    }
    if (!br.intervals.empty()) {
        br.kind = ResponseKind::IntervalOfOptima;
    } else if (br.points.size() > 1) {
        br.kind = ResponseKind::ExtremalPair;
    } else {
        br.kind = ResponseKind::Point;
    }
    return br;
}

/// Optimum of a branch on which the utility is monotone with the given slope sign.
/// A slope whose effect over the branch stays under tol is treated as flat.
inline void monotone_branch(double lo, double hi, double swing, const Belief& belief,
                            const ModelParams& p, Scenario s, double alpha,
                            std::vector<Candidate>& cands, std::vector<FlatPiece>& flats)
{
    const double tol = tie_tolerance(p);
    auto u = [&](double b) { return utility(alpha, b, belief, p, s); };
    if (std::abs(swing) <= tol) {
        flats.push_back({{lo, hi}, std::max(u(lo), u(hi))});
    } else if (swing < 0.0) {
        cands.push_back({lo, u(lo)});
    } else {
        cands.push_back({hi, u(hi)});
    }
}

} // namespace detail

/// Best response in the linear fixed-horizon game.
///
/// Below alpha the utility is linear in beta with slope pi_B/lps(B) - pi_G/lps(G);
/// above alpha the pull rate is added to both denominators.
inline BestResponse best_response_linear(double alpha, const Belief& belief, const ModelParams& p)
{
    const Scenario s = Scenario::LinearFixedHorizon;
    p.validate(push_of(s));
    belief.validate();
    const double cap = strategy_cap(alpha, p, s);
    const double a = std::min(alpha, cap);
    const double below = belief.pi_b / p.lambda_ps_b - belief.pi_g / p.lambda_ps_g;
    const double above = belief.pi_b / (p.lambda_ps_b + p.lambda_pu) -
                         belief.pi_g / (p.lambda_ps_g + p.lambda_pu);
    std::vector<detail::Candidate> cands;
    std::vector<detail::FlatPiece> flats;
    detail::monotone_branch(0.0, a, below * a, belief, p, s, alpha, cands, flats);
    if (a < cap) {
        detail::monotone_branch(a, cap, above * (cap - a), belief, p, s, alpha, cands, flats);
    }
    return detail::assemble(cands, flats, tie_tolerance(p));
}

/// W0(zeta xi) at the crossing of level beta by quality q, with pull active from
/// the alpha-crossing. Equals dX/dt / lambda_pu - 1 at that time.
inline double crossing_lambert(double beta, double alpha, Quality q, const ModelParams& p)
{
    const double n = p.pool();
    const double zeta = p.lambda_ps(q) * n / p.lambda_pu;
    // xi = e^{zeta (1 - beta/N)} (1 - alpha/N)
    const double log_xi = zeta * (1.0 - beta / n) + std::log1p(-alpha / n);
    return numerics::lambert_w0_of_exp(std::log(zeta) + log_xi);
}

/// Sign-carrying derivative of the exponential utility above alpha:
/// dU/dbeta = (pi_B / (1 + W_B) - pi_G / (1 + W_G)) / lambda_pu.
inline double exponential_slope_above(double beta, double alpha, const Belief& belief,
                                      const ModelParams& p)
{
    const double wg = crossing_lambert(beta, alpha, Quality::Good, p);
    const double wb = crossing_lambert(beta, alpha, Quality::Bad, p);
    return (belief.pi_b / (1.0 + wb) - belief.pi_g / (1.0 + wg)) / p.lambda_pu;
}

/// Checks the hypotheses under which the exponential best response is characterised.
inline void require_exponential_hypotheses(const ModelParams& p)
{
    p.validate(PushKind::ExponentialSaturating);
    if (!(p.lambda_ps_g > p.lambda_ps_b)) {
        throw PreconditionError("hypothesis violated: lambda_ps_g > lambda_ps_b");
    }
    if (!(p.lambda_ps_g * p.pool() <= p.lambda_pu)) {
        throw PreconditionError("hypothesis violated: lambda_ps_g * n_pool <= lambda_pu");
    }
}

inline BestResponse best_response_exponential(double alpha, const Belief& belief,
                                              const ModelParams& p)
{
    const Scenario s = Scenario::ExponentialFixedHorizon;
    require_exponential_hypotheses(p);
    belief.validate();
    const double n = p.pool();
    const double cap = strategy_cap(alpha, p, s);
    const double a = std::min(alpha, cap);
    auto u = [&](double b) { return utility(alpha, b, belief, p, s); };

    std::vector<detail::Candidate> cands;
    std::vector<detail::FlatPiece> flats;

    // below alpha: U = const + (pi_G/lG - pi_B/lB) ln(1 - beta/N)
    const double below = (belief.pi_g / p.lambda_ps_g - belief.pi_b / p.lambda_ps_b) *
                         std::log1p(-a / n);
    detail::monotone_branch(0.0, a, below, belief, p, s, alpha, cands, flats);

    if (a < cap) {
        auto slope = [&](double b) { return exponential_slope_above(b, alpha, belief, p); };
        const double s_lo = slope(a);
        const double s_hi = slope(cap);
        if (s_lo <= 0.0 && s_hi <= 0.0) {
            cands.push_back({a, u(a)});
        } else if (s_lo >= 0.0 && s_hi >= 0.0) {
            cands.push_back({cap, u(cap)});
        } else if (s_lo > 0.0) {
            const double root = numerics::find_root({slope, a, cap}, 1e-300);
            cands.push_back({root, u(root)});
        } else {
            cands.push_back({a, u(a)});
            cands.push_back({cap, u(cap)});
        }
    }
    return detail::assemble(cands, flats, tie_tolerance(p));
}

/// Stationary point of a side-information branch,
/// 1/2 (K_B r_G^2 - K_G r_B^2) / (r_G^2 - r_B^2) with r = pi / rate.
inline double side_info_stationary(double k_good, double k_bad, double r_good, double r_bad)
{
    const double g2 = r_good * r_good;
    const double b2 = r_bad * r_bad;
    return 0.5 * (k_bad * g2 - k_good * b2) / (g2 - b2);
}

inline bool side_info_ratio_tie(double r_good, double r_bad)
{
    return std::abs(r_good - r_bad) <= 1e-12 * std::max(std::abs(r_good), std::abs(r_bad));
}

struct SideInfoBranchPicks {
    double upper = 0.0; // optimum over [alpha, cap] read from the beta1 list
    double lower = 0.0; // optimum over [0, alpha] read from the beta2 list
    double beta1 = 0.0;
    double beta2 = 0.0;
};

/// Branch optima from the three-case lists, with X(tau, theta) taken from the
/// trajectory under alpha. An equal ratio pi/rate selects the first case.
inline SideInfoBranchPicks side_info_branch_picks(double alpha, const Belief& belief,
                                                  const ModelParams& p)
{
    const Scenario s = Scenario::SideInformation;
    const double cap = strategy_cap(alpha, p, s);
    const double a = std::min(alpha, cap);
    auto x_end = [&](Quality q) {
        return dynamics::viewcount(p.tau, q, alpha, p, push_of(s), metric_of(s));
    };
    const double kg = x_end(Quality::Good) * x_end(Quality::Good);
    const double kb = x_end(Quality::Bad) * x_end(Quality::Bad);

    SideInfoBranchPicks out;
    const double rg_up = belief.pi_g / (p.lambda_ps_g + p.lambda_pu);
    const double rb_up = belief.pi_b / (p.lambda_ps_b + p.lambda_pu);
    out.beta1 = side_info_stationary(kg, kb, rg_up, rb_up);
    out.upper = a;
    if (!side_info_ratio_tie(rg_up, rb_up)) {
        out.upper = out.beta1 <= a ? a : (out.beta1 < cap ? out.beta1 : cap);
    }
    const double rg_lo = belief.pi_g / p.lambda_ps_g;
    const double rb_lo = belief.pi_b / p.lambda_ps_b;
    out.beta2 = side_info_stationary(kg, kb, rg_lo, rb_lo);
    out.lower = 0.0;
    if (!side_info_ratio_tie(rg_lo, rb_lo)) {
        out.lower = out.beta2 <= 0.0 ? 0.0 : (out.beta2 < a ? out.beta2 : a);
    }
    return out;
}

/// Best response with side information: the better of the two branch optima.
inline BestResponse best_response_side_info(double alpha, const Belief& belief,
                                            const ModelParams& p)
{
    const Scenario s = Scenario::SideInformation;
    p.validate(push_of(s));
    belief.validate();
    const auto picks = side_info_branch_picks(alpha, belief, p);
    auto u = [&](double b) { return utility(alpha, b, belief, p, s); };
    std::vector<detail::Candidate> cands{{picks.upper, u(picks.upper)}};
    if (std::min(alpha, strategy_cap(alpha, p, s)) > 0.0) {
        cands.push_back({picks.lower, u(picks.lower)});
    }
    return detail::assemble(cands, {}, tie_tolerance(p));
}

// ---------------------------------------------------------------------------
// Utility surface
// ---------------------------------------------------------------------------

struct SurfaceRow {
    double beta = 0.0;
    double utility = 0.0;
    std::string branch;
};

/// Thresholds at which the utility may jump: metric values around each
/// activation time and, for non-monotone metrics, local maxima of the metric.
inline std::vector<double> utility_breakpoints(double alpha, const ModelParams& p, Scenario s)
{
    std::vector<double> out;
    if (s == Scenario::TrendViewcountLinear) {
        return out;
    }
    const PushKind push = push_of(s);
    const MetricKind metric = metric_of(s);
    for (Quality q : kQualities) {
        const double ta = dynamics::activation_time(q, alpha, p, push, metric);
        if (std::isfinite(ta) && ta > 0.0) {
            for (Quality r : kQualities) {
                const double ta_r = dynamics::activation_time(r, alpha, p, push, metric);
                out.push_back(dynamics::metric_at(ta, r, ta_r, p, push, metric));
                const double before = std::nextafter(ta, 0.0);
                out.push_back(dynamics::metric_at(before, r, ta_r, p, push, metric));
            }
        }
    }
    if (metric == MetricKind::TrendTimesViewcount && push == PushKind::ExponentialSaturating) {
        for (Quality q : kQualities) {
            const double ta = dynamics::activation_time(q, alpha, p, push, metric);
            constexpr int kScan = 4000;
            double prev = -kInf, cur = dynamics::metric_at(0.0, q, ta, p, push, metric);
            for (int i = 1; i <= kScan; ++i) {
                const double next = dynamics::metric_at(p.tau * i / kScan, q, ta, p, push, metric);
                if (cur > prev && cur > next) {
                    // refine on the bracketing cells; the value error is second order
                    double lo = p.tau * (i - 2) / kScan, hi = p.tau * i / kScan;
                    auto m = [&](double t) { return dynamics::metric_at(t, q, ta, p, push, metric); };
                    for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
                        const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
                        if (m(a) < m(b)) {
                            lo = a;
                        } else {
                            hi = b;
                        }
                    }
                    out.push_back(std::max(cur, m(0.5 * (lo + hi))));
                }
                prev = cur;
                cur = next;
            }
        }
    }
    return out;
}

inline std::vector<SurfaceRow> utility_surface(double alpha, const Belief& belief,
                                               const ModelParams& p, Scenario s, int n_grid)
{
    if (n_grid < 2) {
        throw PreconditionError("utility_surface: n_grid must be >= 2");
    }
    const double cap = strategy_cap(alpha, p, s);
    auto label = [&](double b) { return b < alpha ? "below_alpha" : "above_alpha"; };
    auto u = [&](double b) { return utility(alpha, b, belief, p, s); };

    std::vector<SurfaceRow> rows;
    for (int i = 0; i < n_grid; ++i) {
        const double b = i == n_grid - 1 ? cap : cap * i / (n_grid - 1);
        rows.push_back({b, u(b), label(b)});
    }
    if (alpha > 0.0 && alpha < cap) {
        rows.push_back({alpha, u(alpha), label(alpha)});
    }
    const double delta = 1e-9 * std::max(cap, 1e-300);
    for (double b : utility_breakpoints(alpha, p, s)) {
        if (b - delta > 0.0 && b + delta < cap) {
            rows.push_back({b - delta, u(b - delta), "left_limit"});
            rows.push_back({b + delta, u(b + delta), "right_limit"});
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SurfaceRow& a, const SurfaceRow& b) { return a.beta < b.beta; });
    return rows;
}

} // namespace viewgame
