#pragma once

// Brute-force crossing times used to check the closed forms in dynamics.hpp.
// Only the forward trajectory formulas are shared; activation and crossing
// times are recovered by scanning a sampled trajectory and bisecting.

#include <cmath>
#include <limits>
#include <vector>

#include "viewgame/dynamics.hpp"
#include "viewgame/numerics.hpp"

namespace viewgame::oracle {

inline constexpr int kCrossingSamples = 10000;

namespace detail {

/// First t in [0, tau] on the grid where pred holds, refined by bisection
/// against the previous grid point. +inf if pred never holds.
template <class Pred>
double first_true(Pred&& pred, double tau, const std::vector<double>& breakpoints)
{
    const auto grid = dynamics::sampling_grid(tau, kCrossingSamples, breakpoints);
    if (pred(grid.front())) {
        return grid.front();
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (pred(grid[i])) {
            return numerics::bisect_predicate(pred, grid[i - 1], grid[i], 0.0);
        }
    }
    return numerics::kInf;
}

} // namespace detail

/// Activation time recovered by scanning; mirrors the definition rather than the algebra.
inline double activation_time_by_search(Quality q, double alpha, const ModelParams& p,
                                        PushKind push, MetricKind metric)
{
    const double tau = p.tau;
    if (metric == MetricKind::SideInformation) {
        if (alpha <= 0.0) {
            return tau;
        }
        auto excess = [&](double t) {
            const double xt = dynamics::viewcount_at(tau, q, t, p, push);
            const double xs = dynamics::push_viewcount(t, q, p, push);
            return 0.5 * (xt * xt - xs * xs) - alpha;
        };
        if (excess(0.0) <= 0.0) {
            return 0.0;
        }
        return numerics::find_root({excess, 0.0, tau}, 1e-300);
    }
    const double never = numerics::kInf;
    auto reached = [&](double t) {
        return dynamics::metric_at(t, q, never, p, push, metric) >= alpha;
    };
    return detail::first_true(reached, tau, {});
}

/// Crossing time of the metric through beta, found on the sampled trajectory.
inline double crossing_time_by_search(double beta, Quality q, double alpha, const ModelParams& p,
                                      PushKind push, MetricKind metric)
{
    const double t_alpha = activation_time_by_search(q, alpha, p, push, metric);
    const std::vector<double> breaks{t_alpha};
    if (metric == MetricKind::SideInformation) {
        auto fallen = [&](double t) {
            return dynamics::metric_at(t, q, t_alpha, p, push, metric) <= beta;
        };
        return detail::first_true(fallen, p.tau, breaks);
    }
    auto reached = [&](double t) {
        return dynamics::metric_at(t, q, t_alpha, p, push, metric) >= beta;
    };
    return detail::first_true(reached, p.tau, breaks);
}

} // namespace viewgame::oracle
