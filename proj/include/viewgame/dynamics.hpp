#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "viewgame/errors.hpp"
#include "viewgame/model.hpp"
#include "viewgame/numerics.hpp"

namespace viewgame::dynamics {

using numerics::kInf;

// ---------------------------------------------------------------------------
// Push-only building blocks
// ---------------------------------------------------------------------------

inline double push_viewcount(double t, Quality q, const ModelParams& p, PushKind push)
{
    const double lam = p.lambda_ps(q);
    if (push == PushKind::Linear) {
        return lam * t;
    }
    return -p.pool() * std::expm1(-lam * t);
}

inline double push_rate(double t, Quality q, const ModelParams& p, PushKind push)
{
    const double lam = p.lambda_ps(q);
    if (push == PushKind::Linear) {
        return lam;
    }
    return lam * p.pool() * std::exp(-lam * t);
}

/// Time at which the push-only viewcount reaches x (+inf if never).
inline double push_inverse(double x, Quality q, const ModelParams& p, PushKind push)
{
    if (x <= 0.0) {
        return 0.0;
    }
    const double lam = p.lambda_ps(q);
    if (push == PushKind::Linear) {
        return x / lam;
    }
    const double n = p.pool();
    if (x >= n) {
        return kInf;
    }
    return -std::log1p(-x / n) / lam;
}

// ---------------------------------------------------------------------------
// Trajectory with pull switched on at a given activation time
// ---------------------------------------------------------------------------

/// X(t) when the pull stream of rate lambda_pu starts at t_alpha.
inline double viewcount_at(double t, Quality q, double t_alpha, const ModelParams& p,
                           PushKind push)
{
    const double pulled = t > t_alpha ? p.lambda_pu * (t - t_alpha) : 0.0;
    return push_viewcount(t, q, p, push) + pulled;
}

/// Right limit of dX/dt (the pull contribution is counted from t_alpha on).
inline double rate_at(double t, Quality q, double t_alpha, const ModelParams& p, PushKind push)
{
    return push_rate(t, q, p, push) + (t >= t_alpha ? p.lambda_pu : 0.0);
}

/// Decision metric on a trajectory whose pull stream starts at t_alpha.
inline double metric_at(double t, Quality q, double t_alpha, const ModelParams& p,
                        PushKind push, MetricKind metric)
{
    switch (metric) {
    case MetricKind::PlainViewcount:
        return viewcount_at(t, q, t_alpha, p, push);
    case MetricKind::Trend:
        return rate_at(t, q, t_alpha, p, push);
    case MetricKind::TrendTimesViewcount:
        return rate_at(t, q, t_alpha, p, push) * viewcount_at(t, q, t_alpha, p, push);
    case MetricKind::SideInformation: {
        const double xt = viewcount_at(p.tau, q, t_alpha, p, push);
        const double x = viewcount_at(t, q, t_alpha, p, push);
        return 0.5 * (xt * xt - x * x);
    }
    }
    return 0.0;
}

namespace detail {

/// Time after activation for the pulled exponential trajectory to gain `remaining` views.
/// Solves pool_left (1 - e^{-lam s}) + lambda_pu s = remaining via the Lambert function.
inline double exponential_pull_delay(double remaining, double pool_left, double lam,
                                     double lambda_pu)
{
    if (remaining <= 0.0) {
        return 0.0;
    }
    if (pool_left <= 0.0) {
        return remaining / lambda_pu;
    }
    const double z0 = lam * pool_left / lambda_pu;
    const double log_z = std::log(z0) + lam * (pool_left - remaining) / lambda_pu;
    const double v = numerics::lambert_w0_of_exp(log_z);
    if (v > 1.0) {
        return (std::log(z0) - std::log(v)) / lam;
    }
    return (remaining - pool_left) / lambda_pu + v / lam;
}

inline double clip_to_lifetime(double t, double tau)
{
    if (t <= tau) {
        return t;
    }
    if (t <= tau * (1.0 + 1e-12)) {
        return tau;
    }
    return kInf;
}

} // namespace detail

/// First time X(t) >= x on a trajectory with activation at t_alpha, within [0, tau].
inline double viewcount_crossing(double x, Quality q, double t_alpha, const ModelParams& p,
                                 PushKind push)
{
    if (x <= 0.0) {
        return 0.0;
    }
    const double pre = push_inverse(x, q, p, push);
    if (pre <= t_alpha || p.lambda_pu == 0.0 || !std::isfinite(t_alpha)) {
        return detail::clip_to_lifetime(pre, p.tau);
    }
    const double lam = p.lambda_ps(q);
    const double x_alpha = push_viewcount(t_alpha, q, p, push);
    double t = kInf;
    if (push == PushKind::Linear) {
        t = t_alpha + (x - x_alpha) / (lam + p.lambda_pu);
    } else {
        const double pool_left = p.pool() * std::exp(-lam * t_alpha);
        t = t_alpha + detail::exponential_pull_delay(x - x_alpha, pool_left, lam, p.lambda_pu);
    }
    return detail::clip_to_lifetime(t, p.tau);
}

// ---------------------------------------------------------------------------
// Activation (the population threshold alpha being reached)
// ---------------------------------------------------------------------------

/// Largest value of the push-only trend-times-viewcount metric, lambda N^2 / 4.
inline double trend_viewcount_peak(Quality q, const ModelParams& p)
{
    return 0.25 * p.lambda_ps(q) * p.pool() * p.pool();
}

/// First time the push-only trend-times-viewcount metric reaches y (exponential push).
inline double trend_viewcount_push_inverse(double y, Quality q, const ModelParams& p)
{
    if (y <= 0.0) {
        return 0.0;
    }
    const double lam = p.lambda_ps(q);
    const double n = p.pool();
    const double disc = 1.0 - 4.0 * y / (lam * n * n);
    if (disc < 0.0) {
        return kInf;
    }
    const double f = std::log(0.5 * (1.0 + std::sqrt(disc)));
    return -f / lam;
}

namespace detail {

/// Side-information activation: the t with 1/2 (X(tau; t)^2 - X_ps(t)^2) = alpha.
inline double side_information_activation(double alpha, Quality q, const ModelParams& p,
                                          PushKind push)
{
    const double tau = p.tau;
    auto excess = [&](double t) {
        const double xt = viewcount_at(tau, q, t, p, push);
        const double xs = push_viewcount(t, q, p, push);
        return 0.5 * (xt * xt - xs * xs) - alpha;
    };
    if (alpha <= 0.0) {
        return tau;
    }
    if (excess(0.0) <= 0.0) {
        return 0.0;
    }
    if (push == PushKind::Linear) {
        // (lpu^2 - lps^2) t^2 - 2 P lpu t + P^2 - 2 alpha = 0 with P = (lps + lpu) tau
        const double lps = p.lambda_ps(q);
        const double lpu = p.lambda_pu;
        const double big_p = (lps + lpu) * tau;
        const double a = lpu * lpu - lps * lps;
        const double b = -2.0 * big_p * lpu;
        const double c = big_p * big_p - 2.0 * alpha;
        double t;
        if (std::abs(a) <= 1e-14 * (lps * lps + lpu * lpu)) {
            t = -c / b;
        } else {
            const double disc = std::max(b * b - 4.0 * a * c, 0.0);
            const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            const double r1 = qq / a;
            const double r2 = c / qq;
            const bool r1_ok = r1 >= -1e-12 * tau && r1 <= tau * (1.0 + 1e-12);
            const bool r2_ok = r2 >= -1e-12 * tau && r2 <= tau * (1.0 + 1e-12);
            t = (r1_ok && (!r2_ok || r1 <= r2)) ? r1 : r2;
        }
        return std::clamp(t, 0.0, tau);
    }
    // bisect down to floating-point resolution; crossings downstream are sensitive to t_alpha
    return numerics::find_root({excess, 0.0, tau}, std::numeric_limits<double>::min());
}

} // namespace detail

/// Time at which the population threshold alpha is reached by the chosen metric,
/// i.e. when the pull stream switches on. +inf if not within the lifetime.
///
/// Increasing metrics are evaluated on the push-only trajectory (pull is off
/// before activation). The side-information metric decreases in time and looks
/// ahead to X(tau), which itself depends on the activation time, so it is solved
/// as a fixed point.
inline double activation_time(Quality q, double alpha, const ModelParams& p, PushKind push,
                              MetricKind metric)
{
    if (!(alpha >= 0.0)) {
        throw DomainError("activation_time: alpha must be >= 0");
    }
    if (std::isinf(alpha)) {
        return metric == MetricKind::SideInformation ? 0.0 : kInf;
    }
    double t = kInf;
    switch (metric) {
    case MetricKind::PlainViewcount:
        t = push_inverse(alpha, q, p, push);
        break;
    case MetricKind::Trend:
        t = push_rate(0.0, q, p, push) >= alpha ? 0.0 : kInf;
        break;
    case MetricKind::TrendTimesViewcount:
        if (push == PushKind::Linear) {
            const double lam = p.lambda_ps(q);
            t = alpha / (lam * lam);
        } else {
            t = trend_viewcount_push_inverse(alpha, q, p);
        }
        break;
    case MetricKind::SideInformation:
        return detail::side_information_activation(alpha, q, p, push);
    }
    return t <= p.tau ? t : kInf;
}

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

inline double viewcount(double t, Quality q, double alpha, const ModelParams& p, PushKind push,
                        MetricKind metric = MetricKind::PlainViewcount)
{
    return viewcount_at(t, q, activation_time(q, alpha, p, push, metric), p, push);
}

inline double metric_value(double t, Quality q, double alpha, const ModelParams& p,
                           PushKind push, MetricKind metric)
{
    return metric_at(t, q, activation_time(q, alpha, p, push, metric), p, push, metric);
}

namespace detail {

/// First t in (lo, hi] with metric >= beta for the exponential trend-times-viewcount
/// metric after activation. The post-activation metric is not monotone, so the
/// interval is scanned before bisecting the first bracketing cell.
inline double scan_first_reach(double beta, Quality q, double t_alpha, const ModelParams& p,
                               double lo, double hi)
{
    constexpr int kCells = 4096;
    auto g = [&](double t) {
        return metric_at(t, q, t_alpha, p, PushKind::ExponentialSaturating,
                         MetricKind::TrendTimesViewcount) - beta;
    };
    double prev = lo;
    for (int i = 1; i <= kCells; ++i) {
        const double t = lo + (hi - lo) * i / kCells;
        if (g(t) >= 0.0) {
            return numerics::bisect_predicate([&](double s) { return g(s) >= 0.0; }, prev, t,
                                              1e-15 * std::max(1.0, t));
        }
        prev = t;
    }
    return kInf;
}

} // namespace detail

/// Earliest time the metric reaches beta (for the side-information metric,
/// which decreases, the earliest time it has fallen to beta). +inf if never
/// within [0, tau].
inline double crossing_time(double beta, Quality q, double alpha, const ModelParams& p,
                            PushKind push, MetricKind metric)
{
    if (!(beta >= 0.0)) {
        throw DomainError("crossing_time: beta must be >= 0");
    }
    const double t_alpha = activation_time(q, alpha, p, push, metric);
    const double lam = p.lambda_ps(q);

    switch (metric) {
    case MetricKind::PlainViewcount:
        return viewcount_crossing(beta, q, t_alpha, p, push);

    case MetricKind::Trend: {
        if (rate_at(0.0, q, t_alpha, p, push) >= beta) {
            return 0.0;
        }
        if (std::isfinite(t_alpha) && rate_at(t_alpha, q, t_alpha, p, push) >= beta) {
            return t_alpha;
        }
        return kInf;
    }

    case MetricKind::TrendTimesViewcount: {
        if (beta == 0.0) {
            return 0.0;
        }
        const double pre = push == PushKind::Linear ? beta / (lam * lam)
                                                    : trend_viewcount_push_inverse(beta, q, p);
        if (pre <= t_alpha) {
            return detail::clip_to_lifetime(pre, p.tau);
        }
        if (!std::isfinite(t_alpha)) {
            return kInf;
        }
        if (metric_at(t_alpha, q, t_alpha, p, push, metric) >= beta) {
            return t_alpha;
        }
        if (push == PushKind::Linear) {
            // after activation the metric is (lps + lpu) X(t)
            return viewcount_crossing(beta / (lam + p.lambda_pu), q, t_alpha, p, push);
        }
        return detail::scan_first_reach(beta, q, t_alpha, p, t_alpha, p.tau);
    }

    case MetricKind::SideInformation: {
        const double xt = viewcount_at(p.tau, q, t_alpha, p, push);
        const double level2 = xt * xt - 2.0 * beta;
        if (level2 <= 0.0) {
            return 0.0;
        }
        return viewcount_crossing(std::sqrt(level2), q, t_alpha, p, push);
    }
    }
    return kInf;
}

/// Metric value attained at the end of the lifetime.
inline double beta_tau(Quality q, double alpha, const ModelParams& p, PushKind push,
                       MetricKind metric)
{
    return metric_value(p.tau, q, alpha, p, push, metric);
}

// ---------------------------------------------------------------------------
// Trend-gated viewing window (exponential push)
// ---------------------------------------------------------------------------

struct HorizonWindow {
    double tau0 = 0.0; // push-only trend drops below gamma_th
    double tau1 = 0.0; // pulled trend drops below gamma_th
    double x_th = 0.0; // push-only viewcount at tau0 (unclamped)
};

/// Window ends for the trend gate dX/dt >= gamma_th. Negative times are clamped to 0.
inline HorizonWindow horizon_window(Quality q, const ModelParams& p)
{
    const double gamma = p.gamma();
    if (gamma <= p.lambda_pu) {
        throw InfiniteHorizonError("horizon_window: gamma_th <= lambda_pu, horizon is infinite");
    }
    const double lam = p.lambda_ps(q);
    const double n = p.pool();
    HorizonWindow w;
    w.tau0 = std::max(0.0, std::log(lam * n / gamma) / lam);
    w.tau1 = std::max(0.0, std::log(lam * n / (gamma - p.lambda_pu)) / lam);
    w.x_th = n - gamma / lam;
    return w;
}

// ---------------------------------------------------------------------------
// Sampled trajectories
// ---------------------------------------------------------------------------

struct Sample {
    double t = 0.0;
    double x = 0.0;
    double xdot = 0.0;
};

struct Trajectory {
    Quality quality = Quality::Good;
    double alpha = 0.0;
    std::vector<Sample> samples;
};

/// Uniform grid of n points on [0, tau] with the given breakpoints inserted exactly.
inline std::vector<double> sampling_grid(double tau, int n, const std::vector<double>& breakpoints)
{
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(n) + breakpoints.size());
    for (int i = 0; i < n; ++i) {
        ts.push_back(n == 1 ? 0.0 : tau * i / (n - 1));
    }
    for (double b : breakpoints) {
        if (b >= 0.0 && b <= tau) {
            ts.push_back(b);
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

inline Trajectory sample_trajectory(Quality q, double alpha, const ModelParams& p, PushKind push,
                                    MetricKind metric = MetricKind::PlainViewcount,
                                    int n = 10000, std::vector<double> breakpoints = {})
{
    Trajectory traj{q, alpha, {}};
    const double t_alpha = activation_time(q, alpha, p, push, metric);
    breakpoints.push_back(t_alpha);
    for (double t : sampling_grid(p.tau, n, breakpoints)) {
        traj.samples.push_back(
            {t, viewcount_at(t, q, t_alpha, p, push), rate_at(t, q, t_alpha, p, push)});
    }
    return traj;
}

} // namespace viewgame::dynamics
