#pragma once

// Event-level viewer simulation and a population best-response process.
// Neither appears in the deterministic model; both exist to check it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "viewgame/dynamics.hpp"
#include "viewgame/oracle.hpp"
#include "viewgame/random.hpp"
#include "viewgame/utility.hpp"

namespace viewgame {

/// Starting thresholds: an explicit list, or n_agents draws from U(lo, hi).
struct InitialThresholds {
    enum class Kind { Sequence, Uniform };
    Kind kind = Kind::Uniform;
    std::vector<double> values;
    double lo = 0.0;
    double hi = 1.0;
};

struct SimConfig {
    std::uint64_t seed = 1;
    long n_push_pool = 10000;
    int n_agents = 101;
    int rounds = 200;
    double update_fraction = 0.25;
    InitialThresholds initial;

    void validate() const
    {
        if (n_push_pool < 1) {
            throw PreconditionError("SimConfig: n_push_pool must be >= 1");
        }
        if (n_agents < 1 || rounds < 0) {
            throw PreconditionError("SimConfig: n_agents must be >= 1 and rounds >= 0");
        }
        if (!(update_fraction > 0.0 && update_fraction <= 1.0)) {
            throw PreconditionError("SimConfig: update_fraction must lie in (0, 1]");
        }
        if (initial.kind == InitialThresholds::Kind::Sequence) {
            if (static_cast<int>(initial.values.size()) != n_agents) {
                throw PreconditionError("SimConfig: initial threshold list must have n_agents entries");
            }
        } else if (!(initial.lo <= initial.hi)) {
            throw PreconditionError("SimConfig: initial range needs lo <= hi");
        }
    }
};

// ---------------------------------------------------------------------------
// Viewer-level simulation
// ---------------------------------------------------------------------------

/// One sample path of the viewcount on [0, tau]. Push viewers are either a
/// Poisson stream of rate lps (linear) or n_push_pool viewers with independent
/// Exp(lps) access times (exponential). Once the count reaches alpha a Poisson
/// pull stream of rate lpu is added. Samples sit at t = 0 and after every
/// event; xdot holds the conditional event intensity just after the sample.
inline dynamics::Trajectory simulate_views(Quality q, double alpha, const ModelParams& p,
                                           PushKind push, const SimConfig& c)
{
    c.validate();
    p.validate(push);
    if (alpha < 0.0) {
        throw DomainError("simulate_views: alpha must be >= 0");
    }
    Rng rng(c.seed);
    const double lps = p.lambda_ps(q);
    const double tau = p.tau;

    std::vector<double> push_times;
    if (push == PushKind::Linear) {
        for (double t = rng.exponential(lps); t <= tau; t += rng.exponential(lps)) {
            push_times.push_back(t);
        }
    } else {
        push_times.reserve(static_cast<std::size_t>(c.n_push_pool));
        for (long i = 0; i < c.n_push_pool; ++i) {
            const double t = rng.exponential(lps);
            if (t <= tau) {
                push_times.push_back(t);
            }
        }
        std::sort(push_times.begin(), push_times.end());
    }

    // before the gate opens only push events count, so the opening time is
    // the ceil(alpha)-th push event
    double t_gate = std::numeric_limits<double>::infinity();
    if (alpha <= 0.0) {
        t_gate = 0.0;
    } else if (std::isfinite(alpha)) {
        const double k = std::ceil(alpha);
        if (k <= static_cast<double>(push_times.size())) {
            t_gate = push_times[static_cast<std::size_t>(k) - 1];
        }
    }
    std::vector<double> pull_times;
    if (p.lambda_pu > 0.0 && t_gate <= tau) {
        for (double t = t_gate + rng.exponential(p.lambda_pu); t <= tau;
             t += rng.exponential(p.lambda_pu)) {
            pull_times.push_back(t);
        }
    }

    dynamics::Trajectory out;
    out.quality = q;
    out.alpha = alpha;
    out.samples.reserve(push_times.size() + pull_times.size() + 1);
    const double pool = static_cast<double>(c.n_push_pool);
    auto intensity = [&](double t, double pushed) {
        const double push_rate = push == PushKind::Linear ? lps : lps * (pool - pushed);
        return push_rate + (t >= t_gate ? p.lambda_pu : 0.0);
    };
    out.samples.push_back({0.0, 0.0, intensity(0.0, 0.0)});
    std::size_t i = 0, j = 0;
    double pushed = 0.0;
    while (i < push_times.size() || j < pull_times.size()) {
        double t;
        if (j == pull_times.size() || (i < push_times.size() && push_times[i] <= pull_times[j])) {
            t = push_times[i++];
            pushed += 1.0;
        } else {
            t = pull_times[j++];
        }
        out.samples.push_back({t, static_cast<double>(i + j), intensity(t, pushed)});
    }
    return out;
}

/// Right-continuous step value of an event trajectory at time t.
inline double empirical_viewcount(const dynamics::Trajectory& tr, double t)
{
    const auto it = std::upper_bound(tr.samples.begin(), tr.samples.end(), t,
                                     [](double v, const dynamics::Sample& s) { return v < s.t; });
    return it == tr.samples.begin() ? 0.0 : std::prev(it)->x;
}

struct MeanFieldReport {
    std::vector<double> t;
    std::vector<double> mean_x;  // average over seeds
    std::vector<double> model_x; // deterministic trajectory
    double sup_error = 0.0;      // sup |mean - model|
    double relative_error = 0.0; // sup_error / sup |model|
};

/// Averages `runs` sample paths (seeds c.seed, c.seed + 1, ...) on an n-point
/// grid and compares with the deterministic trajectory of the same pool size.
inline MeanFieldReport mean_field_check(Quality q, double alpha, ModelParams p, PushKind push,
                                        const SimConfig& c, int runs, int n_grid = 1001)
{
    if (runs < 1 || n_grid < 2) {
        throw PreconditionError("mean_field_check: runs >= 1 and n_grid >= 2 required");
    }
    if (push == PushKind::ExponentialSaturating) {
        p.n_pool = static_cast<double>(c.n_push_pool);
    }
    MeanFieldReport r;
    r.t = dynamics::sampling_grid(p.tau, n_grid, {});
    r.mean_x.assign(r.t.size(), 0.0);
    for (int k = 0; k < runs; ++k) {
        SimConfig ck = c;
        ck.seed = c.seed + static_cast<std::uint64_t>(k);
        const auto tr = simulate_views(q, alpha, p, push, ck);
        for (std::size_t i = 0; i < r.t.size(); ++i) {
            r.mean_x[i] += empirical_viewcount(tr, r.t[i]) / runs;
        }
    }
    const double t_alpha = dynamics::activation_time(q, alpha, p, push, MetricKind::PlainViewcount);
    double scale = 0.0;
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        const double m = dynamics::viewcount_at(r.t[i], q, t_alpha, p, push);
        r.model_x.push_back(m);
        r.sup_error = std::max(r.sup_error, std::abs(r.mean_x[i] - m));
        scale = std::max(scale, std::abs(m));
    }
    r.relative_error = scale > 0.0 ? r.sup_error / scale : r.sup_error;
    return r;
}

// ---------------------------------------------------------------------------
// Population best-response dynamics
// ---------------------------------------------------------------------------

struct PopulationSnapshot {
    int round = 0;
    std::vector<double> thresholds;
};

enum class DynamicsStatus { Converged, MaxRounds };

inline std::string to_string(DynamicsStatus s)
{
    return s == DynamicsStatus::Converged ? "converged" : "max_rounds";
}

struct DynamicsResult {
    std::vector<PopulationSnapshot> snapshots; // round 0 is the initial population
    DynamicsStatus status = DynamicsStatus::MaxRounds;
    int rounds_run = 0;
    double tolerance = 0.0;
    double final_median = 0.0;
    double final_min = 0.0;
    double final_max = 0.0;
    double final_mean = 0.0;
};

inline double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Best-response set to a population playing alpha. Closed forms where the
/// model has them, the grid oracle otherwise.
inline BestResponse response_set(double alpha, const Belief& belief, const ModelParams& p,
                                 Scenario s)
{
    switch (s) {
    case Scenario::LinearFixedHorizon:
        return best_response_linear(alpha, belief, p);
    case Scenario::ExponentialFixedHorizon:
        return best_response_exponential(alpha, belief, p);
    case Scenario::SideInformation:
        return best_response_side_info(alpha, belief, p);
    default:
        break;
    }
    const auto g = oracle::grid_best_response(alpha, belief, p, s, oracle::GridSpec{});
    BestResponse br;
    br.points = g.betas;
    br.utility = g.best;
    br.kind = g.betas.size() == 1 ? ResponseKind::Point : ResponseKind::ExtremalPair;
    return br;
}

/// Closest member of a best-response set to x.
inline double nearest_in(const BestResponse& br, double x)
{
    double best = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::infinity();
    auto consider = [&](double v) {
        if (std::abs(v - x) < dist) {
            dist = std::abs(v - x);
            best = v;
        }
    };
    for (double v : br.points) {
        consider(v);
    }
    for (const auto& iv : br.intervals) {
        consider(std::clamp(x, iv.lo, iv.hi));
    }
    return best;
}

/// Asynchronous best response to the population median. Each round a seeded
/// shuffle picks ceil(update_fraction * n_agents) agents, and each moves to
/// the member of BR(median) nearest its current threshold. The run stops
/// once no agent would move by more than 1e-6 * alpha_domain_max.
inline DynamicsResult best_response_dynamics(const Belief& belief, const ModelParams& p,
                                             Scenario s, const SimConfig& c)
{
    c.validate();
    validate(p, s);
    belief.validate();
    const double top = alpha_domain_max(p, s);
    Rng rng(c.seed);

    std::vector<double> th;
    if (c.initial.kind == InitialThresholds::Kind::Sequence) {
        th = c.initial.values;
    } else {
        for (int i = 0; i < c.n_agents; ++i) {
            th.push_back(rng.uniform(c.initial.lo, c.initial.hi));
        }
    }
    for (double& v : th) {
        v = std::clamp(v, 0.0, top);
    }

    DynamicsResult r;
    r.tolerance = 1e-6 * top;
    r.snapshots.push_back({0, th});
    const int n_update =
        std::max(1, static_cast<int>(std::ceil(c.update_fraction * c.n_agents - 1e-12)));
    std::vector<int> order(static_cast<std::size_t>(c.n_agents));

    auto settled = [&](const BestResponse& br) {
        for (double v : th) {
            if (std::abs(nearest_in(br, v) - v) > r.tolerance) {
                return false;
            }
        }
        return true;
    };

    for (int round = 1; round <= c.rounds; ++round) {
        const double m = std::clamp(median_of(th), 0.0, top);
        const auto br = response_set(m, belief, p, s);
        if (settled(br)) {
            r.status = DynamicsStatus::Converged;
            break;
        }
        for (int i = 0; i < c.n_agents; ++i) {
            order[static_cast<std::size_t>(i)] = i;
        }
        rng.shuffle(order);
        for (int k = 0; k < n_update; ++k) {
            double& v = th[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
            v = std::clamp(nearest_in(br, v), 0.0, top);
        }
        r.snapshots.push_back({round, th});
        r.rounds_run = round;
    }
    if (r.status != DynamicsStatus::Converged) {
        const double m = std::clamp(median_of(th), 0.0, top);
        if (settled(response_set(m, belief, p, s))) {
            r.status = DynamicsStatus::Converged;
        }
    }
    r.final_median = median_of(th);
    r.final_min = *std::min_element(th.begin(), th.end());
    r.final_max = *std::max_element(th.begin(), th.end());
    double sum = 0.0;
    for (double v : th) {
        sum += v;
    }
    r.final_mean = sum / th.size();
    return r;
}

} // namespace viewgame
