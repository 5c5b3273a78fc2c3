#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "viewgame/errors.hpp"

// Units throughout: time in days, rates in views/day, viewcounts in views.

namespace viewgame {

enum class Quality { Good, Bad };

inline constexpr std::array<Quality, 2> kQualities{Quality::Good, Quality::Bad};

inline std::string_view to_string(Quality q)
{
    return q == Quality::Good ? "good" : "bad";
}

/// Prior over content quality.
struct Belief {
    double pi_g = 0.5;
    double pi_b = 0.5;

    static Belief from_good(double pi_g) { return Belief{pi_g, 1.0 - pi_g}; }

    double of(Quality q) const { return q == Quality::Good ? pi_g : pi_b; }

    void validate() const
    {
        if (!(pi_g >= 0.0 && pi_g <= 1.0 && pi_b >= 0.0 && pi_b <= 1.0)) {
            throw PreconditionError("belief components must lie in [0,1]");
        }
        if (std::abs(pi_g + pi_b - 1.0) > 1e-12) {
            throw PreconditionError("belief components must sum to 1");
        }
    }
};

enum class PushKind { Linear, ExponentialSaturating };

enum class MetricKind { PlainViewcount, Trend, TrendTimesViewcount, SideInformation };

inline std::string_view to_string(PushKind k)
{
    return k == PushKind::Linear ? "linear" : "exponential";
}

inline std::string_view to_string(MetricKind m)
{
    switch (m) {
    case MetricKind::PlainViewcount: return "plain";
    case MetricKind::Trend: return "trend";
    case MetricKind::TrendTimesViewcount: return "trend_times_viewcount";
    case MetricKind::SideInformation: return "side_information";
    }
    return "?";
}

struct ModelParams {
    double lambda_ps_g = 0.1;
    double lambda_ps_b = 0.01;
    double lambda_pu = 0.0;
    std::optional<double> n_pool;   // push pool size, exponential push only
    double tau = 10.0;              // content lifetime
    std::optional<double> gamma_th; // trend gate, variable horizon only

    double lambda_ps(Quality q) const { return q == Quality::Good ? lambda_ps_g : lambda_ps_b; }

    double pool() const
    {
        if (!n_pool) {
            throw PreconditionError("exponential push requires n_pool");
        }
        return *n_pool;
    }

    double gamma() const
    {
        if (!gamma_th) {
            throw PreconditionError("variable horizon requires gamma_th");
        }
        return *gamma_th;
    }

    void validate(PushKind push) const
    {
        if (!(lambda_ps_g > 0.0) || !(lambda_ps_b > 0.0)) {
            throw PreconditionError("push rates must be positive");
        }
        if (!(lambda_pu >= 0.0)) {
            throw PreconditionError("pull rate must be non-negative");
        }
        if (lambda_ps_g < lambda_ps_b) {
            throw PreconditionError("lambda_ps_g must be >= lambda_ps_b");
        }
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw PreconditionError("tau must be positive and finite");
        }
        if (push == PushKind::ExponentialSaturating && !(n_pool && *n_pool > 0.0)) {
            throw PreconditionError("exponential push requires n_pool > 0");
        }
    }
};

/// Game variant: fixes the push law, the decision metric and the utility form.
enum class Scenario {
    LinearFixedHorizon,
    ExponentialFixedHorizon,
    VariableHorizon,
    TrendViewcountLinear,
    TrendViewcountExponential,
    SideInformation,
};

inline constexpr std::array<Scenario, 6> kScenarios{
    Scenario::LinearFixedHorizon,     Scenario::ExponentialFixedHorizon,
    Scenario::VariableHorizon,        Scenario::TrendViewcountLinear,
    Scenario::TrendViewcountExponential, Scenario::SideInformation,
};

inline std::string_view to_string(Scenario s)
{
    switch (s) {
    case Scenario::LinearFixedHorizon: return "linear";
    case Scenario::ExponentialFixedHorizon: return "exponential";
    case Scenario::VariableHorizon: return "variable_horizon";
    case Scenario::TrendViewcountLinear: return "trend_viewcount_linear";
    case Scenario::TrendViewcountExponential: return "trend_viewcount_exponential";
    case Scenario::SideInformation: return "side_information";
    }
    return "?";
}

inline std::optional<Scenario> scenario_from_string(std::string_view name)
{
    for (Scenario s : kScenarios) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

inline PushKind push_of(Scenario s)
{
    switch (s) {
    case Scenario::LinearFixedHorizon:
    case Scenario::TrendViewcountLinear:
    case Scenario::SideInformation:
        return PushKind::Linear;
    default:
        return PushKind::ExponentialSaturating;
    }
}

inline MetricKind metric_of(Scenario s)
{
    switch (s) {
    case Scenario::TrendViewcountLinear:
    case Scenario::TrendViewcountExponential:
        return MetricKind::TrendTimesViewcount;
    case Scenario::SideInformation:
        return MetricKind::SideInformation;
    default:
        return MetricKind::PlainViewcount;
    }
}

/// Full validation for a scenario, including the variable-horizon gate restriction.
inline void validate(const ModelParams& p, Scenario s)
{
    p.validate(push_of(s));
    if (s == Scenario::VariableHorizon) {
        if (p.gamma() <= p.lambda_pu) {
            throw InfiniteHorizonError("gamma_th <= lambda_pu: the trend gate never closes");
        }
    }
}

} // namespace viewgame
