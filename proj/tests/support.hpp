#pragma once

#include <cmath>

#include "viewgame/model.hpp"

namespace testing_support {

// N=1000, tau=10 days, lambda_ps = 0.1 / 0.01, lambda_pu = 1.5 N lambda_ps(G)
inline viewgame::ModelParams reference_params(double n = 1000.0)
{
    viewgame::ModelParams p;
    p.lambda_ps_g = 0.1;
    p.lambda_ps_b = 0.01;
    p.lambda_pu = 1.5 * n * p.lambda_ps_g;
    p.n_pool = n;
    p.tau = 10.0;
    return p;
}

inline viewgame::ModelParams linear_params(double lg, double lb, double lpu, double tau = 10.0)
{
    viewgame::ModelParams p;
    p.lambda_ps_g = lg;
    p.lambda_ps_b = lb;
    p.lambda_pu = lpu;
    p.tau = tau;
    return p;
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0)
{
    if (std::isinf(a) || std::isinf(b)) {
        return a == b;
    }
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

} // namespace testing_support
