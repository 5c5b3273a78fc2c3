#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "viewgame/errors.hpp"

namespace viewgame::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Principal branch W0 of the Lambert function, i.e. the w >= -1 solving w e^w = x.
///
/// Halley iteration seeded with ln(1+x) for x >= 0 and with the branch-point
/// series for x < 0. Throws DomainError below -1/e.
inline double lambert_w0(double x)
{
    constexpr double kBranch = -1.0 / std::numbers::e;
    if (std::isnan(x)) {
        throw DomainError("lambert_w0: NaN argument");
    }
    if (x < kBranch - 1e-15) {
        throw DomainError("lambert_w0: argument below -1/e: " + std::to_string(x));
    }
    if (x <= kBranch) {
        return -1.0;
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return kInf;
    }

    double w;
    if (x >= 0.0) {
        w = std::log1p(x);
    } else {
        const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }

    for (int iter = 0; iter < 100; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) {
            break;
        }
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) {
            break;
        }
    }
    return w < -1.0 ? -1.0 : w;
}

/// W0(e^log_z) without forming e^log_z.
inline double lambert_w0_of_exp(double log_z)
{
    if (log_z < 700.0) {
        return lambert_w0(std::exp(log_z));
    }
    // w + ln w = log_z
    double w = log_z - std::log(log_z);
    for (int i = 0; i < 50; ++i) {
        const double step = (w + std::log(w) - log_z) / (1.0 + 1.0 / w);
        w -= step;
        if (std::abs(step) <= 1e-16 * w) {
            break;
        }
    }
    return w;
}

/// Continuous function with a sign change on [a, b].
struct BracketedFunction {
    std::function<double(double)> f;
    double a = 0.0;
    double b = 0.0;
};

inline constexpr int kRootIterationCap = 400;

/// Bisection root finder. Returns r with |f(r)| <= tol or a final bracket no
/// wider than tol. Deterministic: the midpoint sequence depends only on the inputs.
inline double find_root(const BracketedFunction& bf, double tol)
{
    if (!(tol > 0.0)) {
        throw PreconditionError("find_root: tol must be positive");
    }
    double lo = bf.a;
    double hi = bf.b;
    double flo = bf.f(lo);
    double fhi = bf.f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw NoSignChangeError("find_root: no sign change on [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    }
    for (int iter = 0; iter < kRootIterationCap; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            return mid; // bracket exhausted at floating-point resolution
        }
        const double fmid = bf.f(mid);
        if (std::abs(fmid) <= tol || (hi - lo) <= tol) {
            return mid;
        }
        if (std::signbit(fmid) == std::signbit(flo)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    throw NonConvergenceError("find_root: iteration cap reached");
}

/// Bisection on the boundary of a predicate that is false at a and true at b.
/// Returns a point within tol of the switch.
template <class Pred>
double bisect_predicate(Pred&& pred, double a, double b, double tol)
{
    for (int iter = 0; iter < kRootIterationCap && (b - a) > tol; ++iter) {
        const double mid = a + 0.5 * (b - a);
        if (mid <= a || mid >= b) {
            break;
        }
        if (pred(mid)) {
            b = mid;
        } else {
            a = mid;
        }
    }
    return b;
}

} // namespace viewgame::numerics
