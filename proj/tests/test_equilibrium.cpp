#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "viewgame/equilibrium.hpp"
#include "viewgame/oracle.hpp"

using namespace viewgame;
using testing_support::reference_params;
using testing_support::linear_params;

namespace {

oracle::GridSpec small_grid()
{
    oracle::GridSpec g;
    g.n_beta = 600;
    g.n_alpha = 100;
    // near a switch point the utility loss is second order, so a looser slack
    // admits epsilon-equilibria a few grid steps outside the exact set
    g.tol_factor = 1e-9;
    return g;
}

void expect_oracle_ok(const EquilibriumSet& set, const Belief& b, const ModelParams& p, Scenario s)
{
    const auto v = oracle::check_classification(set, b, p, s, small_grid());
    EXPECT_TRUE(v.sound) << "unsound points: " << v.unsound.size();
    EXPECT_TRUE(v.complete) << "missing points: " << v.missing.size();
}

} // namespace

TEST(EquilibriumSet, NormalisesDegenerateIntervalsAndCoveredPoints)
{
    auto s = make_equilibrium_set({1.0, 1.0, 2.5, 9.0}, {{2.0, 3.0}, {4.0, 4.0}, {6.0, 5.0}}, "x");
    EXPECT_EQ(s.kind, EquilibriumKind::IntervalUnionPoints);
    ASSERT_EQ(s.intervals.size(), 1u);
    EXPECT_EQ(s.points, (std::vector<double>{1.0, 4.0, 9.0}));
    EXPECT_DOUBLE_EQ(s.distance(3.5), 0.5);
    EXPECT_DOUBLE_EQ(s.distance(2.2), 0.0);

    EXPECT_EQ(make_equilibrium_set({}, {}, "e").kind, EquilibriumKind::Empty);
    EXPECT_TRUE(std::isinf(make_equilibrium_set({}, {}, "e").distance(0.0)));
    EXPECT_EQ(make_equilibrium_set({}, {{0.0, 1.0}}, "i").kind, EquilibriumKind::Interval);
    EXPECT_EQ(make_equilibrium_set({3.0}, {}, "p").kind, EquilibriumKind::FinitePoints);
}

TEST(ClassifyLinear, GoodContentOnlyGivesZero)
{
    const auto p = linear_params(0.1, 0.01, 150);
    const Belief b{1.0, 0.0};
    const auto s = classify_linear(b, p);
    EXPECT_EQ(s.case_label, "i");
    EXPECT_EQ(s.points, std::vector<double>{0.0});
    expect_oracle_ok(s, b, p, Scenario::LinearFixedHorizon);
}

TEST(ClassifyLinear, StrongPullGivesWholeDomain)
{
    const auto p = linear_params(0.1, 0.01, 150);
    const Belief b{0.75, 0.25};
    const auto s = classify_linear(b, p);
    EXPECT_EQ(s.case_label, "ii");
    ASSERT_EQ(s.intervals.size(), 1u);
    EXPECT_DOUBLE_EQ(s.intervals[0].lo, 0.0);
    EXPECT_DOUBLE_EQ(s.intervals[0].hi, 0.01 * 10.0);
    EXPECT_DOUBLE_EQ(*s.symbol("beta_tau_b"), 0.1);
    expect_oracle_ok(s, b, p, Scenario::LinearFixedHorizon);
}

TEST(ClassifyLinear, BadLeaningBeliefGivesTop)
{
    const auto p = linear_params(0.1, 0.1, 0.1);
    const Belief b{0.2, 0.8};
    const auto s = classify_linear(b, p);
    EXPECT_EQ(s.case_label, "iii");
    EXPECT_EQ(s.points, std::vector<double>{1.0});
    expect_oracle_ok(s, b, p, Scenario::LinearFixedHorizon);
}

TEST(ClassifyLinear, TieGoesToFirstCase)
{
    // pi_G / lG == pi_B / lB exactly
    const auto p = linear_params(0.5, 0.25, 1.0);
    const auto s = classify_linear(Belief{2.0 / 3.0, 1.0 / 3.0}, p);
    EXPECT_EQ(s.case_label, "i");
}

TEST(ClassifyLinear, RejectsBadBelief)
{
    const auto p = linear_params(0.1, 0.01, 1);
    EXPECT_THROW(classify_linear(Belief{0.7, 0.7}, p), PreconditionError);
    EXPECT_THROW(classify_linear(Belief{-0.1, 1.1}, p), PreconditionError);
}

TEST(ClassifyLinear, RandomDrawsAgreeWithOracle)
{
    Rng rng(7);
    for (int i = 0; i < 15; ++i) {
        const auto d = oracle::random_draw(Scenario::LinearFixedHorizon, rng);
        expect_oracle_ok(classify_linear(d.belief, d.params), d.belief, d.params,
                         Scenario::LinearFixedHorizon);
    }
}

TEST(ClassifyExponential, BadLeaningBeliefGivesTop)
{
    const auto p = reference_params();
    const Belief b{0.4, 0.6};
    const auto s = classify_exponential(b, p);
    EXPECT_EQ(s.case_label, "i");
    const double top = -1000.0 * std::expm1(-0.01 * 10.0);
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_NEAR(s.points[0], top, 1e-9 * top);
    expect_oracle_ok(s, b, p, Scenario::ExponentialFixedHorizon);
}

TEST(ClassifyExponential, OddsAboveRateRatioGiveZero)
{
    auto p = reference_params();
    p.lambda_ps_b = 0.05; // ell = 2 < rho = 19
    const Belief b{0.95, 0.05};
    const auto s = classify_exponential(b, p);
    EXPECT_EQ(s.case_label, "iii-a");
    EXPECT_EQ(s.points, std::vector<double>{0.0});
    expect_oracle_ok(s, b, p, Scenario::ExponentialFixedHorizon);
}

TEST(ClassifyExponential, SwitchPointMatchesDiagonalRatio)
{
    const auto p = reference_params();
    for (double a : {0.0, 10.0, 40.0, 90.0}) {
        const double rho = diagonal_lambert_ratio(a, p);
        EXPECT_NEAR(exponential_switch_point(rho, p), a, 1e-9 * 1000.0);
    }
    // decreasing in alpha
    EXPECT_GT(diagonal_lambert_ratio(0.0, p), diagonal_lambert_ratio(50.0, p));
}

TEST(ClassifyExponential, IntermediateOddsGiveUpperInterval)
{
    const auto p = reference_params();
    const double a_hat = 40.0;
    const double rho = diagonal_lambert_ratio(a_hat, p);
    const Belief b = Belief::from_good(rho / (1.0 + rho));
    const auto s = classify_exponential(b, p);
    EXPECT_EQ(s.case_label, "ii-c");
    ASSERT_EQ(s.intervals.size(), 1u);
    EXPECT_NEAR(s.intervals[0].lo, a_hat, 1e-6);
    expect_oracle_ok(s, b, p, Scenario::ExponentialFixedHorizon);
}

TEST(ClassifyExponential, HypothesesEnforced)
{
    auto p = reference_params();
    p.lambda_ps_b = 0.2;
    EXPECT_THROW(classify_exponential(Belief{0.6, 0.4}, p), PreconditionError);
    p = reference_params();
    p.lambda_pu = 50.0; // below lG N = 100
    EXPECT_THROW(classify_exponential(Belief{0.6, 0.4}, p), PreconditionError);
}

TEST(ClassifyExponential, RandomDrawsAgreeWithOracle)
{
    Rng rng(3);
    for (int i = 0; i < 6; ++i) {
        const auto d = oracle::random_draw(Scenario::ExponentialFixedHorizon, rng);
        expect_oracle_ok(classify_exponential(d.belief, d.params), d.belief, d.params,
                         Scenario::ExponentialFixedHorizon);
    }
}

namespace {

ModelParams vh_params()
{
    auto p = reference_params();
    p.gamma_th = p.lambda_pu + 0.5 * p.lambda_ps_b * 1000.0;
    return p;
}

} // namespace

TEST(ClassifyVariableHorizon, BadLeaningBeliefGivesTop)
{
    const auto p = vh_params();
    const Belief b{0.4, 0.6};
    const auto s = classify_variable_horizon(b, p);
    EXPECT_EQ(s.case_label, "1");
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_DOUBLE_EQ(s.points[0], alpha_domain_max(p, Scenario::VariableHorizon));
    expect_oracle_ok(s, b, p, Scenario::VariableHorizon);
}

TEST(ClassifyVariableHorizon, GoodLeaningBeliefAgreesWithOracle)
{
    const auto p = vh_params();
    const Belief b{0.75, 0.25};
    const auto s = classify_variable_horizon(b, p);
    EXPECT_EQ(s.case_label, "window-scan");
    EXPECT_TRUE(s.contains(alpha_domain_max(p, Scenario::VariableHorizon)));
    expect_oracle_ok(s, b, p, Scenario::VariableHorizon);
}

TEST(ClassifyVariableHorizon, GateBelowPullRateThrows)
{
    auto p = reference_params();
    p.gamma_th = p.lambda_pu;
    EXPECT_THROW(classify_variable_horizon(Belief{0.6, 0.4}, p), InfiniteHorizonError);
    p.gamma_th = 0.5 * p.lambda_pu;
    EXPECT_THROW(classify_variable_horizon(Belief{0.6, 0.4}, p), InfiniteHorizonError);
}

TEST(SideInfo, CriticalRateExample)
{
    const auto p = linear_params(0.2, 0.1, 0.0);
    const auto d = side_info_diagnostics(Belief{0.75, 0.25}, p);
    EXPECT_NEAR(d.lambda_pu_s, -0.05, 1e-15);
    EXPECT_NEAR(d.L, 0.1, 1e-15);
    EXPECT_EQ(classify_side_info(Belief{0.75, 0.25}, p).set.case_label, "i");
}

TEST(SideInfo, StationaryPointsCoincideWithoutPull)
{
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        auto p = linear_params(rng.uniform(0.05, 1), 0, 0, rng.uniform(1, 20));
        p.lambda_ps_b = p.lambda_ps_g * rng.uniform(0.1, 0.99);
        const auto d = side_info_diagnostics(Belief::from_good(rng.uniform(0.01, 0.99)), p);
        EXPECT_NEAR(d.beta1, d.beta2, 1e-9 * std::max(1.0, std::abs(d.beta2)));
    }
}

TEST(SideInfo, BadLeaningBeliefHasNegativeCriticalRate)
{
    const auto p = linear_params(0.3, 0.1, 0.0);
    for (double pg : {0.1, 0.3, 0.49}) {
        EXPECT_LT(side_info_critical_rate(Belief::from_good(pg), p), 0.0);
    }
    EXPECT_TRUE(std::isinf(side_info_critical_rate(Belief{0.5, 0.5}, p)));
}

TEST(SideInfo, PhaseTransitionFamily)
{
    const Belief b{0.6, 0.4};
    auto p = linear_params(0.3, 0.1, 0.2);
    EXPECT_NEAR(side_info_critical_rate(b, p), 0.3, 1e-15);

    const auto below = classify_side_info(b, p);
    EXPECT_EQ(below.set.case_label, "ii");
    EXPECT_EQ(below.set.kind, EquilibriumKind::FinitePoints);
    EXPECT_TRUE(below.set.contains(alpha_domain_max(p, Scenario::SideInformation)));

    p.lambda_pu = 0.4;
    const auto above = classify_side_info(b, p);
    EXPECT_EQ(above.set.case_label, "i");
    ASSERT_EQ(above.set.intervals.size(), 1u);
    EXPECT_DOUBLE_EQ(above.set.intervals[0].lo, 0.0);
    // 1/2 (1*4 - 9*16) / (4 - 16)
    EXPECT_NEAR(above.set.intervals[0].hi, 35.0 / 6.0, 1e-12);
    EXPECT_TRUE(above.diagnostics.positive_measure);
}
