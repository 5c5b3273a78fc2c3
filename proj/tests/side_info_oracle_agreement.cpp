#include <gtest/gtest.h>

#include "viewgame/equilibrium.hpp"
#include "viewgame/oracle.hpp"

using namespace viewgame;

// The side-information classification follows the closed-form case analysis,
// which evaluates its stationary points with push-only forecasts. The grid
// oracle uses the full pulled forecast, so the two are expected to disagree
// on most draws. Kept as a separate target so the divergence stays visible.
TEST(SideInfoOracleAgreement, RandomDraws)
{
    Rng rng(11);
    oracle::GridSpec g;
    int bad = 0;
    const int draws = 100;
    for (int i = 0; i < draws; ++i) {
        const auto d = oracle::random_draw(Scenario::SideInformation, rng);
        const auto c = classify_side_info(d.belief, d.params);
        const auto v =
            oracle::check_classification(c.set, d.belief, d.params, Scenario::SideInformation, g);
        bad += v.ok() ? 0 : 1;
    }
    EXPECT_EQ(bad, 0) << bad << " of " << draws << " draws disagree with the grid oracle";
}
