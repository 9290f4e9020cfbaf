#include <gtest/gtest.h>

#include "fracthird/errors.hpp"
#include "fracthird/model.hpp"

using namespace fracthird;

TEST(Classify, TrichotomyInEta) {
    EXPECT_EQ(classify_eta(0.5).stability, Stability::IllPosedSobolev);
    EXPECT_EQ(classify_eta(1.0).stability, Stability::MarginallyStable);
    EXPECT_EQ(classify_eta(2.0).stability, Stability::GevreySmoothing);
    EXPECT_EQ(classify_eta(2.0).profile, ProfileRegime::DiffusionWaves);
    EXPECT_EQ(classify_eta(3.0).profile, ProfileRegime::DegenerateDiffusion);
    EXPECT_EQ(classify_eta(5.0).profile, ProfileRegime::PureDiffusion);
    EXPECT_EQ(classify_eta(3.0 + 1e-9, 1e-6).profile, ProfileRegime::DegenerateDiffusion);
    EXPECT_THROW(classify_eta(0.0), ParameterDomainError);
}

TEST(Classify, DimensionWindow) {
    EXPECT_TRUE(dimension_window_check(1.0, 0.25, 2.0).ok);
    EXPECT_FALSE(dimension_window_check(1.0, 1.0, 2.0).ok);
    EXPECT_FALSE(dimension_window_check(1.0, 1.0, 0.5).ok);
    EXPECT_TRUE(dimension_window_check(1.0, 1.0, 3.0).ok);
    EXPECT_FALSE(dimension_window_check(8.0, 3.0, 5.0).ok);
    EXPECT_TRUE(dimension_window_check(8.0, 3.0, 2.0).ok);
}

TEST(CriticalExponent, SigmaThreeTable) {
    for (int n = 1; n <= 10; ++n) {
        const auto pc = critical_exponent(Rational(n), Rational(3));
        if (n <= 4) {
            EXPECT_TRUE(is_unbounded(pc)) << n;
        } else {
            ASSERT_FALSE(is_unbounded(pc)) << n;
            EXPECT_EQ(std::get<Rational>(pc), Rational(1) + Rational(6, n - 4)) << n;
        }
    }
}

TEST(CriticalExponent, DoubleMatchesRational) {
    for (double n : {1.0, 2.0, 3.0})
        for (double s : {0.25, 0.5}) {
            const double d = to_double(critical_exponent(n, s));
            const double q = to_double(critical_exponent(Rational(static_cast<int>(n)), Rational(static_cast<int>(s * 4), 4)));
            EXPECT_NEAR(d, q, 1e-14);
        }
}

TEST(LifespanExponent, ExactValues) {
    EXPECT_EQ(lifespan_exponent(Rational(5), Rational(3), Rational(2)), Rational(-2, 5));
    EXPECT_EQ(lifespan_exponent(Rational(1), Rational(1), Rational(2)), Rational(-2, 7));
    EXPECT_THROW(lifespan_exponent(Rational(5), Rational(3), Rational(7)), RegimeError);
    EXPECT_THROW(lifespan_exponent(1.0, 1.0, 1.0), ParameterDomainError);
}

TEST(LifespanExponent, IndependentFormula) {
    // -2 sigma / (6 sigma p' - 3n - 2 sigma) over a grid of subcritical points.
    for (double n : {1.0, 2.0})
        for (double s : {0.5, 1.0, 2.0})
            for (double p : {1.2, 1.5, 2.0}) {
                const double pc = to_double(critical_exponent(n, s));
                if (!(p < pc)) continue;
                const double pp = p / (p - 1.0);
                EXPECT_NEAR(lifespan_exponent(n, s, p), -2.0 * s / (6.0 * s * pp - 3.0 * n - 2.0 * s), 1e-13);
            }
}

TEST(DecayRates, SobolevGapIsTwo) {
    for (double n : {1.0, 2.0, 3.0})
        for (double s : {0.25, 0.5}) {
            const auto tab = decay_rates(n, s, 2.0);
            EXPECT_NEAR(tab.hs_rate - tab.l2_rate, 2.0, 1e-14);
            EXPECT_EQ(tab.refined_gain, 1.0);
        }
    EXPECT_THROW(decay_rates(1.0, 1.0, 2.0), RegimeError);
    EXPECT_TRUE(decay_rates(Rational(8), Rational(3), Rational(5)).log_loss_flag);
}

TEST(Admissible, GagliardoNirenbergInterval) {
    const auto iv = gn_admissible_p(Rational(3), Rational(1));
    EXPECT_EQ(iv.lower, Rational(2));
    EXPECT_EQ(std::get<Rational>(iv.upper), Rational(9));
    EXPECT_TRUE(is_unbounded(gn_admissible_p(Rational(2), Rational(1)).upper));
    EXPECT_THROW(gn_admissible_p(0.5, 1.0), ParameterDomainError);
}

TEST(Admissible, ExistenceWindowLabel) {
    EXPECT_TRUE(global_existence_window(1.0, 0.3, 2.0, 3.0).verified);
    EXPECT_FALSE(global_existence_window(1.0, 0.3, 0.5, 3.0).verified);
    EXPECT_FALSE(global_existence_window(1.0, 1.0, 2.0, 2.0).verified);
}

TEST(ModelParams, Validation) {
    EXPECT_NO_THROW((ModelParams{1, 1, 2, 2, 1}.validate(true)));
    EXPECT_THROW((ModelParams{3, 1, 2, 2, 1}.validate(true)), ParameterDomainError);
    EXPECT_THROW((ModelParams{1, 1, 2, 1, 1}.validate()), ParameterDomainError);
    EXPECT_THROW((ModelParams{1, 1, 2, 2, 0}.validate()), ParameterDomainError);
}
