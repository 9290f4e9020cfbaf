#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracthird/errors.hpp"
#include "fracthird/estimates.hpp"
#include "fracthird/propagator.hpp"

using namespace fracthird;

namespace {

const DataTriple gaussian_all{RadialDataSpec::gaussian(1.0, 1.0), RadialDataSpec::gaussian(1.0, 1.0),
                              RadialDataSpec::gaussian(1.0, 1.0)};
const DataTriple gaussian_v2{RadialDataSpec::zero(), RadialDataSpec::zero(), RadialDataSpec::gaussian(1.0, 1.0)};

}  // namespace

TEST(RadialNorm, InitialTimeIsDataNorm) {
    // At t = 0 only v_0 survives: ||e^{-r^2}||^2 in 1D = (1/pi) int_0^inf e^{-2 r^2} dr.
    const PropagatorParams pp{1.0, 0.25, 2.0};
    const DataTriple d{RadialDataSpec::gaussian(1.0, 1.0), RadialDataSpec::zero(), RadialDataSpec::zero()};
    const double expect = std::sqrt(std::sqrt(std::numbers::pi / 2.0) / (2.0 * std::numbers::pi));
    EXPECT_NEAR(radial_norm(d, 0.0, 0.0, pp), expect, 1e-10);
}

TEST(RadialNorm, AgreesWithTorusEvolution) {
    // At sigma = 3 the multipliers are analytic in |xi|^2, so the solution has Gaussian tails and the torus is exact.
    const PropagatorParams pp{1.0, 3.0, 2.0};
    const TorusGrid g(1, 200.0, 2048);
    auto gauss = [](double x) { return std::exp(-x * x / 4.0) / std::sqrt(4.0 * std::numbers::pi); };
    const Field z(g.size(), 0.0);
    const Field u = evolve_linear_torus(g, z, z, g.sample(gauss), 3.0, pp);
    EXPECT_NEAR(lp_norm(g, u, 2.0), radial_norm(gaussian_v2, 3.0, 0.0, pp), 1e-8);
}

TEST(Decay, SlopesInDimensionWindow) {
    const PropagatorParams pp{1.0, 0.25, 2.0};
    const auto times = log_times(1e2, 1e4, 8);
    const auto l2 = norm_series([&](double t) { return radial_norm(gaussian_all, t, 0.0, pp); }, times, 0.0);
    const auto hs = norm_series([&](double t) { return radial_norm(gaussian_all, t, 1.0 / 3.0, pp); }, times, 1.0 / 3.0);
    EXPECT_NEAR(fit_rate(l2).slope, -1.0, 0.05);
    EXPECT_NEAR(fit_rate(hs).slope, -3.0, 0.05);
}

TEST(Decay, MeanZeroDataDecaysFaster) {
    const PropagatorParams pp{1.0, 0.25, 2.0};
    const DataTriple d{RadialDataSpec::zero(), RadialDataSpec::zero(), RadialDataSpec::mean_zero_gaussian(1.0, 1.0)};
    const auto times = log_times(1e2, 1e4, 4);
    const auto s = norm_series([&](double t) { return radial_norm(d, t, 0.0, pp); }, times, 0.0);
    EXPECT_LT(fit_rate(s).slope, -1.5);
}

TEST(Profile, RefinementGainsOnePower) {
    const PropagatorParams pp{1.0, 0.25, 2.0};
    const auto times = log_times(1e3, 1e4, 4);
    const auto v = norm_series([&](double t) { return radial_norm(gaussian_all, t, 0.0, pp); }, times, 0.0);
    const auto d = norm_series([&](double t) { return refined_difference_norm(gaussian_all, t, 0.0, pp); }, times, 0.0);
    EXPECT_NEAR(fit_rate(d).slope - fit_rate(v).slope, -1.0, 0.1);
}

TEST(Profile, DegenerateCaseReproducesSecondSlot) {
    const PropagatorParams pp{1.0, 1.0, 3.0};
    EXPECT_EQ(refined_difference_norm(gaussian_v2, 2.0, 0.0, pp), 0.0);
    for (double r : {0.1, 0.7, 2.0})
        EXPECT_NEAR(profile_multiplier(2.0, r, ProfileKind::W3, pp), kernel_values(2.0, r, pp.kernel()).K2(), 1e-13);
    EXPECT_THROW(profile_norm(gaussian_v2, 1.0, 0.0, ProfileKind::W13, pp), RegimeError);
}

TEST(Profile, MultiplierMatchesSecondKernel) {
    for (double eta : {2.0, 5.0}) {
        const PropagatorParams pp{1.0, 1.0, eta};
        for (double r : {0.5, 1.0, 3.0})
            EXPECT_NEAR(profile_multiplier(4.0, r, profile_for(eta), pp), kernel_values(4.0, r, pp.kernel()).K2(), 1e-10);
    }
}

TEST(Stability, TrichotomyOnSingleMode) {
    const double sigma = 1.5;
    const auto grow = instability_rate(1.0, {1.0, sigma, 0.5});
    EXPECT_NEAR(grow.exponent, 0.25, 0.0025);
    EXPECT_LE(instability_rate(1.0, {1.0, sigma, 1.0}).sup_over_initial, 10.0);
    for (double eta : {1.5, 3.0, 5.0}) EXPECT_TRUE(instability_rate(1.0, {1.0, sigma, eta}).strictly_decaying) << eta;
}

TEST(Stability, GevreySlopeMatchesSlowestRoot) {
    const PropagatorParams pp{1.0, 1.5, 2.0};
    EXPECT_NEAR(gevrey_slope(gaussian_v2, 1.0, pp), 0.5, 0.05);
}

TEST(LogTimes, GeometricAndInclusive) {
    const auto t = log_times(1.0, 100.0, 4);
    ASSERT_EQ(t.size(), 9u);
    EXPECT_DOUBLE_EQ(t.front(), 1.0);
    EXPECT_NEAR(t.back(), 100.0, 1e-12);
    EXPECT_THROW(log_times(0.0, 1.0, 4), ParameterDomainError);
}
