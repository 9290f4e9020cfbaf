#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracthird/errors.hpp"
#include "fracthird/functionals.hpp"

using namespace fracthird;

namespace {

TrajectoryRecord constant_trajectory(const TorusGrid& g, double t_end, int steps, double value) {
    TrajectoryRecord tr;
    for (int k = 0; k <= steps; ++k) {
        tr.field_times.push_back(t_end * k / steps);
        tr.fields.emplace_back(g.size(), value);
    }
    tr.data = {Field(g.size(), 0.0), Field(g.size(), 0.0), Field(g.size(), 0.0)};
    return tr;
}

}  // namespace

TEST(SmoothStep, PlateausAndSymmetry) {
    EXPECT_EQ(smooth_step(0.0), 1.0);
    EXPECT_EQ(smooth_step(0.5), 1.0);
    EXPECT_EQ(smooth_step(1.0), 0.0);
    EXPECT_EQ(smooth_step(3.0), 0.0);
    for (double s : {0.1, 0.3, 0.45}) EXPECT_NEAR(smooth_step(0.5 + 0.5 * s) + smooth_step(1.0 - 0.5 * s), 1.0, 1e-15);
    double prev = 1.0;
    for (double t = 0.5; t <= 1.0; t += 0.01) {
        EXPECT_LE(smooth_step(t), prev);
        prev = smooth_step(t);
    }
    EXPECT_EQ(smooth_step_star(0.3), 0.0);
    EXPECT_EQ(smooth_step_star(0.7), smooth_step(0.7));
}

TEST(TestFunction, SupportAndPlateau) {
    const auto tp = TestFunctionParams::defaults(1.0, 1.0, 8.0);
    EXPECT_EQ(psi_R(0.0, 0.0, 1.0, tp), 1.0);
    EXPECT_EQ(psi_R(3.9, 0.0, 1.0, tp), 1.0);
    EXPECT_EQ(psi_R(8.0, 0.0, 1.0, tp), 0.0);
    EXPECT_EQ(psi_R(0.0, std::pow(8.0, 1.5), 1.0, tp), 0.0);
    EXPECT_GT(psi_R(5.0, 1.0, 1.0, tp), 0.0);
    EXPECT_LT(psi_R(5.0, 1.0, 1.0, tp), 1.0);
    EXPECT_EQ(psi_star_R(1.0, 0.0, 1.0, tp), 0.0);
}

TEST(TestFunction, DefaultsAndValidation) {
    const auto tp = TestFunctionParams::defaults(1.0, 1.0, 2.0);
    EXPECT_EQ(tp.m, 3.0);
    EXPECT_EQ(tp.s_sigma, 0.5);
    EXPECT_EQ(TestFunctionParams::defaults(1.0, 1.5, 2.0).s_sigma, 0.25);
    EXPECT_NO_THROW(tp.validate(1.0, 1.0));
    TestFunctionParams bad = tp;
    bad.m = 2.0;
    EXPECT_THROW(bad.validate(1.0, 1.0), ParameterDomainError);
    bad = TestFunctionParams::defaults(1.0, 1.5, 2.0);
    bad.s_sigma = 0.6;
    EXPECT_THROW(bad.validate(1.0, 1.5), ParameterDomainError);
}

TEST(TestFunction, AutodiffMatchesFiniteDifferences) {
    const auto tp = TestFunctionParams::defaults(1.0, 1.0, 4.0);
    const double t = 2.7, x = 0.4, h = 1e-4;
    const auto d = psi_R_derivatives(t, x, 1.0, tp);
    auto f = [&](double s) { return psi_R(s, x, 1.0, tp); };
    EXPECT_NEAR(d[0], f(t), 1e-15);
    EXPECT_NEAR(d[1], (f(t + h) - f(t - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(d[2], (f(t + h) - 2 * f(t) + f(t - h)) / (h * h), 1e-4);
}

TEST(Functionals, SeparableOracleForConstantField) {
    // u = 1, p = 2: I_R = (int zeta_R dt)(int phi_R dx) with int_0^1 chi = 3/4.
    const TorusGrid g(1, 400.0, 4096);
    const ModelParams mp{1, 1, 2, 2, 1};
    const auto tp = TestFunctionParams::defaults(1.0, 1.0, 8.0);
    const double T = 4.0;
    const auto tr = constant_trajectory(g, T, 800, 1.0);
    const double space = 2.0 * tp.R * std::atan(200.0 / tp.R);
    EXPECT_NEAR(I_R(tr, g, tp, mp) / (0.75 * T * space), 1.0, 1e-4);
}

TEST(Functionals, CoverageIsEnforced) {
    const TorusGrid g(1, 40.0, 128);
    const ModelParams mp{1, 1, 2, 2, 1};
    const auto tp = TestFunctionParams::defaults(1.0, 1.0, 8.0);
    const auto tr = constant_trajectory(g, 3.0, 30, 1.0);
    EXPECT_THROW(I_R(tr, g, tp, mp), CoverageError);
    EXPECT_THROW(J_R(tr, g, tp, mp), CoverageError);
}

TEST(Functionals, JBoundedByPsiIntegral) {
    const TorusGrid g(1, 80.0, 512);
    const ModelParams mp{1, 1, 2, 2, 1};
    const auto tp = TestFunctionParams::defaults(1.0, 1.0, 4.0);
    const auto tr = constant_trajectory(g, 4.0, 200, 1.0);
    // Support of psi_R: t + |x|^{2/3} < R, so int int psi <= int_0^R 2 (R - t)^{3/2} dt = (4/5) R^{5/2}.
    const double j = J_R(tr, g, tp, mp);
    EXPECT_GT(j, 0.0);
    EXPECT_LT(j, 0.8 * std::pow(4.0, 2.5));
    EXPECT_GT(Y_p(4.0, tr, g, tp, mp), 0.0);
}

TEST(Scaling, DilationIdentity) {
    const TorusGrid g(1, 400.0, 1 << 14);
    for (double gamma : {0.5, 1.0, 1.5}) EXPECT_LT(frac_lap_scaling_check(gamma, 2, g), 1e-6) << gamma;
    EXPECT_THROW(frac_lap_scaling_check(1.0, 2, TorusGrid(1, 20.0, 256)), DomainTooSmallError);
}

TEST(Scaling, EnvelopeExponent) {
    EXPECT_NEAR(envelope_exponent(1.0, 3.0, 1.0), 5.0, 1e-15);
    EXPECT_NEAR(envelope_exponent(0.5, 3.0, 1.0), 2.0, 1e-15);
    const auto f = envelope_bound_check(0.5, 3.0, TorusGrid(1, 4000.0, 1 << 16));
    EXPECT_NEAR(f.exponent, 2.0, 0.2);
    EXPECT_TRUE(f.pass);
}

TEST(WeakForm, SigmaInThreeN) {
    EXPECT_TRUE(sigma_in_3N(3.0));
    EXPECT_TRUE(sigma_in_3N(6.0));
    EXPECT_FALSE(sigma_in_3N(1.0));
    EXPECT_FALSE(sigma_in_3N(4.5));
}
