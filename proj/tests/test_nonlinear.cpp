#include <gtest/gtest.h>

#include <cmath>

#include "fracthird/errors.hpp"
#include "fracthird/nonlinear.hpp"
#include "fracthird/propagator.hpp"

using namespace fracthird;

namespace {

std::array<Field, 3> gaussian_data(const TorusGrid& g) {
    return {g.sample([](double x) { return std::exp(-x * x); }), g.sample([](double x) { return x * std::exp(-x * x); }),
            g.sample([](double x) { return std::exp(-0.5 * x * x); })};
}

}  // namespace

TEST(MildSolver, LinearRunMatchesPropagator) {
    const ModelParams mp{1, 1, 2, 2, 1};
    const TorusGrid g(1, 40.0, 256);
    const auto d = gaussian_data(g);
    MildSolverConfig cfg;
    cfg.dt = 0.1;
    cfg.max_time = 3.0;
    cfg.nonlinearity = 0.0;
    cfg.field_interval = 3.0;
    cfg.check_resolution = false;
    const auto [tr, rep] = integrate(mp, g, d, cfg);
    EXPECT_FALSE(rep.blew_up);
    const Field ref = evolve_linear_torus(g, d[0], d[1], d[2], 3.0, {1, 1, 2});
    const Field& u = tr.fields.back();
    EXPECT_NEAR(tr.field_times.back(), 3.0, 1e-12);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], ref[i], 1e-12);
}

TEST(MildSolver, DataIsScaledByEpsilon) {
    const ModelParams mp{1, 1, 2, 2, 0.25};
    const TorusGrid g(1, 40.0, 128);
    MildSolverConfig cfg;
    cfg.max_time = 0.1;
    cfg.check_resolution = false;
    const auto d = gaussian_data(g);
    const auto tr = integrate(mp, g, d, cfg).first;
    for (std::size_t i = 0; i < d[2].size(); ++i) EXPECT_DOUBLE_EQ(tr.data[2][i], 0.25 * d[2][i]);
}

TEST(MildSolver, SecondOrderInTime) {
    const ModelParams mp{1, 1, 2, 2, 1};
    const TorusGrid g(1, 40.0, 256);
    const std::array<Field, 3> d{Field(g.size(), 0.0), Field(g.size(), 0.0),
                                g.sample([](double x) { return std::exp(-x * x); })};
    std::vector<Field> fin;
    for (double dt : {0.1, 0.05, 0.025}) {
        MildSolverConfig cfg;
        cfg.dt = dt;
        cfg.max_time = 4.0;
        cfg.step_control = 0.0;
        cfg.check_resolution = false;
        cfg.field_interval = 4.0;
        fin.push_back(integrate(mp, g, d, cfg).first.fields.back());
    }
    auto diff = [&](int a, int b) {
        double m = 0.0;
        for (std::size_t i = 0; i < fin[a].size(); ++i) m = std::max(m, std::abs(fin[a][i] - fin[b][i]));
        return m;
    };
    EXPECT_NEAR(std::log2(diff(0, 1) / diff(1, 2)), 2.0, 0.25);
}

TEST(MildSolver, EulerIsFirstOrder) {
    const ModelParams mp{1, 1, 2, 2, 1};
    const TorusGrid g(1, 40.0, 128);
    const std::array<Field, 3> d{Field(g.size(), 0.0), Field(g.size(), 0.0),
                                g.sample([](double x) { return std::exp(-x * x); })};
    std::vector<Field> fin;
    for (double dt : {0.025, 0.0125, 0.00625}) {
        MildSolverConfig cfg;
        cfg.dt = dt;
        cfg.scheme = Scheme::DuhamelEuler;
        cfg.max_time = 2.0;
        cfg.step_control = 0.0;
        cfg.check_resolution = false;
        cfg.field_interval = 2.0;
        fin.push_back(integrate(mp, g, d, cfg).first.fields.back());
    }
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < fin[0].size(); ++i) {
        a = std::max(a, std::abs(fin[0][i] - fin[1][i]));
        b = std::max(b, std::abs(fin[1][i] - fin[2][i]));
    }
    EXPECT_NEAR(std::log2(a / b), 1.0, 0.25);
}

TEST(BlowupExtrapolation, RecoversSyntheticLifespan) {
    // sup = (T - t)^{-3/(p-1)} with T = 7.
    const double p = 2.0, T = 7.0;
    std::vector<std::pair<double, double>> s;
    for (double t = 0.0; t < 6.99; t += 0.01) s.emplace_back(t, std::pow(T - t, -3.0 / (p - 1.0)));
    EXPECT_NEAR(detail::extrapolate_blowup(s, p, 1.0, 1e6), T, 1e-9);
    EXPECT_TRUE(std::isnan(detail::extrapolate_blowup(s, p, 1e20, 1e30)));
}

TEST(Blowup, LargeDataBlowsUp) {
    const ModelParams mp{1, 1, 2, 2, 2.0};
    const TorusGrid g(1, 40.0, 256);
    const std::array<Field, 3> d{Field(g.size(), 0.0), Field(g.size(), 0.0),
                                g.sample([](double x) { return std::exp(-x * x); })};
    MildSolverConfig cfg;
    cfg.dt = 0.05;
    cfg.max_time = 50.0;
    cfg.blowup_threshold = 1e4;
    cfg.check_resolution = false;
    const auto rep = integrate(mp, g, d, cfg).second;
    ASSERT_TRUE(rep.blew_up);
    EXPECT_GT(rep.lifespan_estimate, rep.crossing_time * 0.9);
    EXPECT_LT(rep.threshold_sensitivity, 0.05);
}

TEST(XNorm, WeightsFollowLinearRates) {
    const ModelParams mp{1, 0.3, 2, 3, 1};
    const auto [w0, w1] = xT_weights(99.0, mp);
    EXPECT_NEAR(w0, std::pow(100.0, (3.0 - 2.4) / 1.2), 1e-9);
    EXPECT_NEAR(w1, std::pow(100.0, 3.0 / 1.2), 1e-6);
}

TEST(MildSolverConfig, Validation) {
    MildSolverConfig c;
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ParameterDomainError);
    c.dt = 0.1;
    c.sensitivity_factor = 0.5;
    EXPECT_THROW(c.validate(), ParameterDomainError);
}
