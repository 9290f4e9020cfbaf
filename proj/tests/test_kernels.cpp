#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "fracthird/kernels.hpp"
#include "fracthird/quadrature.hpp"

using namespace fracthird;

namespace {

using State = std::array<double, 3>;

// y''' + eta w y'' + eta w^2 y' + w^3 y = 0 from the unit vector e_j.
State odeint_kernel(double t, double r, double sigma, double eta, int j) {
    namespace ode = boost::numeric::odeint;
    const double w = frequency_scale(r, sigma);
    State y{0.0, 0.0, 0.0};
    y[j] = 1.0;
    auto rhs = [&](const State& s, State& d, double) {
        d[0] = s[1];
        d[1] = s[2];
        d[2] = -eta * w * s[2] - eta * w * w * s[1] - w * w * w * s[0];
    };
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, y, 0.0, t, 1e-3);
    return y;
}

}  // namespace

TEST(Kernels, AgreeWithOdeIntegrator) {
    for (double sigma : {0.5, 1.5})
        for (double eta : {0.5, 1.0, 2.0, 3.0, 3.0 + 1e-6, 5.0})
            for (double r : {0.3, 1.0, 2.0})
                for (double t : {0.5, 3.0}) {
                    const KernelValues kv = kernel_values(t, r, {sigma, eta, 1e-3});
                    for (int j = 0; j < 3; ++j) {
                        const State y = odeint_kernel(t, r, sigma, eta, j);
                        for (int i = 0; i < 3; ++i)
                            EXPECT_NEAR(kv.D[i][j], y[i], 1e-9 * std::max(1.0, std::abs(y[i])))
                                << "sigma " << sigma << " eta " << eta << " r " << r << " t " << t << " D" << i << j;
                    }
                }
}

TEST(Kernels, ZeroFrequencyIsTaylorPolynomial) {
    const KernelValues kv = kernel_values(2.0, 0.0, {1.0, 2.0, 1e-3});
    EXPECT_DOUBLE_EQ(kv.K0(), 1.0);
    EXPECT_DOUBLE_EQ(kv.K1(), 2.0);
    EXPECT_DOUBLE_EQ(kv.K2(), 2.0);
}

TEST(Kernels, CharacteristicRootsSatisfyPolynomial) {
    for (double eta : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        const CharRoots cr = char_roots(eta, 1.7, 1.0);
        const double w = cr.omega;
        for (const auto& l : cr.lambda) {
            const cplx v = l * l * l + eta * w * l * l + eta * w * w * l + w * w * w;
            EXPECT_LT(std::abs(v), 1e-12 * w * w * w);
        }
        EXPECT_NEAR(std::abs(cr.lambda[0] + w) * std::abs(cr.lambda[1] + w) * std::abs(cr.lambda[2] + w), 0.0, 1e-12);
    }
}

TEST(Kernels, ResidualDetectsSignFlip) {
    const KernelParams kp{1.0, 2.0, 1e-3};
    KernelValues kv = kernel_values(1.3, 1.1, kp);
    EXPECT_LT(kernel_ode_residual(kv, 1.1, kp), 1e-12);
    kv.D[0][1] = -kv.D[0][1];
    EXPECT_GT(kernel_ode_residual(kv, 1.1, kp), 1e-3);
}

TEST(Kernels, AbelIdentityOnRandomSamples) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.0, 10.0), ur(0.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double t = ut(rng), r = ur(rng);
        EXPECT_LT(abel_defect(t, r, {1.5, 2.5, 1e-3}), 1e-8);
    }
}

TEST(Kernels, ContinuityAcrossConfluentRoots) {
    const KernelValues ref = kernel_values(1.0, 1.0, {1.0, 3.0, 1e-3});
    for (double eta : {3.0 - 1e-6, 3.0 + 1e-6}) {
        const KernelValues kv = kernel_values(1.0, 1.0, {1.0, eta, 1e-3});
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(kv.D[0][j], ref.D[0][j], 1e-4 * std::abs(ref.D[0][j]));
    }
}

TEST(Kernels, ClosedFormLosesAccuracyWithoutDividedDifferences) {
    // With the divided-difference path disabled the partial-fraction form cancels catastrophically near eta = 3.
    const KernelValues ref = kernel_values(1.0, 1.0, {1.0, 3.0, 1e-3});
    double worst = 0.0;
    for (double eta : {3.0 - 1e-12, 3.0 + 1e-12}) {
        const KernelValues kv = kernel_values(1.0, 1.0, {1.0, eta, 0.0});
        for (int j = 0; j < 3; ++j) {
            const double rel = std::abs(kv.D[0][j] - ref.D[0][j]) / std::abs(ref.D[0][j]);
            worst = std::isfinite(rel) ? std::max(worst, rel) : INFINITY;
        }
    }
    EXPECT_GT(worst, 1e-4);
}

TEST(Kernels, DuhamelWeightsIntegrateK2) {
    const KernelParams kp{1.0, 2.0, 1e-3};
    for (double r : {0.0, 0.5, 2.0})
        for (double h : {0.05, 0.7}) {
            const auto w = duhamel_weights(h, r, kp);
            const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [&](double s) { return kernel_values(s, r, kp).K2(); }, 0.0, h, 5, 1e-14);
            EXPECT_NEAR(w[0], q, 1e-13);
            EXPECT_NEAR(w[1], kernel_values(h, r, kp).K2(), 1e-15);
        }
    EXPECT_THROW(duhamel_weights(-1.0, 1.0, kp), ParameterDomainError);
}

TEST(Kernels, EnvelopeBoundsKernels) {
    for (double eta : {1.5, 2.0, 5.0})
        for (double r : {0.5, 1.0, 3.0})
            for (double t : {1.0, 10.0, 50.0}) EXPECT_LT(envelope_ratio(t, r, {1.0, eta, 1e-3}), 50.0);
}
