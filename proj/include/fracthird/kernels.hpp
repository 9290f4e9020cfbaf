#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "fracthird/divdiff.hpp"
#include "fracthird/errors.hpp"

namespace fracthird {

using cplx = std::complex<double>;

enum class RootRegime { Oscillatory, Degenerate, RealDistinct };

struct KernelParams {
    double sigma = 1.0;
    double eta = 2.0;
    // Relative root gap below which the divided-difference path is forced; 0 disables that path.
    double theta = 1e-3;
    double eta_tol = 0.0;
};

struct CharRoots {
    std::array<cplx, 3> lambda{};
    RootRegime regime = RootRegime::Oscillatory;
    double omega = 0.0;  // r^{2 sigma / 3}
    double mu_R = 0.0;
    double mu_I = 0.0;
    double C_eta = 0.0;
    double D_eta = 0.0;
};

inline double frequency_scale(double r, double sigma) { return r == 0.0 ? 0.0 : std::pow(r, 2.0 * sigma / 3.0); }

inline CharRoots char_roots(double eta, double r, double sigma, double eta_tol = 0.0) {
    if (r < 0) throw ParameterDomainError("r must be nonnegative");
    if (!(eta > 0)) throw ParameterDomainError("eta must be positive");
    CharRoots cr;
    const double w = frequency_scale(r, sigma);
    cr.omega = w;
    cr.lambda[0] = -w;
    const bool degenerate = eta_tol > 0 ? std::abs(eta - 3.0) <= eta_tol : eta == 3.0;
    if (degenerate) {
        cr.regime = RootRegime::Degenerate;
        cr.lambda[1] = cr.lambda[2] = -w;
        cr.mu_R = -w;
    } else if (eta < 3.0) {
        cr.regime = RootRegime::Oscillatory;
        cr.C_eta = 0.5 * std::sqrt(3.0 + 2.0 * eta - eta * eta);
        cr.mu_R = 0.5 * (1.0 - eta) * w;
        cr.mu_I = cr.C_eta * w;
        cr.lambda[1] = cplx(cr.mu_R, cr.mu_I);
        cr.lambda[2] = cplx(cr.mu_R, -cr.mu_I);
    } else {
        cr.regime = RootRegime::RealDistinct;
        cr.D_eta = 0.5 * std::sqrt(eta * eta - 2.0 * eta - 3.0);
        cr.mu_R = 0.5 * (1.0 - eta) * w;
        cr.lambda[1] = (0.5 * (1.0 - eta) + cr.D_eta) * w;
        cr.lambda[2] = (0.5 * (1.0 - eta) - cr.D_eta) * w;
    }
    return cr;
}

// D[i][j] = d^i/dt^i K_j(t, r) for i = 0..3, j = 0..2.
struct KernelValues {
    std::array<std::array<double, 3>, 4> D{};
    double max_imag_ratio = 0.0;
    bool divided_difference_path = false;

    double K0() const { return D[0][0]; }
    double K1() const { return D[0][1]; }
    double K2() const { return D[0][2]; }
    double dK(int j) const { return D[1][j]; }
    double ddK(int j) const { return D[2][j]; }
};

namespace detail {

struct ExpMoments {
    std::array<cplx, 6> F{};  // F_k = exp_t[lambda](s^k e^{st})
    bool stable = false;
};

inline bool use_divided_differences(const CharRoots& cr, double t, double theta) {
    if (theta <= 0) return false;
    double gap = INFINITY, mag = 0.0;
    for (int i = 0; i < 3; ++i) {
        mag = std::max(mag, std::abs(cr.lambda[i]));
        for (int j = i + 1; j < 3; ++j) gap = std::min(gap, std::abs(cr.lambda[i] - cr.lambda[j]));
    }
    return gap < theta * mag || cr.omega * t < theta || gap * t < 1.0;
}

inline ExpMoments exp_moments(const CharRoots& cr, double t, double theta) {
    ExpMoments m;
    m.stable = use_divided_differences(cr, t, theta);
    const auto& l = cr.lambda;
    if (m.stable) {
        // Opitz form: column 2 of exp(t J), J upper bidiagonal with the roots on the diagonal.
        cplx a = divdiff::exp_t_dd(l, 3, t);
        cplx b = divdiff::exp_t_dd(std::array<cplx, 2>{l[1], l[2]}, 2, t);
        cplx c = std::exp(l[2] * t);
        for (int k = 0; k < 6; ++k) {
            m.F[k] = a;
            const cplx na = l[0] * a + b, nb = l[1] * b + c, nc = l[2] * c;
            a = na;
            b = nb;
            c = nc;
        }
    } else {
        for (int k = 0; k < 6; ++k)
            m.F[k] = divdiff::partial_fraction(l, 3, [&](cplx s) { return std::pow(s, k) * std::exp(s * t); });
    }
    return m;
}

}  // namespace detail

inline KernelValues kernel_values(double t, double r, const KernelParams& kp) {
    if (t < 0) throw ParameterDomainError("t must be nonnegative");
    const CharRoots cr = char_roots(kp.eta, r, kp.sigma, kp.eta_tol);
    KernelValues kv;
    if (t == 0.0) {
        for (int i = 0; i < 3; ++i) kv.D[i][i] = 1.0;
        const double w = cr.omega;
        // Third derivatives at t = 0 follow from the equation.
        kv.D[3] = {-w * w * w, -kp.eta * w * w, -kp.eta * w};
        return kv;
    }
    const auto m = detail::exp_moments(cr, t, kp.theta);
    kv.divided_difference_path = m.stable;
    std::array<double, 6> g{};
    for (int k = 0; k < 6; ++k) {
        g[k] = m.F[k].real();
        const double mag = std::abs(m.F[k]);
        if (mag > 0) kv.max_imag_ratio = std::max(kv.max_imag_ratio, std::abs(m.F[k].imag()) / mag);
    }
    const double a = kp.eta * cr.omega, b = kp.eta * cr.omega * cr.omega;
    for (int i = 0; i < 4; ++i) {
        kv.D[i][2] = g[i];
        kv.D[i][1] = g[i + 1] + a * g[i];
        kv.D[i][0] = g[i + 2] + a * g[i + 1] + b * g[i];
    }
    return kv;
}

// Max over kernels of |K''' + r^{2s} K + eta w K'' + eta w^2 K'| relative to the sum of term magnitudes.
inline double kernel_ode_residual(const KernelValues& kv, double r, const KernelParams& kp) {
    const double w = frequency_scale(r, kp.sigma);
    const double c0 = w * w * w, c1 = kp.eta * w * w, c2 = kp.eta * w;
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double t3 = kv.D[3][j], t0 = c0 * kv.D[0][j], t1 = c1 * kv.D[1][j], t2 = c2 * kv.D[2][j];
        const double scale = std::abs(t3) + std::abs(t0) + std::abs(t1) + std::abs(t2);
        if (scale == 0.0) continue;
        worst = std::max(worst, std::abs(t3 + t0 + t1 + t2) / scale);
    }
    return worst;
}

inline double kernel_ode_residual(double t, double r, const KernelParams& kp) {
    return kernel_ode_residual(kernel_values(t, r, kp), r, kp);
}

// Envelope exponent constant: half the slowest decay rate for damped regimes, the exact growth rate for eta < 1.
inline double envelope_constant(double eta) {
    const CharRoots cr = char_roots(eta, 1.0, 1.0);
    if (eta < 1.0) return cr.mu_R;
    double slowest = INFINITY;
    for (const auto& l : cr.lambda) slowest = std::min(slowest, std::abs(l.real()));
    return 0.5 * slowest;
}

inline double pointwise_envelope(double t, double r, const KernelParams& kp) {
    const double w = frequency_scale(r, kp.sigma);
    const double c = envelope_constant(kp.eta);
    if (kp.eta < 1.0) return std::exp(c * w * t);
    if (kp.eta == 1.0) return 1.0;
    return std::exp(-c * w * t);
}

// max_j |K_j| min(1, w)^{2 - j} divided by the envelope.
inline double envelope_ratio(double t, double r, const KernelParams& kp) {
    const KernelValues kv = kernel_values(t, r, kp);
    const double w = std::min(1.0, frequency_scale(r, kp.sigma));
    const double e = pointwise_envelope(t, r, kp);
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(kv.D[0][j]) * std::pow(w, 2 - j) / e);
    return worst;
}

// Fundamental matrix M[i][j] = d^i K_j(h, r) advancing (u, u_t, u_tt) mode-wise.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 kernel_matrix(double h, double r, const KernelParams& kp) {
    if (h < 0) throw ParameterDomainError("step must be nonnegative");
    const KernelValues kv = kernel_values(h, r, kp);
    Mat3 M{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M[i][j] = kv.D[i][j];
    return M;
}

inline double det3(const Mat3& M) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

// |det M - exp(-eta w t)| normalized by the Hadamard bound prod_i |row_i|.
inline double abel_defect(double t, double r, const KernelParams& kp) {
    const Mat3 M = kernel_matrix(t, r, kp);
    const double target = std::exp(-kp.eta * frequency_scale(r, kp.sigma) * t);
    double hadamard = 1.0;
    for (const auto& row : M) hadamard *= std::sqrt(row[0] * row[0] + row[1] * row[1] + row[2] * row[2]);
    const double scale = std::max(hadamard, target);
    return scale == 0.0 ? 0.0 : std::abs(det3(M) - target) / scale;
}

// Duhamel weights W_i(h) = int_0^h d^i K_2(s) ds for i = 0, 1, 2.
inline std::array<double, 3> duhamel_weights(double h, double r, const KernelParams& kp) {
    if (h < 0) throw ParameterDomainError("step must be nonnegative");
    if (h == 0.0) return {0.0, 0.0, 0.0};
    const CharRoots cr = char_roots(kp.eta, r, kp.sigma, kp.eta_tol);
    const std::array<cplx, 4> nodes{cplx(0.0), cr.lambda[0], cr.lambda[1], cr.lambda[2]};
    cplx w0;
    if (detail::use_divided_differences(cr, h, kp.theta) || cr.omega * h < 1.0)
        w0 = divdiff::exp_t_dd(nodes, 4, h);
    else
        w0 = divdiff::partial_fraction(nodes, 4, [&](cplx s) { return std::exp(s * h); });
    const KernelValues kv = kernel_values(h, r, kp);
    return {w0.real(), kv.D[0][2], kv.D[1][2]};
}

}  // namespace fracthird
