#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracthird/errors.hpp"
#include "fracthird/kernels.hpp"
#include "fracthird/model.hpp"
#include "fracthird/parallel.hpp"
#include "fracthird/quadrature.hpp"
#include "fracthird/spectral.hpp"

namespace fracthird {

struct PropagatorParams {
    double n = 1.0;
    double sigma = 1.0;
    double eta = 2.0;
    double eps0 = 1.0;
    double theta = 1e-3;
    // Longest time evolve_linear_torus accepts when eta < 1.
    double unstable_horizon = 20.0;

    KernelParams kernel() const { return {sigma, eta, theta}; }
};

// Radial Fourier-side data profile v_hat(r).
struct RadialDataSpec {
    enum class Kind { Zero, Gaussian, MeanZeroGaussian, RadialBump };
    Kind kind = Kind::Zero;
    double width = 1.0;  // a in exp(-a r^2)
    double mass = 1.0;   // P = v_hat(0) for Gaussian
    std::vector<double> table_r, table_v;

    static RadialDataSpec zero() { return {}; }
    static RadialDataSpec gaussian(double a, double P) { return {Kind::Gaussian, a, P, {}, {}}; }
    static RadialDataSpec mean_zero_gaussian(double a, double P) { return {Kind::MeanZeroGaussian, a, P, {}, {}}; }
    static RadialDataSpec bump(std::vector<double> r, std::vector<double> v) {
        if (r.size() != v.size() || r.size() < 2) throw ParameterDomainError("bump table needs matching r, v columns");
        return {Kind::RadialBump, 1.0, v.front(), std::move(r), std::move(v)};
    }

    double operator()(double r) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Gaussian: return mass * std::exp(-width * r * r);
            case Kind::MeanZeroGaussian: return mass * width * r * r * std::exp(-width * r * r);
            case Kind::RadialBump: {
                if (r >= table_r.back()) return 0.0;
                if (r <= table_r.front()) return table_v.front();
                const auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
                const std::size_t i = static_cast<std::size_t>(it - table_r.begin());
                const double s = (r - table_r[i - 1]) / (table_r[i] - table_r[i - 1]);
                return (1 - s) * table_v[i - 1] + s * table_v[i];
            }
        }
        return 0.0;
    }

    bool is_zero() const { return kind == Kind::Zero || mass == 0.0; }

    // Radius beyond which |v_hat| is below exp(-46) relative to its scale.
    double support_radius() const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Gaussian: return std::sqrt(46.0 / width);
            case Kind::MeanZeroGaussian: return std::sqrt(52.0 / width);
            case Kind::RadialBump: return table_r.back();
        }
        return 0.0;
    }
};

using DataTriple = std::array<RadialDataSpec, 3>;

enum class ProfileKind { W13, W3, W3inf };

inline std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::W13: return "W13";
        case ProfileKind::W3: return "W3";
        case ProfileKind::W3inf: return "W3inf";
    }
    return "?";
}

inline ProfileKind profile_for(double eta) {
    switch (classify_eta(eta).profile) {
        case ProfileRegime::DiffusionWaves: return ProfileKind::W13;
        case ProfileRegime::DegenerateDiffusion: return ProfileKind::W3;
        case ProfileRegime::PureDiffusion: return ProfileKind::W3inf;
    }
    return ProfileKind::W3;
}

struct NormSeries {
    std::vector<double> t;
    std::vector<double> value;
    double order = 0.0;
    std::string method = "radial-quadrature";
};

namespace detail {

inline double combine(const KernelValues& kv, const DataTriple& d, double r) {
    double v = 0.0;
    for (int j = 0; j < 3; ++j)
        if (!d[j].is_zero()) v += kv.D[0][j] * d[j](r);
    return v;
}

inline double data_cutoff(const DataTriple& d) {
    double r = 0.0;
    for (const auto& s : d) r = std::max(r, s.support_radius());
    return r;
}

// Radius beyond which the kernels have decayed by exp(-40) at time t (eta > 1 only).
inline double kernel_cutoff(double t, const PropagatorParams& p) {
    if (p.eta <= 1.0 || t <= 0) return INFINITY;
    const CharRoots cr = char_roots(p.eta, 1.0, 1.0);
    double slow = INFINITY;
    for (const auto& l : cr.lambda) slow = std::min(slow, std::abs(l.real()));
    const double w = 40.0 / (slow * t);
    return std::pow(w, 3.0 / (2.0 * p.sigma));
}

// c_n (2 pi)^{-n}: Parseval weight of the radial Fourier integral on R^n.
inline double parseval_weight(double n) { return sphere_area(n) * std::pow(2.0 * std::numbers::pi, -n); }

template <class Multiplier>
double radial_weighted_norm(Multiplier&& m, double t, double s, double r_hi, const PropagatorParams& p) {
    if (s < 0) throw ParameterDomainError("derivative order must be nonnegative");
    if (!(r_hi > 0)) return 0.0;
    auto f = [&](double r) {
        const double v = m(r);
        if (v == 0.0) return 0.0;
        return std::pow(r, 2.0 * s + p.n - 1.0) * v * v;
    };
    const QuadResult q = radial_integrate(f, p.sigma, r_hi, t);
    return std::sqrt(std::max(0.0, parseval_weight(p.n) * q.value));
}

}  // namespace detail

inline double radial_norm(const DataTriple& data, double t, double s, const PropagatorParams& p) {
    const KernelParams kp = p.kernel();
    const double r_hi = std::min(detail::data_cutoff(data), detail::kernel_cutoff(t, p));
    return detail::radial_weighted_norm(
        [&](double r) { return detail::combine(kernel_values(t, r, kp), data, r); }, t, s, r_hi, p);
}

// Multiplier of the asymptotic profile acting on v_2.
inline double profile_multiplier(double t, double r, ProfileKind kind, const PropagatorParams& p) {
    const double w = frequency_scale(r, p.sigma);
    const double eta = p.eta;
    if (kind == ProfileKind::W3) return 0.5 * t * t * std::exp(-w * t);
    // The closed forms cancel to O(t^2) at small w t; there the same function is evaluated in divided-difference form.
    if (w * t < 0.5) return kernel_values(t, r, p.kernel()).K2();
    const double wt = w * t;
    if (kind == ProfileKind::W13) {
        const double C = 0.5 * std::sqrt(3.0 + 2.0 * eta - eta * eta);
        const double damp = std::exp(-0.5 * (eta - 1.0) * wt);
        return ((-std::exp(-wt) + std::cos(C * wt) * damp) / (eta - 3.0) + std::sin(C * wt) * damp / (2.0 * C)) /
               (w * w);
    }
    const double D = 0.5 * std::sqrt(eta * eta - 2.0 * eta - 3.0);
    const double base = std::exp(0.5 * (1.0 - eta) * wt);
    return (std::exp(-wt) / (3.0 - eta) +
            base / D * (std::exp(D * wt) / (3.0 - eta + 2.0 * D) - std::exp(-D * wt) / (3.0 - eta - 2.0 * D))) /
           (w * w);
}

inline void check_profile_regime(ProfileKind kind, double eta) {
    if (profile_for(eta) != kind) throw RegimeError("profile " + to_string(kind) + " does not match eta");
}

inline double profile_norm(const DataTriple& data, double t, double s, ProfileKind kind, const PropagatorParams& p) {
    check_profile_regime(kind, p.eta);
    if (data[2].is_zero()) return 0.0;
    const double r_hi = std::min(data[2].support_radius(), detail::kernel_cutoff(t, p));
    return detail::radial_weighted_norm(
        [&](double r) { return profile_multiplier(t, r, kind, p) * data[2](r); }, t, s, r_hi, p);
}

inline double refined_difference_norm(const DataTriple& data, double t, double s, ProfileKind kind,
                                      const PropagatorParams& p) {
    check_profile_regime(kind, p.eta);
    const KernelParams kp = p.kernel();
    const double r_hi = std::min(detail::data_cutoff(data), detail::kernel_cutoff(t, p));
    return detail::radial_weighted_norm(
        [&](double r) {
            const KernelValues kv = kernel_values(t, r, kp);
            double v = 0.0;
            if (!data[0].is_zero()) v += kv.K0() * data[0](r);
            if (!data[1].is_zero()) v += kv.K1() * data[1](r);
            // The profile reproduces the v_2 slot exactly; only roundoff would remain from it.
            return v;
        },
        t, s, r_hi, p);
}

inline double refined_difference_norm(const DataTriple& data, double t, double s, const PropagatorParams& p) {
    return refined_difference_norm(data, t, s, profile_for(p.eta), p);
}

// Geometric sample times with the given density per decade on [t0, t1].
inline std::vector<double> log_times(double t0, double t1, int per_decade) {
    if (!(t0 > 0 && t1 > t0)) throw ParameterDomainError("log_times needs 0 < t0 < t1");
    const int count = std::max(2, static_cast<int>(std::ceil(std::log10(t1 / t0) * per_decade)) + 1);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = t0 * std::pow(t1 / t0, static_cast<double>(i) / (count - 1));
    return out;
}

template <class NormFn>
NormSeries norm_series(NormFn&& fn, const std::vector<double>& times, double order, unsigned workers = 1) {
    NormSeries ns;
    ns.t = times;
    ns.order = order;
    ns.value.assign(times.size(), 0.0);
    parallel_for(times.size(), workers, [&](std::size_t i) { ns.value[i] = fn(times[i]); });
    return ns;
}

// Linear evolution on the torus: inverse transform of K0 u0 + K1 u1 + K2 u2 mode-wise.
inline Field evolve_linear_torus(const TorusGrid& g, const Field& u0, const Field& u1, const Field& u2, double t,
                                 const PropagatorParams& p) {
    if (p.eta < 1.0 && t > p.unstable_horizon)
        throw InstabilityGuardError("eta < 1: modes grow like exp(mu_R t); time exceeds the configured horizon");
    const SpectralField a = g.forward(u0), b = g.forward(u1), c = g.forward(u2);
    SpectralField out(g.size());
    const KernelParams kp = p.kernel();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const KernelValues kv = kernel_values(t, g.k_abs(i), kp);
        out[i] = kv.K0() * a[i] + kv.K1() * b[i] + kv.K2() * c[i];
    }
    return g.inverse(out);
}

struct StabilityMeasurement {
    double exponent = 0.0;
    double sup_over_initial = 0.0;
    double final_over_initial = 0.0;
    bool strictly_decaying = false;
};

// Single-mode amplitude |(v, v_t, v_tt)| at frequency r for data (1, 0, 0); exponent from a log-linear fit
// through the oscillation peaks after the transient (or through all samples when no peaks occur).
inline StabilityMeasurement instability_rate(double r, const PropagatorParams& p, double horizon = 100.0,
                                             std::array<double, 3> data = {1.0, 0.0, 0.0}) {
    const KernelParams kp = p.kernel();
    const int samples = 8000;
    std::vector<double> t(samples + 1), a(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        t[i] = horizon * i / samples;
        const KernelValues kv = kernel_values(t[i], r, kp);
        double s2 = 0.0;
        for (int d = 0; d < 3; ++d) {
            double v = 0.0;
            for (int j = 0; j < 3; ++j) v += kv.D[d][j] * data[j];
            s2 += v * v;
        }
        a[i] = std::sqrt(s2);
    }
    StabilityMeasurement m;
    const double a0 = a[0] > 0 ? a[0] : 1.0;
    m.sup_over_initial = *std::max_element(a.begin(), a.end()) / a0;
    m.final_over_initial = a.back() / a0;
    m.strictly_decaying = true;
    for (int i = samples / 4; i <= samples; ++i)
        if (a[i] > a[samples / 4] * (1 + 1e-12)) m.strictly_decaying = false;
    m.strictly_decaying = m.strictly_decaying && a.back() < a[0];
    std::vector<double> xs, ys;
    for (int i = samples / 4 + 1; i < samples; ++i)
        if (a[i] >= a[i - 1] && a[i] > a[i + 1] && a[i] > 0) {
            xs.push_back(t[i]);
            ys.push_back(std::log(a[i]));
        }
    if (xs.size() < 3) {
        xs.clear();
        ys.clear();
        for (int i = samples / 4; i <= samples; ++i)
            if (a[i] > 0) {
                xs.push_back(t[i]);
                ys.push_back(std::log(a[i]));
            }
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    m.exponent = sxx > 0 ? sxy / sxx : 0.0;
    return m;
}

// Smoothing constant c in |v_hat(t, r)| ~ w^{-k} exp(-c w t), w = r^{2 sigma/3}, fitted over the resolved
// high-frequency band with the polynomial prefactor as a nuisance regressor.
inline double gevrey_slope(const DataTriple& data, double t, const PropagatorParams& p) {
    if (t == 0.0) return 0.0;
    if (t < 0) throw ParameterDomainError("t must be nonnegative");
    const KernelParams kp = p.kernel();
    const double w_lo = std::max(1.0, frequency_scale(p.eps0, p.sigma));
    const double w_hi = frequency_scale(4.0 * detail::data_cutoff(data), p.sigma);
    std::vector<double> xs, ys;
    const int samples = 400;
    for (int i = 0; i <= samples; ++i) {
        const double w = w_lo + (w_hi - w_lo) * i / samples;
        const double r = std::pow(w, 3.0 / (2.0 * p.sigma));
        const KernelValues kv = kernel_values(t, r, kp);
        double e2 = 0.0, d2 = 0.0;
        for (int d = 0; d < 3; ++d) {
            double v = 0.0;
            for (int j = 0; j < 3; ++j) v += kv.D[d][j] * data[j](r);
            e2 += std::pow(v / std::pow(w, d), 2);
        }
        for (int j = 0; j < 3; ++j) d2 += data[j](r) * data[j](r);
        if (!(e2 > 1e-280 && d2 > 1e-280)) break;
        xs.push_back(w);
        ys.push_back(-0.5 * std::log(e2 / d2));
    }
    if (xs.size() < 8 || xs.back() < 1.5 * w_lo) throw AccuracyError("gevrey band under-resolved", 1.0);
    Eigen::MatrixXd A(xs.size(), 3);
    Eigen::VectorXd y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        A(i, 0) = xs[i];
        A(i, 1) = std::log(xs[i]);
        A(i, 2) = 1.0;
        y(i) = ys[i];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    return coef(0) / t;
}

}  // namespace fracthird
