#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracthird/errors.hpp"
#include "fracthird/propagator.hpp"
#include "fracthird/quadrature.hpp"

namespace fracthird {

struct TimeWindow {
    double t_min = 0.0;
    double t_max = INFINITY;
};

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    TimeWindow window;
    std::size_t samples = 0;
    // Local slope drift of a quadratic log-log fit across the window.
    double curvature = 0.0;
    bool non_power_law = false;
};

struct LemmaCheckReport {
    std::string lemma;
    double theoretical_rate = 0.0;
    double fitted_rate = 0.0;
    double c_lower = 0.0;
    double c_upper = 0.0;
    double drift = 0.0;
    bool pass = false;
};

// Log-log slope drift above which a series is reported as not a power law.
inline constexpr double non_power_law_drift = 0.05;

inline DecayFit fit_rate(const NormSeries& series, TimeWindow window = {}) {
    if (series.t.size() != series.value.size()) throw ShapeMismatchError("series t and value differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        const double t = series.t[i];
        if (t < window.t_min || t > window.t_max) continue;
        if (!(series.value[i] > 0) || !(t > 0)) throw ParameterDomainError("fit_rate needs positive t and values");
        x.push_back(std::log(t));
        y.push_back(std::log(series.value[i]));
    }
    if (x.size() < 4) throw CoverageError("fit_rate needs at least 4 samples in the window");
    const std::size_t m = x.size();
    Eigen::MatrixXd A(m, 2), Q(m, 3);
    Eigen::VectorXd b(m);
    for (std::size_t i = 0; i < m; ++i) {
        A(i, 0) = x[i];
        A(i, 1) = 1.0;
        Q(i, 0) = x[i] * x[i];
        Q(i, 1) = x[i];
        Q(i, 2) = 1.0;
        b(i) = y[i];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd q = Q.colPivHouseholderQr().solve(b);
    DecayFit fit;
    fit.slope = c(0);
    fit.intercept = c(1);
    fit.rms_residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(m));
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    fit.window = {std::exp(*lo), std::exp(*hi)};
    fit.samples = m;
    fit.curvature = std::abs(2.0 * q(0) * (*hi - *lo));
    fit.non_power_law = fit.curvature > non_power_law_drift;
    return fit;
}

// Two-sided bounds of value(t) t^{-rate}; passes when their ratio is below `bound` and the relative spread over
// the last decade of the window is below `drift_limit`.
inline LemmaCheckReport sharpness_check(const NormSeries& series, double theoretical_rate, TimeWindow window,
                                        double bound = 10.0, double drift_limit = 0.05) {
    std::vector<double> ts, ratio;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        const double t = series.t[i];
        if (t < window.t_min || t > window.t_max) continue;
        ts.push_back(t);
        ratio.push_back(series.value[i] * std::pow(t, -theoretical_rate));
    }
    if (ts.empty()) throw CoverageError("sharpness window contains no samples");
    LemmaCheckReport rep;
    rep.theoretical_rate = theoretical_rate;
    rep.c_lower = *std::min_element(ratio.begin(), ratio.end());
    rep.c_upper = *std::max_element(ratio.begin(), ratio.end());
    const double t_end = *std::max_element(ts.begin(), ts.end());
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] >= t_end / 10.0 * (1 - 1e-12)) {
            lo = std::min(lo, ratio[i]);
            hi = std::max(hi, ratio[i]);
        }
    rep.drift = lo > 0 ? (hi - lo) / lo : INFINITY;
    if (ts.size() >= 4 && rep.c_lower > 0) rep.fitted_rate = fit_rate(series, window).slope;
    rep.pass = rep.c_lower > 0 && rep.c_upper / rep.c_lower < bound && rep.drift < drift_limit;
    return rep;
}

// (int_0^{eps0} r^{2s+n-1} exp(-2 c r^{2 sigma/3} t) dr)^{1/2}.
inline double weighted_gamma_integral(double s, double n, double sigma, double c, double t, double eps0 = 1.0) {
    if (!(n > -2.0 * s)) throw HypothesisError("requires n > -2s");
    if (!(c > 0)) throw ParameterDomainError("c must be positive");
    if (t < 0) throw ParameterDomainError("t must be nonnegative");
    if (!(sigma > 0) || !(eps0 > 0)) throw ParameterDomainError("sigma and eps0 must be positive");
    const double a = 2.0 * s + n;
    if (t == 0.0) return std::sqrt(std::pow(eps0, a) / a);
    // Beyond w = 400 / (c t) the integrand is below exp(-800) of its peak.
    const double w_cut = 400.0 / (c * t);
    const double r_hi = std::min(eps0, std::pow(w_cut, 3.0 / (2.0 * sigma)));
    auto f = [&](double r) { return std::pow(r, a - 1.0) * std::exp(-2.0 * c * frequency_scale(r, sigma) * t); };
    return std::sqrt(std::max(0.0, radial_integrate(f, sigma, r_hi, t).value));
}

// L^2 norms over |xi| < eps0 of the two oscillatory multipliers
// |xi|^{-4 sigma/3} (e^{-w t} - cos(C w t) e^{-(eta-1) w t / 2}) and |xi|^{-4 sigma/3} sin(C w t) e^{-(eta-1) w t / 2}.
inline std::pair<double, double> two_scale_integrals(double t, double eta, double n, double sigma, double eps0 = 1.0) {
    if (!(eta > 1.0 && eta < 3.0)) throw HypothesisError("requires 1 < eta < 3");
    if (!(n > 4.0 * sigma / 3.0)) throw HypothesisError("requires n > 4 sigma / 3");
    if (t < 0) throw ParameterDomainError("t must be nonnegative");
    if (t == 0.0) return {0.0, 0.0};
    const double C = 0.5 * std::sqrt(3.0 + 2.0 * eta - eta * eta);
    const double damp = 0.5 * (eta - 1.0);
    const double slow = std::min(1.0, damp);
    const double w_cut = 40.0 / (slow * t);
    const double r_hi = std::min(eps0, std::pow(w_cut, 3.0 / (2.0 * sigma)));
    const double weight_exp = n - 1.0 - 8.0 * sigma / 3.0;
    auto a1 = [&](double r) {
        const double w = frequency_scale(r, sigma);
        const double h = std::sin(0.5 * C * w * t);
        const double m = std::exp(-damp * w * t) * (std::expm1((damp - 1.0) * w * t) + 2.0 * h * h);
        const double v = std::pow(r, 0.5 * weight_exp) * m;
        return v * v;
    };
    auto a2 = [&](double r) {
        const double w = frequency_scale(r, sigma);
        const double m = std::sin(C * w * t) * std::exp(-damp * w * t);
        const double v = std::pow(r, 0.5 * weight_exp) * m;
        return v * v;
    };
    return {std::sqrt(std::max(0.0, radial_integrate(a1, sigma, r_hi, t).value)),
            std::sqrt(std::max(0.0, radial_integrate(a2, sigma, r_hi, t).value))};
}

}  // namespace fracthird
