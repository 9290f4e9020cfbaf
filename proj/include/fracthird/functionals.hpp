#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/differentiation/autodiff.hpp>

#include "fracthird/errors.hpp"
#include "fracthird/model.hpp"
#include "fracthird/nonlinear.hpp"
#include "fracthird/spectral.hpp"

namespace fracthird {

struct TestFunctionParams {
    double R = 1.0;
    double K = 1.0;
    double m = 0.0;
    double s_sigma = 0.5;

    double q(double n) const { return n + 2.0 * s_sigma; }

    static double default_m(double n, double sigma) {
        return std::ceil(std::max(2.0 * sigma, n + 2.0 * sigma / 3.0)) + 1.0;
    }

    static TestFunctionParams defaults(double n, double sigma, double R) {
        const double frac = sigma - std::floor(sigma);
        return {R, 1.0, default_m(n, sigma), frac > 0 ? 0.5 * frac : 0.5};
    }

    void validate(double n, double sigma) const {
        if (!(R > 0)) throw ParameterDomainError("R must be positive");
        if (!(K >= 1)) throw ParameterDomainError("K must be at least 1");
        if (!(m > 2.0 * sigma)) throw ParameterDomainError("m must exceed 2 sigma");
        const double frac = sigma - std::floor(sigma);
        if (!(s_sigma > 0 && s_sigma < 1)) throw ParameterDomainError("s_sigma must lie in (0, 1)");
        if (frac > 0 && !(s_sigma < frac)) throw ParameterDomainError("s_sigma must lie below sigma - [sigma]");
        (void)n;
    }
};

// Smooth non-increasing step: 1 on [0, 1/2], 0 on [1, inf), exp(-1/x) glue in between.
template <class T>
T smooth_step(const T& tau) {
    using std::exp;
    const double tv = static_cast<double>(tau);
    if (tv <= 0.5) return T(1.0);
    if (tv >= 1.0) return T(0.0);
    const T s = 2.0 * tau - 1.0;
    const T a = exp(-1.0 / (1.0 - s));
    const T b = exp(-1.0 / s);
    return a / (a + b);
}

template <class T>
T smooth_step_star(const T& tau) {
    if (static_cast<double>(tau) < 0.5) return T(0.0);
    return smooth_step(tau);
}

template <class F>
Field radial_sample(const TorusGrid& g, F&& f) {
    Field out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.x_abs(i));
    return out;
}

inline double phi_R(double x_abs, double n, const TestFunctionParams& tp) {
    const double y = x_abs / (tp.R * tp.K);
    return std::pow(1.0 + y * y, -0.5 * tp.q(n));
}

inline double zeta_R(double t, double sigma, const TestFunctionParams& tp) {
    return smooth_step(t * std::pow(tp.R, -2.0 * sigma / 3.0));
}

namespace detail {

template <class T>
T int_pow(const T& x, int m) {
    T r = T(1.0);
    for (int i = 0; i < m; ++i) r = r * x;
    return r;
}

template <class T>
T psi_generic(const T& t, double x_abs, double sigma, const TestFunctionParams& tp, bool star) {
    const T tau = (t + std::pow(x_abs, 2.0 * sigma / 3.0)) / tp.R;
    const T c = star ? smooth_step_star(tau) : smooth_step(tau);
    const double mi = std::round(tp.m);
    if (std::abs(mi - tp.m) < 1e-12) return int_pow(c, static_cast<int>(mi));
    using std::pow;
    if (static_cast<double>(c) == 0.0) return T(0.0);
    return pow(c, tp.m);
}

}  // namespace detail

inline double psi_R(double t, double x_abs, double sigma, const TestFunctionParams& tp) {
    return detail::psi_generic(t, x_abs, sigma, tp, false);
}

inline double psi_star_R(double t, double x_abs, double sigma, const TestFunctionParams& tp) {
    return detail::psi_generic(t, x_abs, sigma, tp, true);
}

// psi_R and its first three time derivatives.
inline std::array<double, 4> psi_R_derivatives(double t, double x_abs, double sigma, const TestFunctionParams& tp) {
    namespace ad = boost::math::differentiation;
    const auto tv = ad::make_fvar<double, 3>(t);
    const auto y = detail::psi_generic(tv, x_abs, sigma, tp, false);
    return {y.derivative(0), y.derivative(1), y.derivative(2), y.derivative(3)};
}

// Applies (-Delta)^order to a sampled field through the grid spectrum.
inline Field apply_fractional(const TorusGrid& g, const Field& f, double order) {
    if (order == 0.0) return f;
    return g.inverse(fractional_laplacian(g, g.forward(f), order));
}

// Share of the L^2 mass of <x/R>^{-q} lying outside the torus.
inline double scaled_bracket_tail_fraction(double q, double R, double L) {
    // int_a^inf (1 + y^2)^{-q} dy via the substitution y = tan(theta).
    auto tail = [&](double a) {
        const double th0 = std::atan(a);
        const int steps = 4000;
        const double h = (0.5 * std::numbers::pi - th0) / steps;
        double acc = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double th = th0 + i * h;
            const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * std::pow(std::cos(th), 2.0 * q - 2.0);
        }
        return acc * h / 3.0;
    };
    return tail(0.5 * L / R) / tail(0.0);
}

// (-Delta)^order of a 1D function sampled on a torus `pad` times longer than g with the same spacing, which
// approximates the whole-line operator; values are returned on g, or on g refined by `refine` via spectral
// zero-padding.
template <class F>
Field free_space_fractional(const TorusGrid& g, F&& f, double order, int pad, int refine = 1) {
    if (g.dim() != 1) throw ParameterDomainError("free-space evaluation runs in 1D");
    if (pad < 1 || refine < 1) throw ParameterDomainError("pad and refine must be positive");
    const int N = g.modes();
    const int PN = N * pad;
    const TorusGrid big(1, g.length() * pad, PN);
    const SpectralField s = fractional_laplacian(big, big.forward(big.sample(f)), order);
    const TorusGrid fine(1, big.length(), PN * refine);
    SpectralField padded(static_cast<std::size_t>(PN) * refine, cplx(0.0));
    for (int j = 0; j < PN; ++j) {
        const int m = big.lattice(j);
        if (m == -PN / 2 && refine > 1) continue;
        padded[m >= 0 ? m : PN * refine + m] = s[j] * static_cast<double>(refine);
    }
    const Field full = fine.inverse(padded);
    const std::size_t off = static_cast<std::size_t>(PN - N) * refine / 2;
    return Field(full.begin() + static_cast<std::ptrdiff_t>(off),
                 full.begin() + static_cast<std::ptrdiff_t>(off + static_cast<std::size_t>(N) * refine));
}

// max_{|x| < L/4} |(-Delta)^gamma (phi(./R))(x) - R^{-2 gamma} ((-Delta)^gamma phi)(x/R)| for phi = <x>^{-q} in 1D.
// The right-hand side is evaluated at x/R by zero-padding the spectrum of phi by the integer factor R.
inline double frac_lap_scaling_check(double gamma, int R, const TorusGrid& g, double q = 3.0, int pad = 16) {
    if (gamma < 0) throw ParameterDomainError("gamma must be nonnegative");
    if (R < 1) throw ParameterDomainError("R must be a positive integer");
    if (g.dim() != 1) throw ParameterDomainError("scaling check runs in 1D");
    if (scaled_bracket_tail_fraction(q, R, g.length()) > 1e-8)
        throw DomainTooSmallError("tail mass of the scaled test function exceeds 1e-8");
    const int N = g.modes();
    const Field lhs =
        free_space_fractional(g, [&](double x) { return std::pow(1.0 + (x / R) * (x / R), -0.5 * q); }, gamma, pad);
    const Field rhs = free_space_fractional(g, [&](double x) { return std::pow(1.0 + x * x, -0.5 * q); }, gamma, pad, R);
    const double scale = std::pow(static_cast<double>(R), -2.0 * gamma);
    const std::size_t centre = static_cast<std::size_t>(N) * R / 2;
    double dev = 0.0;
    for (int j = 0; j < N; ++j) {
        if (std::abs(g.coordinate(j)) >= 0.25 * g.length()) continue;
        const std::size_t i = centre + static_cast<std::size_t>(j) - static_cast<std::size_t>(N / 2);
        dev = std::max(dev, std::abs(lhs[j] - scale * rhs[i]));
    }
    return dev;
}

struct EnvelopeFit {
    double exponent = 0.0;
    double expected = 0.0;
    bool pass = false;
};

inline double envelope_exponent(double sigma, double q, double n) {
    const double frac = sigma - std::floor(sigma);
    return frac == 0.0 ? q + 2.0 * sigma : n + 2.0 * frac;
}

// Decay exponent of |(-Delta)^sigma <x>^{-q}| on 10 <= |x| <= L/40 (1D).
inline EnvelopeFit envelope_bound_check(double sigma, double q, const TorusGrid& g) {
    const double n = g.dim();
    if (!(q > n)) throw ParameterDomainError("requires q > n");
    if (g.dim() != 1) throw ParameterDomainError("envelope check runs in 1D");
    const double x_lo = 10.0, x_hi = g.length() / 40.0;
    if (!(x_hi > 4 * x_lo)) throw DomainTooSmallError("torus too small for an envelope fit");
    const Field phi = g.sample([&](double x) { return std::pow(1.0 + x * x, -0.5 * q); });
    const Field f = apply_fractional(g, phi, sigma);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.coordinate(static_cast<int>(j));
        if (x < x_lo || x > x_hi) continue;
        const double v = std::abs(f[j]);
        if (!(v > 0)) continue;
        const double lx = std::log(x), ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    if (cnt < 4) throw DomainTooSmallError("too few samples in the envelope window");
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    EnvelopeFit fit;
    fit.exponent = -slope;
    fit.expected = envelope_exponent(sigma, q, n);
    fit.pass = fit.exponent >= fit.expected - 0.2;
    return fit;
}

namespace detail {

// Integral of uniformly spaced samples: composite Simpson, with a 3/8 panel when the interval count is odd.
inline double uniform_integral(const std::vector<double>& v, double h) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (v[0] + v[1]);
    std::size_t intervals = n - 1;
    double acc = 0.0;
    std::size_t end = n - 1;
    if (intervals % 2 == 1) {
        if (intervals < 3) return 0.5 * h * (v[0] + 2 * v[1] + v[2]);
        acc += 3.0 * h / 8.0 * (v[n - 4] + 3 * v[n - 3] + 3 * v[n - 2] + v[n - 1]);
        end = n - 4;
    }
    for (std::size_t i = 0; i + 2 <= end; i += 2) acc += h / 3.0 * (v[i] + 4 * v[i + 1] + v[i + 2]);
    return acc;
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) acc += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
    return acc;
}

inline void require_fields(const TrajectoryRecord& traj, const TorusGrid& g) {
    if (traj.fields.empty()) throw CoverageError("trajectory carries no field snapshots");
    for (const auto& f : traj.fields)
        if (f.size() != g.size()) throw ShapeMismatchError("snapshot size does not match grid");
}

}  // namespace detail

inline double I_R(const TrajectoryRecord& traj, const TorusGrid& g, const TestFunctionParams& tp, const ModelParams& mp) {
    detail::require_fields(traj, g);
    const double t_end = std::pow(tp.R, 2.0 * mp.sigma / 3.0);
    if (traj.field_times.back() < t_end * (1 - 1e-9)) throw CoverageError("trajectory does not cover [0, R^{2 sigma/3}]");
    const Field phi = radial_sample(g, [&](double r) { return phi_R(r, mp.n, tp); });
    std::vector<double> ts, vals;
    for (std::size_t k = 0; k < traj.fields.size(); ++k) {
        const double t = traj.field_times[k];
        if (t > t_end * (1 + 1e-12)) break;
        const double z = zeta_R(t, mp.sigma, tp);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += std::pow(std::abs(traj.fields[k][i]), mp.p) * phi[i];
        ts.push_back(t);
        vals.push_back(acc * g.cell_volume() * z);
    }
    return detail::trapezoid(ts, vals);
}

namespace detail {

inline std::vector<Field> powered_fields(const TrajectoryRecord& traj, double p) {
    std::vector<Field> out(traj.fields.size());
    for (std::size_t k = 0; k < traj.fields.size(); ++k) {
        out[k].resize(traj.fields[k].size());
        for (std::size_t i = 0; i < out[k].size(); ++i) out[k][i] = std::pow(std::abs(traj.fields[k][i]), p);
    }
    return out;
}

// int int w(t, x) |u|^p over snapshots with t < t_cut, trapezoid in t.
template <class Weight>
double weighted_power_integral(const TrajectoryRecord& traj, const std::vector<Field>& up, const TorusGrid& g,
                               double t_cut, Weight&& w) {
    std::vector<double> ts, vals;
    for (std::size_t k = 0; k < up.size(); ++k) {
        const double t = traj.field_times[k];
        if (t >= t_cut) break;
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (up[k][i] != 0.0) acc += up[k][i] * w(t, g.x_abs(i));
        ts.push_back(t);
        vals.push_back(acc * g.cell_volume());
    }
    return trapezoid(ts, vals);
}

inline void require_coverage(const TrajectoryRecord& traj, double t_end, const char* what) {
    if (traj.field_times.back() < t_end * (1 - 1e-9)) throw CoverageError(what);
}

}  // namespace detail

// y_p(r) = int int |u|^p [chi*((t + |x|^{2 sigma/3}) / r)]^{(m - 2 sigma) p}.
inline double y_p(double r, const TrajectoryRecord& traj, const TorusGrid& g, const TestFunctionParams& tp,
                  const ModelParams& mp) {
    detail::require_fields(traj, g);
    const auto up = detail::powered_fields(traj, mp.p);
    const double expo = (tp.m - 2.0 * mp.sigma) * mp.p;
    return detail::weighted_power_integral(traj, up, g, r, [&](double t, double x) {
        const double c = smooth_step_star((t + std::pow(x, 2.0 * mp.sigma / 3.0)) / r);
        return c > 0 ? std::pow(c, expo) : 0.0;
    });
}

// Y_p(R) = int_0^R y_p(r) r^{-1} dr on a geometric r-grid from 1e-4 R.
inline double Y_p(double R, const TrajectoryRecord& traj, const TorusGrid& g, const TestFunctionParams& tp,
                  const ModelParams& mp, int points_per_decade = 8) {
    if (!(R > 0)) throw ParameterDomainError("R must be positive");
    detail::require_fields(traj, g);
    detail::require_coverage(traj, R, "trajectory does not cover [0, R]");
    const auto up = detail::powered_fields(traj, mp.p);
    const double expo = (tp.m - 2.0 * mp.sigma) * mp.p;
    const double r0 = R * 1e-4;
    const int count = 4 * points_per_decade + 1;
    std::vector<double> lr(count), v(count);
    for (int i = 0; i < count; ++i) {
        const double r = r0 * std::pow(R / r0, static_cast<double>(i) / (count - 1));
        lr[i] = std::log(r);
        v[i] = detail::weighted_power_integral(traj, up, g, r, [&](double t, double x) {
            const double c = smooth_step_star((t + std::pow(x, 2.0 * mp.sigma / 3.0)) / r);
            return c > 0 ? std::pow(c, expo) : 0.0;
        });
    }
    return detail::trapezoid(lr, v);
}

// int int |u|^p psi_R.
inline double J_R(const TrajectoryRecord& traj, const TorusGrid& g, const TestFunctionParams& tp,
                  const ModelParams& mp) {
    detail::require_fields(traj, g);
    detail::require_coverage(traj, tp.R, "trajectory does not cover [0, R]");
    const auto up = detail::powered_fields(traj, mp.p);
    return detail::weighted_power_integral(traj, up, g, tp.R,
                                           [&](double t, double x) { return psi_R(t, x, mp.sigma, tp); });
}

struct WeakFormReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double nonlinear_term = 0.0;
    double data_term = 0.0;
    double scale = 0.0;
    bool sigma_in_3N = false;
    std::string note;
};

inline bool sigma_in_3N(double sigma) {
    const double k = sigma / 3.0;
    return k >= 1 && std::abs(k - std::round(k)) < 1e-12;
}

// Weak identity with test function psi_R:
//   int int N psi + int [u2 psi - u1 psi_t + u0 psi_tt + eta u1 A^{1/3} psi - eta u0 A^{1/3} psi_t + eta u0 A^{2/3} psi](0)
//     = int int u (-psi_ttt + A psi + eta A^{1/3} psi_tt - eta A^{2/3} psi_t),
// with N = c |u|^p. Fractional powers act on psi spectrally, time derivatives analytically.
inline WeakFormReport weak_form_residual(const TrajectoryRecord& traj, const TorusGrid& g, const TestFunctionParams& tp,
                                         const ModelParams& mp, double nonlinearity = 1.0) {
    detail::require_fields(traj, g);
    const auto& ft = traj.field_times;
    if (ft.size() < 8) throw CoverageError("too few snapshots for the weak identity");
    const double h = ft[1] - ft[0];
    for (std::size_t k = 1; k < ft.size(); ++k)
        if (std::abs(ft[k] - ft[k - 1] - h) > 1e-9 * std::max(1.0, ft[k])) throw CoverageError("snapshots must be uniform");
    if (ft.front() != 0.0) throw CoverageError("snapshots must start at t = 0");
    if (ft.back() < tp.R * (1 - 1e-9)) throw CoverageError("snapshots must cover the support of psi_R");
    if (h > tp.R / 50.0) throw CoverageError("snapshots under-sample psi_R in time");
    const double s = mp.sigma, eta = mp.eta;
    std::vector<Field> xs(g.size());
    std::vector<double> qv, nv;
    Field psi0, psi1, psi2;
    for (std::size_t k = 0; k < ft.size(); ++k) {
        const double t = ft[k];
        if (t > tp.R + 0.5 * h) break;
        Field d0(g.size()), d1(g.size()), d2(g.size()), d3(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto d = psi_R_derivatives(t, g.x_abs(i), s, tp);
            d0[i] = d[0];
            d1[i] = d[1];
            d2[i] = d[2];
            d3[i] = d[3];
        }
        if (k == 0) {
            psi0 = d0;
            psi1 = d1;
            psi2 = d2;
        }
        const Field a0 = apply_fractional(g, d0, s);
        const Field a2 = apply_fractional(g, d2, s / 3.0);
        const Field a1 = apply_fractional(g, d1, 2.0 * s / 3.0);
        const Field& u = traj.fields[k];
        double q = 0.0, nl = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            q += u[i] * (-d3[i] + a0[i] + eta * a2[i] - eta * a1[i]);
            if (nonlinearity != 0.0) nl += nonlinearity * std::pow(std::abs(u[i]), mp.p) * d0[i];
        }
        qv.push_back(q * g.cell_volume());
        nv.push_back(nl * g.cell_volume());
    }
    WeakFormReport rep;
    rep.rhs = detail::uniform_integral(qv, h);
    rep.nonlinear_term = detail::uniform_integral(nv, h);
    const auto& [u0, u1, u2] = traj.data;
    const Field A13psi = apply_fractional(g, psi0, s / 3.0), A13psit = apply_fractional(g, psi1, s / 3.0),
                A23psi = apply_fractional(g, psi0, 2.0 * s / 3.0);
    double bd = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        bd += u2[i] * psi0[i] - u1[i] * psi1[i] + u0[i] * psi2[i] + eta * u1[i] * A13psi[i] - eta * u0[i] * A13psit[i] +
              eta * u0[i] * A23psi[i];
    rep.data_term = bd * g.cell_volume();
    rep.lhs = rep.nonlinear_term + rep.data_term;
    rep.scale = std::max({std::abs(rep.rhs), std::abs(rep.nonlinear_term), std::abs(rep.data_term)});
    rep.residual = rep.scale > 0 ? std::abs(rep.lhs - rep.rhs) / rep.scale : 0.0;
    rep.sigma_in_3N = sigma_in_3N(s);
    if (!rep.sigma_in_3N) rep.note = "sigma outside 3N: outside the critical-case hypotheses";
    return rep;
}

struct FunctionalValues {
    double R = 0.0;
    double K = 1.0;
    double m = 0.0;
    double I_R = 0.0;
    // NaN when the trajectory stops before t = R.
    double Y_p = NAN;
    double J_R = NAN;
    double weak_residual = NAN;
    double data_term = 0.0;
    double rhs_bound = 0.0;
    double chain_constant = NAN;
    bool sigma_in_3N = false;
};

// eps int (eta u0 A^{2/3} phi_R + eta u1 A^{1/3} phi_R + u2 phi_R); traj.data is already eps-scaled.
inline double functional_data_term(const TrajectoryRecord& traj, const TorusGrid& g, const TestFunctionParams& tp,
                                   const ModelParams& mp) {
    const Field phi = radial_sample(g, [&](double r) { return phi_R(r, mp.n, tp); });
    const Field a23 = apply_fractional(g, phi, 2.0 * mp.sigma / 3.0), a13 = apply_fractional(g, phi, mp.sigma / 3.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += mp.eta * traj.data[0][i] * a23[i] + mp.eta * traj.data[1][i] * a13[i] + traj.data[2][i] * phi[i];
    return acc * g.cell_volume();
}

// Measured constant C in data + I_R <= C R^{(3n + 2 sigma)/(3 p') - 2 sigma} I_R^{1/p}.
inline FunctionalValues evaluate_functionals(const TrajectoryRecord& traj, const TorusGrid& g,
                                             const TestFunctionParams& tp, const ModelParams& mp) {
    FunctionalValues fv;
    fv.R = tp.R;
    fv.K = tp.K;
    fv.m = tp.m;
    fv.sigma_in_3N = sigma_in_3N(mp.sigma);
    fv.I_R = I_R(traj, g, tp, mp);
    if (!traj.field_times.empty() && traj.field_times.back() >= tp.R * (1 - 1e-9)) {
        fv.Y_p = Y_p(tp.R, traj, g, tp, mp);
        fv.J_R = J_R(traj, g, tp, mp);
    }
    fv.data_term = functional_data_term(traj, g, tp, mp);
    const double pprime = mp.p / (mp.p - 1.0);
    const double expo = (3.0 * mp.n + 2.0 * mp.sigma) / (3.0 * pprime) - 2.0 * mp.sigma;
    fv.rhs_bound = std::pow(tp.R, expo) * std::pow(fv.I_R, 1.0 / mp.p);
    if (fv.rhs_bound > 0) fv.chain_constant = (fv.data_term + fv.I_R) / fv.rhs_bound;
    return fv;
}

}  // namespace fracthird
