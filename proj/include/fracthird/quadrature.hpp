#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fracthird/errors.hpp"

namespace fracthird {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

struct RadialQuadOptions {
    double rel_tol = 1e-11;
    unsigned max_depth = 18;
    double accept_rel = 1e-6;
};

// Surface area of the unit sphere in R^n, continued to real n.
inline double sphere_area(double n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

namespace detail {

// Bisects [a, b] until the Kronrod-Gauss difference falls below its share of the absolute tolerance.
template <class G>
void gk_refine(G& g, double a, double b, double abs_tol, unsigned depth, QuadResult& out) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0, l1 = 0.0;
    const double v = GK::integrate(g, a, b, 0, 0.0, &err, &l1);
    // The reported error refers to the reference interval [-1, 1].
    err *= 0.5 * (b - a);
    if (err <= abs_tol || depth == 0) {
        out.value += v;
        out.error += err;
        out.l1 += l1;
        return;
    }
    const double m = 0.5 * (a + b);
    gk_refine(g, a, m, 0.5 * abs_tol, depth - 1, out);
    gk_refine(g, m, b, 0.5 * abs_tol, depth - 1, out);
}

}  // namespace detail

// int_0^{r_hi} f(r) dr evaluated in the graded variable w = r^{2 sigma / 3}.
// Panels are geometric in w towards 0 down to a scale tied to 1 / (1 + t); the innermost panel uses tanh-sinh.
template <class F>
QuadResult radial_integrate(F&& f, double sigma, double r_hi, double t, const RadialQuadOptions& opt = {}) {
    QuadResult res;
    if (!(r_hi > 0)) return res;
    const double beta = 3.0 / (2.0 * sigma);
    const double w_hi = std::pow(r_hi, 1.0 / beta);
    auto g = [&](double w) {
        if (w <= 0) return 0.0;
        const double r = std::pow(w, beta);
        if (r == 0.0) return 0.0;
        return f(r) * beta * r / w;
    };
    const double w_lo = std::min(w_hi, 1.0) * 1e-5 / (1.0 + t);
    std::vector<double> breaks{w_hi};
    while (breaks.back() > w_lo) breaks.push_back(breaks.back() * 0.5);
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    // A coarse pass fixes the overall scale; each panel is then refined against an absolute share of it.
    const std::size_t panels = breaks.size() - 1;
    double scale = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        double err = 0.0, l1 = 0.0;
        GK::integrate(g, breaks[i + 1], breaks[i], 0, 0.0, &err, &l1);
        scale += l1;
    }
    for (std::size_t i = 0; i < panels; ++i)
        detail::gk_refine(g, breaks[i + 1], breaks[i], opt.rel_tol * scale / static_cast<double>(panels),
                          opt.max_depth, res);
    {
        boost::math::quadrature::tanh_sinh<double> ts;
        double err = 0.0, l1 = 0.0;
        const double v = ts.integrate(g, 0.0, breaks.back(), opt.rel_tol, &err, &l1);
        res.value += v;
        res.error += err;
        res.l1 += l1;
    }
    if (res.l1 > 0 && res.error > opt.accept_rel * res.l1)
        throw AccuracyError("radial quadrature did not converge", res.error / res.l1);
    return res;
}

}  // namespace fracthird
