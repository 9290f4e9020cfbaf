#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace fracthird::divdiff {

using cplx = std::complex<double>;

// Spread below which divided differences of exp are summed as a shifted Taylor series.
inline constexpr double taylor_spread = 0.5;
inline constexpr double taylor_rel_cutoff = 1e-18;

// (e^z - 1) / z, accurate for small |z|.
inline cplx phi1(cplx z) {
    if (std::abs(z) < 0.25) {
        cplx term = 1.0, sum = 1.0;
        for (int k = 2; k < 30; ++k) {
            term *= z / static_cast<double>(k);
            sum += term;
            if (std::abs(term) < taylor_rel_cutoff * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

// exp[x_0, ..., x_{m-1}] via the shifted Taylor series sum_k h_k(mu) / (k + m - 1)!.
template <std::size_t M>
cplx taylor_exp_dd(const std::array<cplx, M>& x, std::size_t m) {
    cplx c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c += x[i];
    c /= static_cast<double>(m);
    std::array<cplx, M> mu{};
    for (std::size_t i = 0; i < m; ++i) mu[i] = x[i] - c;
    // h[j] holds the complete homogeneous polynomial of degree k in the first j+1 variables.
    std::array<cplx, M> h{};
    h.fill(1.0);
    double fact = 1.0;
    for (std::size_t j = 2; j < m; ++j) fact *= static_cast<double>(j);
    double rho = 0.0;
    for (std::size_t i = 0; i < m; ++i) rho = std::max(rho, std::abs(mu[i]));
    cplx sum = 1.0 / fact;
    // |h_k| <= C(k + m - 1, m - 1) rho^k, so the k-th term is bounded by rho^k / (k! (m - 1)!). Individual terms can
    // vanish by symmetry of the nodes, so only this majorant decides termination.
    double bound = 1.0 / fact;
    for (int k = 1; k < 200; ++k) {
        h[0] = h[0] * mu[0];
        for (std::size_t j = 1; j < m; ++j) h[j] = h[j - 1] + mu[j] * h[j];
        fact *= static_cast<double>(k + static_cast<int>(m) - 1);
        sum += h[m - 1] / fact;
        bound *= rho / k;
        if (bound <= taylor_rel_cutoff * std::abs(sum)) break;
    }
    return std::exp(c) * sum;
}

// Divided difference of exp over up to four complex nodes (order of nodes irrelevant).
template <std::size_t M>
cplx exp_dd(std::array<cplx, M> x, std::size_t m) {
    if (m == 1) return std::exp(x[0]);
    if (m == 2) {
        if (x[1].real() > x[0].real()) std::swap(x[0], x[1]);
        return std::exp(x[0]) * phi1(x[1] - x[0]);
    }
    std::size_t ia = 0, ib = 1;
    double spread = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (std::abs(x[i] - x[j]) > spread) {
                spread = std::abs(x[i] - x[j]);
                ia = i;
                ib = j;
            }
    if (spread < taylor_spread) return taylor_exp_dd(x, m);
    std::array<cplx, M> without_a{}, without_b{};
    std::size_t pa = 0, pb = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i != ia) without_a[pa++] = x[i];
        if (i != ib) without_b[pb++] = x[i];
    }
    return (exp_dd(without_a, m - 1) - exp_dd(without_b, m - 1)) / (x[ib] - x[ia]);
}

// Divided differences of s -> exp(s t) at the given nodes, returned for t-scaling: nodes are lambda_i,
// result is exp_t[lambda_0..lambda_{m-1}] = t^{m-1} exp[lambda_0 t, ..., lambda_{m-1} t].
template <std::size_t M>
cplx exp_t_dd(const std::array<cplx, M>& lambda, std::size_t m, double t) {
    std::array<cplx, M> x{};
    for (std::size_t i = 0; i < m; ++i) x[i] = lambda[i] * t;
    return std::pow(t, static_cast<double>(m - 1)) * exp_dd(x, m);
}

// Direct partial-fraction form sum_j f(x_j) / prod_{k != j} (x_j - x_k).
template <std::size_t M, class F>
cplx partial_fraction(const std::array<cplx, M>& x, std::size_t m, F&& f) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        cplx den = 1.0;
        for (std::size_t k = 0; k < m; ++k)
            if (k != j) den *= x[j] - x[k];
        sum += f(x[j]) / den;
    }
    return sum;
}

}  // namespace fracthird::divdiff
