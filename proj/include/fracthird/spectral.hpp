#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <type_traits>
#include <vector>

#include <fftw3.h>

#include "fracthird/errors.hpp"

namespace fracthird {

using cplx = std::complex<double>;
using Field = std::vector<double>;
using SpectralField = std::vector<cplx>;

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlan {
    fftw_plan plan = nullptr;
    explicit FftwPlan(fftw_plan p) : plan(p) {}
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    ~FftwPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (plan) fftw_destroy_plan(plan);
    }
};

}  // namespace detail

// Periodic grid [-L/2, L/2)^n with N modes per axis, n in {1, 2}.
// forward: c(k) = sum_x f(x) exp(-i k.x); inverse carries the 1/N^n normalization.
class TorusGrid {
public:
    TorusGrid(int n, double L, int N) : n_(n), L_(L), N_(N) {
        if (n != 1 && n != 2) throw ParameterDomainError("torus dimension must be 1 or 2");
        if (!(L > 0)) throw ParameterDomainError("torus length must be positive");
        if (N <= 0 || N % 2 != 0) throw ParameterDomainError("modes per axis must be even and positive");
        total_ = n == 1 ? static_cast<std::size_t>(N) : static_cast<std::size_t>(N) * N;
        SpectralField a(total_), b(total_);
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* pb = reinterpret_cast<fftw_complex*>(b.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        if (n == 1) {
            fwd_ = std::make_shared<detail::FftwPlan>(fftw_plan_dft_1d(N, pa, pb, FFTW_FORWARD, flags));
            inv_ = std::make_shared<detail::FftwPlan>(fftw_plan_dft_1d(N, pa, pb, FFTW_BACKWARD, flags));
        } else {
            fwd_ = std::make_shared<detail::FftwPlan>(fftw_plan_dft_2d(N, N, pa, pb, FFTW_FORWARD, flags));
            inv_ = std::make_shared<detail::FftwPlan>(fftw_plan_dft_2d(N, N, pa, pb, FFTW_BACKWARD, flags));
        }
    }

    int dim() const { return n_; }
    double length() const { return L_; }
    int modes() const { return N_; }
    std::size_t size() const { return total_; }
    double dx() const { return L_ / N_; }
    double cell_volume() const { return std::pow(dx(), n_); }
    double volume() const { return std::pow(L_, n_); }

    // Integer lattice index m in [-N/2, N/2-1] for FFT-ordered position j.
    int lattice(int j) const { return j < N_ / 2 ? j : j - N_; }
    double wavenumber(int j) const { return 2.0 * std::numbers::pi * lattice(j) / L_; }
    double coordinate(int j) const { return -0.5 * L_ + j * dx(); }

    std::array<int, 2> axes(std::size_t idx) const {
        if (n_ == 1) return {static_cast<int>(idx), 0};
        return {static_cast<int>(idx / N_), static_cast<int>(idx % N_)};
    }

    double k_abs(std::size_t idx) const {
        const auto a = axes(idx);
        if (n_ == 1) return std::abs(wavenumber(a[0]));
        return std::hypot(wavenumber(a[0]), wavenumber(a[1]));
    }

    double x_abs(std::size_t idx) const {
        const auto a = axes(idx);
        if (n_ == 1) return std::abs(coordinate(a[0]));
        return std::hypot(coordinate(a[0]), coordinate(a[1]));
    }

    bool is_nyquist(std::size_t idx) const {
        const auto a = axes(idx);
        if (lattice(a[0]) == -N_ / 2) return true;
        return n_ == 2 && lattice(a[1]) == -N_ / 2;
    }

    template <class F>
    Field sample(F&& f) const {
        Field out(total_);
        for (std::size_t i = 0; i < total_; ++i) {
            const auto a = axes(i);
            if constexpr (std::is_invocable_v<F, double, double>) {
                if (n_ != 2) throw ShapeMismatchError("two-argument sampler on a 1D grid");
                out[i] = f(coordinate(a[0]), coordinate(a[1]));
            } else {
                if (n_ != 1) throw ShapeMismatchError("one-argument sampler on a 2D grid");
                out[i] = f(coordinate(a[0]));
            }
        }
        return out;
    }

    SpectralField forward(const Field& f) const {
        check(f.size());
        SpectralField in(f.begin(), f.end()), out(total_);
        execute(fwd_->plan, in, out);
        return out;
    }

    SpectralField forward_complex(const SpectralField& f) const {
        check(f.size());
        SpectralField in(f), out(total_);
        execute(fwd_->plan, in, out);
        return out;
    }

    SpectralField inverse_complex(const SpectralField& s) const {
        check(s.size());
        SpectralField in(s), out(total_);
        execute(inv_->plan, in, out);
        const double scale = 1.0 / static_cast<double>(total_);
        for (auto& v : out) v *= scale;
        return out;
    }

    Field inverse(const SpectralField& s) const {
        const SpectralField c = inverse_complex(s);
        Field out(total_);
        for (std::size_t i = 0; i < total_; ++i) out[i] = c[i].real();
        return out;
    }

private:
    void check(std::size_t sz) const {
        if (sz != total_) throw ShapeMismatchError("field size does not match grid");
    }
    static void execute(fftw_plan p, SpectralField& in, SpectralField& out) {
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    }

    int n_;
    double L_;
    int N_;
    std::size_t total_;
    std::shared_ptr<detail::FftwPlan> fwd_, inv_;
};

// Multiplies each coefficient by |k|^{2 order}; the k = 0 coefficient is annihilated for order > 0.
inline SpectralField fractional_laplacian(const TorusGrid& g, const SpectralField& s, double order) {
    if (order < 0) throw ParameterDomainError("fractional order must be nonnegative");
    if (s.size() != g.size()) throw ShapeMismatchError("spectrum size does not match grid");
    SpectralField out(s);
    if (order == 0) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double k = g.k_abs(i);
        out[i] *= k == 0 ? 0.0 : std::pow(k, 2.0 * order);
    }
    return out;
}

// Zeroes coefficients with any |m_j| > rule * N / 2.
inline SpectralField dealias(const TorusGrid& g, const SpectralField& s, double rule = 2.0 / 3.0) {
    if (!(rule > 0 && rule <= 1)) throw ParameterDomainError("dealias rule must lie in (0, 1]");
    if (s.size() != g.size()) throw ShapeMismatchError("spectrum size does not match grid");
    SpectralField out(s);
    const double cut = rule * g.modes() / 2.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto a = g.axes(i);
        bool drop = std::abs(g.lattice(a[0])) > cut;
        if (g.dim() == 2) drop = drop || std::abs(g.lattice(a[1])) > cut;
        if (drop) out[i] = 0.0;
    }
    return out;
}

// Homogeneous Sobolev norm with the Parseval normalization of the grid L^2 norm.
inline double sobolev_norm(const TorusGrid& g, const SpectralField& s, double sdeg) {
    if (sdeg < 0) throw ParameterDomainError("Sobolev order must be nonnegative");
    if (s.size() != g.size()) throw ShapeMismatchError("spectrum size does not match grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double k = g.k_abs(i);
        const double w = sdeg == 0 ? 1.0 : (k == 0 ? 0.0 : std::pow(k, 2.0 * sdeg));
        acc += w * std::norm(s[i]);
    }
    const double tot = static_cast<double>(g.size());
    return std::sqrt(acc * g.cell_volume() / tot);
}

inline double lp_norm(const TorusGrid& g, const Field& f, double q) {
    if (f.size() != g.size()) throw ShapeMismatchError("field size does not match grid");
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : f) m = std::max(m, std::abs(v));
        return m;
    }
    if (q == 1.0) {
        double acc = 0.0;
        for (double v : f) acc += std::abs(v);
        return acc * g.cell_volume();
    }
    if (q == 2.0) {
        double acc = 0.0;
        for (double v : f) acc += v * v;
        return std::sqrt(acc * g.cell_volume());
    }
    throw ParameterDomainError("lp_norm supports q in {1, 2, inf}");
}

// Integral of a field over the torus (rectangle rule, spectrally accurate for smooth periodic data).
inline double integrate_field(const TorusGrid& g, const Field& f) {
    double acc = 0.0;
    for (double v : f) acc += v;
    return acc * g.cell_volume();
}

}  // namespace fracthird
