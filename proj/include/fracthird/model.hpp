#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <boost/rational.hpp>

#include "fracthird/errors.hpp"

namespace fracthird {

using Rational = boost::rational<std::int64_t>;

// Extended positive reals: a finite value or +infinity.
struct Unbounded {
    bool operator==(const Unbounded&) const = default;
};

template <class T>
using Extended = std::variant<T, Unbounded>;

template <class T>
bool is_unbounded(const Extended<T>& x) {
    return std::holds_alternative<Unbounded>(x);
}

template <class T>
T finite_value(const Extended<T>& x) {
    if (is_unbounded(x)) throw RegimeError("value is unbounded");
    return std::get<T>(x);
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) {
    return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

template <class T>
double to_double(const Extended<T>& x) {
    return is_unbounded(x) ? INFINITY : to_double(std::get<T>(x));
}

struct ModelParams {
    double n = 1.0;
    double sigma = 1.0;
    double eta = 2.0;
    double p = 2.0;
    double epsilon = 1.0;

    void validate(bool torus_mode = false) const {
        if (!(n > 0)) throw ParameterDomainError("n must be positive");
        if (!(sigma > 0)) throw ParameterDomainError("sigma must be positive");
        if (!(eta > 0)) throw ParameterDomainError("eta must be positive");
        if (!(p > 1)) throw ParameterDomainError("p must exceed 1");
        if (!(epsilon > 0)) throw ParameterDomainError("epsilon must be positive");
        if (torus_mode && n != 1.0 && n != 2.0)
            throw ParameterDomainError("torus mode requires n in {1, 2}");
    }
};

enum class Stability { IllPosedSobolev, MarginallyStable, GevreySmoothing };
enum class ProfileRegime { DiffusionWaves, DegenerateDiffusion, PureDiffusion };

inline std::string to_string(Stability s) {
    switch (s) {
        case Stability::IllPosedSobolev: return "IllPosedSobolev";
        case Stability::MarginallyStable: return "MarginallyStable";
        case Stability::GevreySmoothing: return "GevreySmoothing";
    }
    return "?";
}

inline std::string to_string(ProfileRegime p) {
    switch (p) {
        case ProfileRegime::DiffusionWaves: return "DiffusionWaves";
        case ProfileRegime::DegenerateDiffusion: return "DegenerateDiffusion";
        case ProfileRegime::PureDiffusion: return "PureDiffusion";
    }
    return "?";
}

struct WindowCheck {
    bool ok = false;
    std::string reason;
};

struct RegimeInfo {
    Stability stability;
    ProfileRegime profile;
    std::optional<WindowCheck> dimension_window;
};

namespace detail {

// Three-way comparison with an optional snapping tolerance.
template <class T>
int compare(const T& a, const T& b, double tol) {
    if (tol > 0 && std::abs(to_double(a) - to_double(b)) <= tol) return 0;
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

template <class T>
T positive_or_throw(const T& x, const char* name) {
    if (!(x > T(0))) throw ParameterDomainError(std::string(name) + " must be positive");
    return x;
}

}  // namespace detail

template <class T>
WindowCheck dimension_window_check(const T& n, const T& sigma, const T& eta, double tol = 0.0) {
    detail::positive_or_throw(n, "n");
    detail::positive_or_throw(sigma, "sigma");
    detail::positive_or_throw(eta, "eta");
    const T lower = T(4) * sigma / T(3);
    const T excluded = T(8) * sigma / T(3);
    const int c1 = detail::compare(eta, T(1), tol);
    const int c3 = detail::compare(eta, T(3), tol);
    if (c1 <= 0) return {false, "eta <= 1 has no decay window"};
    if (c3 == 0) return {true, "eta = 3 admits every n > 0"};
    if (!(n > lower) || detail::compare(n, lower, tol) == 0)
        return {false, "n > 4 sigma / 3 violated"};
    if (c3 > 0 && detail::compare(n, excluded, tol) == 0) return {false, "n = 8 sigma / 3 excluded"};
    return {true, "ok"};
}

inline RegimeInfo classify_eta(double eta, double tol = 0.0) {
    if (!(eta > 0)) throw ParameterDomainError("eta must be positive");
    RegimeInfo info{};
    const int c1 = detail::compare(eta, 1.0, tol);
    const int c3 = detail::compare(eta, 3.0, tol);
    info.stability = c1 < 0 ? Stability::IllPosedSobolev
                     : c1 == 0 ? Stability::MarginallyStable
                               : Stability::GevreySmoothing;
    info.profile = c3 < 0 ? ProfileRegime::DiffusionWaves
                   : c3 == 0 ? ProfileRegime::DegenerateDiffusion
                             : ProfileRegime::PureDiffusion;
    return info;
}

inline RegimeInfo classify(double n, double sigma, double eta, double tol = 0.0) {
    RegimeInfo info = classify_eta(eta, tol);
    info.dimension_window = dimension_window_check(n, sigma, eta, tol);
    return info;
}

// 1 + 6 sigma / (3n - 4 sigma)_+ with 1/(x)_+ = infinity for x <= 0.
template <class T>
Extended<T> critical_exponent(const T& n, const T& sigma) {
    detail::positive_or_throw(n, "n");
    detail::positive_or_throw(sigma, "sigma");
    const T d = T(3) * n - T(4) * sigma;
    if (!(d > T(0))) return Unbounded{};
    return T(1) + T(6) * sigma / d;
}

template <class T>
T lifespan_exponent(const T& n, const T& sigma, const T& p) {
    if (!(p > T(1))) throw ParameterDomainError("p must exceed 1");
    const Extended<T> pc = critical_exponent(n, sigma);
    if (!is_unbounded(pc) && !(p < std::get<T>(pc)))
        throw RegimeError("p >= p_crit: lifespan is infinite or exponential, not a power law");
    const T pprime = p / (p - T(1));
    const T den = T(6) * sigma * pprime - (T(3) * n + T(2) * sigma);
    if (den == T(0)) throw RegimeError("6 sigma p' = 3n + 2 sigma");
    return -T(2) * sigma / den;
}

template <class T>
struct ExponentTable {
    Extended<T> p_crit;
    std::optional<T> lifespan_exp_subcrit;
    T l2_rate;
    T hs_rate;
    T refined_gain;
    bool log_loss_flag = false;
};

template <class T>
ExponentTable<T> decay_rates(const T& n, const T& sigma, const T& eta, std::optional<T> p = std::nullopt,
                             double tol = 0.0) {
    const WindowCheck w = dimension_window_check(n, sigma, eta, tol);
    const bool log_case = detail::compare(eta, T(3), tol) > 0 &&
                          detail::compare(n, T(8) * sigma / T(3), tol) == 0;
    if (!w.ok && !log_case) throw RegimeError("dimension window violated: " + w.reason);
    ExponentTable<T> tab{critical_exponent(n, sigma), std::nullopt,
                         (T(3) * n - T(8) * sigma) / (T(4) * sigma), T(3) * n / (T(4) * sigma), T(1),
                         log_case};
    if (p) {
        try {
            tab.lifespan_exp_subcrit = lifespan_exponent(n, sigma, *p);
        } catch (const RegimeError&) {
        }
    }
    return tab;
}

template <class T>
struct PInterval {
    T lower;
    Extended<T> upper;
};

// [2, 3n / (3n - 8 sigma)_+], defined for 1 <= n <= 16 sigma / 3.
template <class T>
PInterval<T> gn_admissible_p(const T& n, const T& sigma) {
    detail::positive_or_throw(sigma, "sigma");
    if (n < T(1) || n > T(16) * sigma / T(3))
        throw ParameterDomainError("requires 1 <= n <= 16 sigma / 3");
    const T d = T(3) * n - T(8) * sigma;
    if (!(d > T(0))) return {T(2), Unbounded{}};
    const T upper = T(3) * n / d;
    if (upper < T(2)) throw RegimeError("admissible p interval is empty");
    return {T(2), upper};
}

struct ExistenceWindow {
    bool verified = false;
    std::string label;
};

// Window in which small-data global existence is established for p_crit < p <= 3n/(3n-8 sigma)_+.
inline ExistenceWindow global_existence_window(double n, double sigma, double eta, double p) {
    const bool dims = n > 4.0 * sigma / 3.0 && n <= 10.0 * sigma / 3.0;
    const bool damp = eta > 1.0;
    const double pc = to_double(critical_exponent(n, sigma));
    const double pu = 3.0 * n - 8.0 * sigma > 0 ? 3.0 * n / (3.0 * n - 8.0 * sigma) : INFINITY;
    const bool pok = p > pc && p <= pu;
    if (dims && damp && pok) return {true, "global existence window"};
    return {false, "unverified regime"};
}

}  // namespace fracthird
