#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracthird/errors.hpp"
#include "fracthird/kernels.hpp"
#include "fracthird/model.hpp"
#include "fracthird/spectral.hpp"

namespace fracthird {

struct StateTriple {
    SpectralField u, ut, utt;
    double t = 0.0;
};

enum class Scheme { DuhamelMidpoint, DuhamelEuler };

inline std::string to_string(Scheme s) { return s == Scheme::DuhamelMidpoint ? "DuhamelMidpoint" : "DuhamelEuler"; }

struct MildSolverConfig {
    double dt = 0.05;
    Scheme scheme = Scheme::DuhamelMidpoint;
    // Multiple of eps * max_j sup|u_j| at which blow-up is declared.
    double blowup_threshold = 1e6;
    bool dealias = true;
    double max_time = 10.0;
    // Coefficient of |u|^p; 0 gives the linear flow.
    double nonlinearity = 1.0;
    // Steps are halved until h <= step_control * sup|u|^{-(p-1)/3}; 0 keeps h = dt.
    double step_control = 0.05;
    int max_halvings = 48;
    double theta = 1e-3;
    double output_ratio = 1.1;
    std::size_t max_snapshots = 400;
    // Physical snapshots of u at multiples of this interval (0 disables).
    double field_interval = 0.0;
    // After a crossing the run continues to this multiple of the threshold; the lifespan estimate obtained there
    // is compared with the primary one.
    double sensitivity_factor = 100.0;
    bool check_resolution = true;

    void validate() const {
        if (!(dt > 0)) throw ParameterDomainError("dt must be positive");
        if (!(blowup_threshold > 1)) throw ParameterDomainError("blow-up threshold must exceed 1");
        if (!(max_time > 0)) throw ParameterDomainError("max_time must be positive");
        if (step_control < 0) throw ParameterDomainError("step_control must be nonnegative");
        if (!(output_ratio > 1)) throw ParameterDomainError("output ratio must exceed 1");
        if (max_snapshots < 2) throw ParameterDomainError("need at least two snapshots");
        if (field_interval < 0) throw ParameterDomainError("field interval must be nonnegative");
        if (sensitivity_factor < 1) throw ParameterDomainError("sensitivity factor must be at least 1");
    }
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> l2_norms;
    std::vector<double> hs_norms;
    std::vector<double> sup_norms;
    std::vector<double> xT_weighted_sup;
    std::vector<double> field_times;
    std::vector<Field> fields;
    // eps-scaled data (u0, u1, u2).
    std::array<Field, 3> data;
    double max_imag_ratio = 0.0;
    std::size_t steps = 0;
};

struct BlowupReport {
    bool blew_up = false;
    // Extrapolated blow-up time from the sup-norm growth law; infinity when no blow-up was detected.
    double lifespan_estimate = INFINITY;
    // First time the sup-norm exceeded the threshold, resolved to a substep of dt / 8.
    double crossing_time = INFINITY;
    double threshold_sensitivity = NAN;
    bool resolution_flag = true;
    double resolution_change = NAN;
    double threshold = INFINITY;
    double final_time = 0.0;
    double final_sup = 0.0;
    std::string label;
};

// Weight of the L^2 and H^{4 sigma/3} parts of the X(T) norm at time t.
inline std::pair<double, double> xT_weights(double t, const ModelParams& mp) {
    const double a = (3.0 * mp.n - 8.0 * mp.sigma) / (4.0 * mp.sigma);
    const double b = 3.0 * mp.n / (4.0 * mp.sigma);
    const bool log_case = mp.eta > 3.0 && std::abs(mp.n - 8.0 * mp.sigma / 3.0) < 1e-12;
    const double w0 = log_case ? 1.0 / std::log(std::exp(1.0) + t) : std::pow(1.0 + t, a);
    return {w0, std::pow(1.0 + t, b)};
}

inline double xT_norm(const TrajectoryRecord& traj, const ModelParams& mp) {
    double m = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto [w0, w1] = xT_weights(traj.times[i], mp);
        m = std::max(m, w0 * traj.l2_norms[i] + w1 * traj.hs_norms[i]);
    }
    return m;
}

// Mode-wise homogeneous propagator and Duhamel weights for one step length.
struct StepOperator {
    double h = 0.0;
    std::vector<Mat3> M;
    std::vector<std::array<double, 3>> W;
};

class MildStepper {
public:
    MildStepper(const TorusGrid& g, const ModelParams& mp, const MildSolverConfig& cfg)
        : g_(g), mp_(mp), cfg_(cfg), kp_{mp.sigma, mp.eta, cfg.theta, 0.0} {
        std::vector<double> ks(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) ks[i] = g.k_abs(i);
        unique_ = ks;
        std::sort(unique_.begin(), unique_.end());
        unique_.erase(std::unique(unique_.begin(), unique_.end()), unique_.end());
        slot_.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            slot_[i] = static_cast<std::size_t>(std::lower_bound(unique_.begin(), unique_.end(), ks[i]) - unique_.begin());
    }

    const TorusGrid& grid() const { return g_; }

    const StepOperator& op(double h) {
        auto it = cache_.find(h);
        if (it != cache_.end()) return *it->second;
        if (cache_.size() > 96) cache_.clear();
        auto so = std::make_shared<StepOperator>();
        so->h = h;
        so->M.resize(unique_.size());
        so->W.resize(unique_.size());
        for (std::size_t j = 0; j < unique_.size(); ++j) {
            so->M[j] = kernel_matrix(h, unique_[j], kp_);
            so->W[j] = duhamel_weights(h, unique_[j], kp_);
        }
        return *cache_.emplace(h, so).first->second;
    }

    // Physical field of a spectrum; tracks the largest imaginary residue relative to the sup-norm.
    Field physical(const SpectralField& s) {
        const SpectralField c = g_.inverse_complex(s);
        Field out(c.size());
        double im = 0.0, sup = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            out[i] = c[i].real();
            im = std::max(im, std::abs(c[i].imag()));
            sup = std::max(sup, std::abs(out[i]));
        }
        if (sup > 0) max_imag_ratio_ = std::max(max_imag_ratio_, im / sup);
        return out;
    }

    SpectralField nonlinearity(const Field& u) const {
        SpectralField out(g_.size());
        if (cfg_.nonlinearity == 0.0) return out;
        Field f(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) f[i] = u[i] == 0.0 ? 0.0 : cfg_.nonlinearity * std::pow(std::abs(u[i]), mp_.p);
        out = g_.forward(f);
        return cfg_.dealias ? dealias(g_, out) : out;
    }

    StateTriple apply(const StateTriple& s, const StepOperator& so, const SpectralField* N) const {
        StateTriple r;
        r.t = s.t + so.h;
        const std::size_t sz = g_.size();
        r.u.resize(sz);
        r.ut.resize(sz);
        r.utt.resize(sz);
        for (std::size_t i = 0; i < sz; ++i) {
            const Mat3& M = so.M[slot_[i]];
            const cplx a = s.u[i], b = s.ut[i], c = s.utt[i];
            r.u[i] = M[0][0] * a + M[0][1] * b + M[0][2] * c;
            r.ut[i] = M[1][0] * a + M[1][1] * b + M[1][2] * c;
            r.utt[i] = M[2][0] * a + M[2][1] * b + M[2][2] * c;
            if (N) {
                const auto& W = so.W[slot_[i]];
                r.u[i] += W[0] * (*N)[i];
                r.ut[i] += W[1] * (*N)[i];
                r.utt[i] += W[2] * (*N)[i];
            }
        }
        return r;
    }

    // One step of length h given the physical u at the current time.
    StateTriple step(const StateTriple& s, const Field& u_phys, double h) {
        const bool nl = cfg_.nonlinearity != 0.0;
        const SpectralField N0 = nl ? nonlinearity(u_phys) : SpectralField{};
        if (!nl) return apply(s, op(h), nullptr);
        if (cfg_.scheme == Scheme::DuhamelEuler) return apply(s, op(h), &N0);
        const StateTriple half = apply(s, op(0.5 * h), &N0);
        const SpectralField Nh = nonlinearity(physical(half.u));
        return apply(s, op(h), &Nh);
    }

    double max_imag_ratio() const { return max_imag_ratio_; }

private:
    const TorusGrid& g_;
    ModelParams mp_;
    MildSolverConfig cfg_;
    KernelParams kp_;
    std::vector<double> unique_;
    std::vector<std::size_t> slot_;
    std::map<double, std::shared_ptr<StepOperator>> cache_;
    double max_imag_ratio_ = 0.0;
};

inline StateTriple duhamel_step(const StateTriple& state, double h, const TorusGrid& g, const ModelParams& mp,
                                const MildSolverConfig& cfg) {
    if (!(h > 0) || h > cfg.dt * (1 + 1e-12)) throw ParameterDomainError("step must lie in (0, dt]");
    MildStepper st(g, mp, cfg);
    return st.step(state, st.physical(state.u), h);
}

inline StateTriple initial_state(const TorusGrid& g, const std::array<Field, 3>& scaled) {
    return {g.forward(scaled[0]), g.forward(scaled[1]), g.forward(scaled[2]), 0.0};
}

namespace detail {

inline double sup_abs(const Field& f) {
    double m = 0.0;
    for (double v : f) {
        if (!std::isfinite(v)) return INFINITY;
        m = std::max(m, std::abs(v));
    }
    return m;
}

inline bool finite_state(const StateTriple& s) {
    for (const auto* f : {&s.u, &s.ut, &s.utt})
        for (const auto& c : *f)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

inline std::vector<double> output_schedule(const MildSolverConfig& cfg) {
    std::vector<double> out{0.0};
    const double t0 = std::min(cfg.dt, cfg.max_time);
    double ratio = cfg.output_ratio;
    const double span = std::log(cfg.max_time / t0);
    if (span > 0 && span / std::log(ratio) + 2 > static_cast<double>(cfg.max_snapshots))
        ratio = std::exp(span / static_cast<double>(cfg.max_snapshots - 2));
    for (double t = t0; t < cfg.max_time * (1 - 1e-12); t *= ratio) out.push_back(t);
    out.push_back(cfg.max_time);
    return out;
}

// Blow-up time from a straight-line fit of sup^{-(p-1)/3} against t over samples with sup in [lo, hi].
inline double extrapolate_blowup(const std::vector<std::pair<double, double>>& samples, double p, double lo, double hi) {
    std::vector<double> ts, qs;
    for (const auto& [t, s] : samples)
        if (s >= lo && s <= hi) {
            ts.push_back(t);
            qs.push_back(std::pow(s, -(p - 1.0) / 3.0));
        }
    if (ts.size() < 5) return NAN;
    Eigen::MatrixXd A(ts.size(), 2);
    Eigen::VectorXd b(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        A(i, 0) = ts[i];
        A(i, 1) = 1.0;
        b(i) = qs[i];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    if (!(c(0) < 0)) return NAN;
    return -c(1) / c(0);
}

}  // namespace detail

inline std::pair<TrajectoryRecord, BlowupReport> integrate(const ModelParams& mp, const TorusGrid& g,
                                                           const std::array<Field, 3>& data,
                                                           const MildSolverConfig& cfg) {
    mp.validate(true);
    cfg.validate();
    if (static_cast<int>(mp.n) != g.dim()) throw ShapeMismatchError("grid dimension does not match n");
    for (const auto& f : data)
        if (f.size() != g.size()) throw ShapeMismatchError("data size does not match grid");

    TrajectoryRecord rec;
    BlowupReport rep;
    if (mp.p < 2.0) rep.label = "outside lifespan-theorem hypotheses (p < 2)";
    double ref = 0.0;
    for (int j = 0; j < 3; ++j) {
        rec.data[j] = data[j];
        for (auto& v : rec.data[j]) v *= mp.epsilon;
        ref = std::max(ref, detail::sup_abs(rec.data[j]));
    }
    const double threshold = ref > 0 ? cfg.blowup_threshold * ref : INFINITY;
    const double stop_level = threshold * cfg.sensitivity_factor;
    rep.threshold = threshold;

    MildStepper st(g, mp, cfg);
    StateTriple s = initial_state(g, rec.data);
    Field u = st.physical(s.u);
    double sup = detail::sup_abs(u);

    const std::vector<double> schedule = detail::output_schedule(cfg);
    std::size_t next_out = 0;
    std::size_t field_index = 0;
    double next_field = 0.0;
    double xT = 0.0;
    auto record = [&]() {
        rec.times.push_back(s.t);
        rec.l2_norms.push_back(sobolev_norm(g, s.u, 0.0));
        rec.hs_norms.push_back(sobolev_norm(g, s.u, 4.0 * mp.sigma / 3.0));
        rec.sup_norms.push_back(sup);
        const auto [w0, w1] = xT_weights(s.t, mp);
        xT = std::max(xT, w0 * rec.l2_norms.back() + w1 * rec.hs_norms.back());
        rec.xT_weighted_sup.push_back(xT);
    };
    auto maybe_record = [&]() {
        const double tol = 1e-9 * std::max(1.0, s.t);
        while (next_out < schedule.size() && schedule[next_out] <= s.t + tol) {
            if (std::abs(schedule[next_out] - s.t) <= tol) record();
            ++next_out;
        }
        if (cfg.field_interval > 0) {
            while (next_field <= s.t + tol) {
                if (std::abs(next_field - s.t) <= tol) {
                    rec.field_times.push_back(s.t);
                    rec.fields.push_back(u);
                }
                next_field = static_cast<double>(++field_index) * cfg.field_interval;
            }
        }
    };
    maybe_record();

    std::vector<std::pair<double, double>> growth;
    const double growth_floor = threshold / 100.0;
    bool crossed = false;
    while (true) {
        if (!crossed && s.t >= cfg.max_time * (1 - 1e-12)) break;
        if (crossed && sup >= stop_level) break;
        double h = cfg.dt;
        int level = 0;
        if (cfg.step_control > 0 && sup > 0 && cfg.nonlinearity != 0.0) {
            const double hmax = cfg.step_control * std::pow(sup, -(mp.p - 1.0) / 3.0);
            while (h > hmax && level < cfg.max_halvings) {
                h *= 0.5;
                ++level;
            }
            if (h > hmax) {
                // Step size exhausted: treat as the blow-up signal.
                if (!crossed) {
                    crossed = true;
                    rep.crossing_time = s.t;
                }
                break;
            }
        }
        if (!crossed) {
            // Land exactly on output and snapshot times.
            double target = next_out < schedule.size() ? schedule[next_out] : cfg.max_time;
            if (cfg.field_interval > 0) target = std::min(target, next_field);
            if (target - s.t < h && target > s.t) h = target - s.t;
        }
        StateTriple ns = st.step(s, u, h);
        Field nu = st.physical(ns.u);
        double nsup = detail::sup_abs(nu);
        if (!detail::finite_state(ns) || !std::isfinite(nsup)) {
            ns = st.step(s, u, 0.5 * h);
            nu = st.physical(ns.u);
            nsup = detail::sup_abs(nu);
            if (!detail::finite_state(ns) || !std::isfinite(nsup)) {
                if (!crossed) rep.crossing_time = s.t;
                crossed = true;
                break;
            }
        }
        if (!crossed && nsup >= threshold) {
            // Localize the crossing with eight substeps.
            StateTriple ss = s;
            Field su = u;
            double ssup = sup;
            for (int k = 0; k < 8; ++k) {
                ss = st.step(ss, su, h / 8.0);
                su = st.physical(ss.u);
                ssup = detail::sup_abs(su);
                growth.emplace_back(ss.t, ssup);
                if (ssup >= threshold && !crossed) {
                    crossed = true;
                    rep.crossing_time = ss.t;
                }
            }
            ns = std::move(ss);
            nu = std::move(su);
            nsup = ssup;
            if (!crossed) {
                crossed = true;
                rep.crossing_time = ns.t;
            }
        } else if (nsup >= growth_floor) {
            growth.emplace_back(ns.t, nsup);
        }
        s = std::move(ns);
        u = std::move(nu);
        sup = nsup;
        ++rec.steps;
        if (!crossed) maybe_record();
        if (crossed && cfg.sensitivity_factor <= 1) break;
    }
    rep.blew_up = crossed;
    rep.final_time = s.t;
    rep.final_sup = sup;
    rec.max_imag_ratio = st.max_imag_ratio();
    if (crossed) {
        const double est = detail::extrapolate_blowup(growth, mp.p, threshold / 100.0, threshold);
        rep.lifespan_estimate = std::isfinite(est) ? std::max(est, rep.crossing_time) : rep.crossing_time;
        if (cfg.sensitivity_factor > 1) {
            const double est2 = detail::extrapolate_blowup(growth, mp.p, stop_level / 100.0, stop_level);
            if (std::isfinite(est2))
                rep.threshold_sensitivity = std::abs(est2 - rep.lifespan_estimate) / rep.lifespan_estimate;
        }
    }
    if (cfg.check_resolution) {
        MildSolverConfig fine = cfg;
        fine.dt *= 0.5;
        fine.step_control *= 0.5;
        fine.check_resolution = false;
        fine.field_interval = 0.0;
        const auto [frec, frep] = integrate(mp, g, data, fine);
        if (rep.blew_up != frep.blew_up) {
            rep.resolution_flag = false;
            rep.resolution_change = INFINITY;
        } else if (rep.blew_up) {
            rep.resolution_change = std::abs(frep.lifespan_estimate - rep.lifespan_estimate) / rep.lifespan_estimate;
            rep.resolution_flag = rep.resolution_change <= 0.05;
        } else {
            rep.resolution_change = 0.0;
        }
    }
    return {std::move(rec), std::move(rep)};
}

}  // namespace fracthird
