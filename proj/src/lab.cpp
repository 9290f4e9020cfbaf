#include "fracthird/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "fracthird/errors.hpp"
#include "fracthird/estimates.hpp"
#include "fracthird/functionals.hpp"
#include "fracthird/kernels.hpp"
#include "fracthird/parallel.hpp"
#include "fracthird/propagator.hpp"

namespace fracthird::lab {

json CheckResult::to_json() const {
    return {{"name", name}, {"pass", pass}, {"measured", measured}, {"target", target}, {"detail", detail}};
}

bool all_pass(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

const std::map<std::string, ExperimentKind>& kind_names() {
    static const std::map<std::string, ExperimentKind> m{
        {"kernel-table", ExperimentKind::KernelTable},       {"stability-scan", ExperimentKind::StabilityScan},
        {"decay-study", ExperimentKind::DecayStudy},         {"verify-lemmas", ExperimentKind::LemmaVerify},
        {"nonlinear-run", ExperimentKind::NonlinearRun},     {"lifespan-sweep", ExperimentKind::LifespanSweep},
        {"functional-check", ExperimentKind::FunctionalCheck}};
    return m;
}

// "a <= b" that fails on NaN.
bool below(double a, double b) { return a <= b; }

CheckResult check_below(std::string name, double measured, double limit, std::string detail = {}) {
    return {std::move(name), below(measured, limit), measured, limit, std::move(detail)};
}

CheckResult check_within(std::string name, double measured, double target, double tol, std::string detail = {}) {
    return {std::move(name), below(std::abs(measured - target), tol), measured, target, std::move(detail)};
}

template <class T>
T get_or_throw(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

TorusDataSpec parse_data(const json& j, const std::string& where) {
    require_keys(j, {"kind", "width", "amplitude"}, where);
    TorusDataSpec d;
    if (j.contains("kind")) d.kind = get_or_throw<std::string>(j, "kind");
    if (j.contains("width")) d.width = get_or_throw<double>(j, "width");
    if (j.contains("amplitude")) d.amplitude = get_or_throw<double>(j, "amplitude");
    if (d.kind != "zero" && d.kind != "gaussian" && d.kind != "mean_zero" && d.kind != "constant")
        throw ConfigError("unknown data kind '" + d.kind + "' in " + where);
    if (!(d.width > 0)) throw ConfigError("data width must be positive in " + where);
    return d;
}

Scheme parse_scheme(const std::string& s) {
    if (s == "DuhamelMidpoint") return Scheme::DuhamelMidpoint;
    if (s == "DuhamelEuler") return Scheme::DuhamelEuler;
    throw ConfigError("unknown scheme '" + s + "'");
}

json model_json(const ModelParams& m) {
    return {{"n", m.n}, {"sigma", m.sigma}, {"eta", m.eta}, {"p", m.p}, {"epsilon", m.epsilon}};
}

// Theoretical values from the model formulas, embedded in every report.
json theory_json(const ModelParams& m) {
    json t;
    t["p_crit"] = to_double(critical_exponent(m.n, m.sigma));
    try {
        t["lifespan_exponent"] = lifespan_exponent(m.n, m.sigma, m.p);
    } catch (const std::exception&) {
        t["lifespan_exponent"] = nullptr;
    }
    const RegimeInfo info = classify(m.n, m.sigma, m.eta);
    t["stability"] = to_string(info.stability);
    t["profile"] = to_string(info.profile);
    t["dimension_window"] = info.dimension_window->ok;
    t["dimension_window_reason"] = info.dimension_window->reason;
    try {
        const auto tab = decay_rates(m.n, m.sigma, m.eta);
        t["l2_rate"] = tab.l2_rate;
        t["hs_rate"] = tab.hs_rate;
        t["refined_gain"] = tab.refined_gain;
        t["log_loss"] = tab.log_loss_flag;
    } catch (const std::exception&) {
        t["l2_rate"] = nullptr;
    }
    t["global_existence_window"] = global_existence_window(m.n, m.sigma, m.eta, m.p).label;
    return t;
}

json checks_json(const std::vector<CheckResult>& checks) {
    json a = json::array();
    for (const auto& c : checks) a.push_back(c.to_json());
    return a;
}

struct Line {
    double slope = NAN;
    double intercept = NAN;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return {};
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double s = sxy / sxx;
    return {s, my - s * mx};
}

RadialDataSpec parse_radial(const json& j) {
    const std::string kind = j.value("kind", "zero");
    const double width = j.value("width", 1.0), mass = j.value("mass", 1.0);
    if (kind == "zero") return RadialDataSpec::zero();
    if (kind == "gaussian") return RadialDataSpec::gaussian(width, mass);
    if (kind == "mean_zero") return RadialDataSpec::mean_zero_gaussian(width, mass);
    throw ConfigError("unknown radial data kind '" + kind + "'");
}

}  // namespace

std::string to_string(ExperimentKind k) {
    for (const auto& [name, kind] : kind_names())
        if (kind == k) return name;
    return "?";
}

ExperimentKind kind_from_string(const std::string& s) {
    const auto it = kind_names().find(s);
    if (it == kind_names().end()) throw ConfigError("unknown experiment kind '" + s + "'");
    return it->second;
}

json ExperimentPlan::defaults(ExperimentKind kind) {
    json j;
    j["model"] = {{"n", 1.0}, {"sigma", 1.0}, {"eta", 2.0}, {"p", 2.0}, {"epsilon", 1.0}};
    j["grid"] = {{"L", 40.0}, {"N", 256}};
    j["solver"] = {{"dt", 0.05}, {"scheme", "DuhamelMidpoint"}, {"blowup_threshold", 1e6}, {"dealias", true},
                   {"max_time", 10.0}, {"nonlinearity", 1.0}, {"step_control", 0.05}, {"max_halvings", 48},
                   {"theta", 1e-3}, {"output_ratio", 1.1}, {"max_snapshots", 400}, {"field_interval", 0.0},
                   {"sensitivity_factor", 100.0}, {"check_resolution", true}};
    j["data"] = {{"u0", {{"kind", "zero"}}}, {"u1", {{"kind", "zero"}}}, {"u2", {{"kind", "gaussian"}}}};
    j["epsilon_grid"] = json::array();
    j["options"] = json::object();
    switch (kind) {
        case ExperimentKind::KernelTable:
            j["options"] = {{"t", {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}},
                            {"r", {0.0, 0.5, 1.0, 2.0, 5.0}},
                            {"residual_limit", 1e-7},
                            {"abel_limit", 1e-8}};
            break;
        case ExperimentKind::StabilityScan:
            j["model"]["sigma"] = 1.5;
            j["options"] = {{"etas", {0.5, 0.9, 1.0, 1.5, 3.0, 5.0}}, {"r", 1.0}, {"horizon", 100.0}, {"gevrey_t", 1.0}};
            break;
        case ExperimentKind::DecayStudy:
            j["model"]["sigma"] = 0.25;
            j["options"] = {{"t_min", 100.0},
                            {"t_max", 1e4},
                            {"per_decade", 8},
                            {"eps0", 1.0},
                            {"radial_data",
                             {{"v0", {{"kind", "gaussian"}, {"width", 1.0}, {"mass", 1.0}}},
                              {"v1", {{"kind", "gaussian"}, {"width", 1.0}, {"mass", 1.0}}},
                              {"v2", {{"kind", "gaussian"}, {"width", 1.0}, {"mass", 1.0}}}}},
                            {"slope_tolerance", 0.05},
                            {"gain_tolerance", 0.1},
                            {"ratio_bound", 10.0},
                            {"drift_limit", 0.05}};
            break;
        case ExperimentKind::LemmaVerify:
            j["options"] = {{"samples", 500}, {"theta", 1e-3}};
            break;
        case ExperimentKind::NonlinearRun:
            j["model"] = {{"n", 1.0}, {"sigma", 0.3}, {"eta", 2.0}, {"p", 3.0}, {"epsilon", 1e-5}};
            j["grid"] = {{"L", 200.0}, {"N", 2048}};
            j["solver"]["dt"] = 0.1;
            j["solver"]["max_time"] = 1000.0;
            j["solver"]["check_resolution"] = false;
            j["data"]["u2"] = {{"kind", "mean_zero"}};
            j["options"] = {{"expect", "bounded"}, {"decade_start", 10.0}, {"growth_limit", 0.01}};
            break;
        case ExperimentKind::LifespanSweep:
            j["model"] = {{"n", 1.0}, {"sigma", 1.0}, {"eta", 2.0}, {"p", 2.0}, {"epsilon", 1e-2}};
            j["grid"] = {{"L", 2000.0}, {"N", 8192}};
            j["solver"]["dt"] = 0.1;
            j["solver"]["max_time"] = 2000.0;
            j["solver"]["blowup_threshold"] = 1e4;
            j["solver"]["sensitivity_factor"] = 1e4;
            j["epsilon_grid"] = {{"start", 1e-2}, {"ratio", 1.0 / std::sqrt(2.0)}, {"count", 8}};
            j["options"] = {{"l_doubling", true}, {"slope_tolerance", 0.15}, {"sensitivity_limit", 0.02},
                            {"shift_limit", 5.0}};
            break;
        case ExperimentKind::FunctionalCheck:
            j["model"] = {{"n", 1.0}, {"sigma", 1.0}, {"eta", 2.0}, {"p", 2.0}, {"epsilon", 1e-2}};
            j["grid"] = {{"L", 800.0}, {"N", 4096}};
            j["solver"]["dt"] = 0.1;
            j["solver"]["blowup_threshold"] = 1e4;
            j["solver"]["check_resolution"] = false;
            j["solver"]["field_interval"] = 0.1;
            j["options"] = {{"R", {2.0, 4.0, 8.0, 16.0, 32.0}}, {"K", 1.0}, {"weak_R", 8.0}, {"stability", 0.5}};
            break;
    }
    return j;
}

ExperimentPlan ExperimentPlan::from_json(ExperimentKind kind, const json& config, std::uint64_t seed, unsigned workers) {
    if (!config.is_object()) throw ConfigError("configuration must be a JSON object");
    require_keys(config, {"model", "grid", "solver", "data", "epsilon_grid", "options"}, "configuration");
    json j = defaults(kind);
    for (const char* block : {"model", "grid", "solver", "data", "options"})
        if (config.contains(block)) {
            if (!config[block].is_object()) throw ConfigError(std::string(block) + " must be a JSON object");
            std::vector<std::string> keys;
            for (auto it = j[block].begin(); it != j[block].end(); ++it) keys.push_back(it.key());
            require_keys(config[block], keys, block);
            j[block].merge_patch(config[block]);
        }
    if (config.contains("epsilon_grid")) j["epsilon_grid"] = config["epsilon_grid"];

    ExperimentPlan plan;
    plan.kind = kind;
    plan.seed = seed;
    plan.workers = std::max(1u, workers);
    const json& m = j["model"];
    plan.model = {get_or_throw<double>(m, "n"), get_or_throw<double>(m, "sigma"), get_or_throw<double>(m, "eta"),
                  get_or_throw<double>(m, "p"), get_or_throw<double>(m, "epsilon")};
    try {
        plan.model.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    plan.grid = {get_or_throw<double>(j["grid"], "L"), get_or_throw<int>(j["grid"], "N")};
    const json& s = j["solver"];
    MildSolverConfig& c = plan.solver;
    c.dt = get_or_throw<double>(s, "dt");
    c.scheme = parse_scheme(get_or_throw<std::string>(s, "scheme"));
    c.blowup_threshold = get_or_throw<double>(s, "blowup_threshold");
    c.dealias = get_or_throw<bool>(s, "dealias");
    c.max_time = get_or_throw<double>(s, "max_time");
    c.nonlinearity = get_or_throw<double>(s, "nonlinearity");
    c.step_control = get_or_throw<double>(s, "step_control");
    c.max_halvings = get_or_throw<int>(s, "max_halvings");
    c.theta = get_or_throw<double>(s, "theta");
    c.output_ratio = get_or_throw<double>(s, "output_ratio");
    c.max_snapshots = get_or_throw<std::size_t>(s, "max_snapshots");
    c.field_interval = get_or_throw<double>(s, "field_interval");
    c.sensitivity_factor = get_or_throw<double>(s, "sensitivity_factor");
    c.check_resolution = get_or_throw<bool>(s, "check_resolution");
    const bool torus = kind == ExperimentKind::NonlinearRun || kind == ExperimentKind::LifespanSweep ||
                       kind == ExperimentKind::FunctionalCheck;
    try {
        c.validate();
        if (torus) {
            plan.model.validate(true);
            TorusGrid probe(static_cast<int>(plan.model.n), plan.grid.L, plan.grid.N);
        }
    } catch (const std::exception& e) {
        throw ConfigError(std::string("solver/grid: ") + e.what());
    }
    plan.data = {parse_data(j["data"]["u0"], "data.u0"), parse_data(j["data"]["u1"], "data.u1"),
                 parse_data(j["data"]["u2"], "data.u2")};
    const json& eg = j["epsilon_grid"];
    if (eg.is_array()) {
        for (const auto& v : eg) plan.epsilon_grid.push_back(v.get<double>());
    } else if (eg.is_object()) {
        require_keys(eg, {"start", "ratio", "count"}, "epsilon_grid");
        const double start = get_or_throw<double>(eg, "start"), ratio = get_or_throw<double>(eg, "ratio");
        const int count = get_or_throw<int>(eg, "count");
        if (!(start > 0) || !(ratio > 0 && ratio < 1) || count < 1)
            throw ConfigError("epsilon_grid needs start > 0, 0 < ratio < 1, count >= 1");
        for (int i = 0; i < count; ++i) plan.epsilon_grid.push_back(start * std::pow(ratio, i));
    } else {
        throw ConfigError("epsilon_grid must be a list or {start, ratio, count}");
    }
    if (kind == ExperimentKind::LifespanSweep) {
        if (plan.epsilon_grid.size() < 5) throw ConfigError("sweeps need at least 5 epsilon values");
        for (std::size_t i = 1; i < plan.epsilon_grid.size(); ++i)
            if (!(plan.epsilon_grid[i] < plan.epsilon_grid[i - 1]))
                throw ConfigError("epsilon_grid must be strictly decreasing");
        if (!(plan.epsilon_grid.back() > 0)) throw ConfigError("epsilon values must be positive");
    }
    plan.options = j["options"];
    plan.resolved = j;
    return plan;
}

Field sample_data(const TorusGrid& g, const TorusDataSpec& spec) {
    Field out(g.size(), 0.0);
    const double n = g.dim();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = g.x_abs(i) / spec.width;
        const double y2 = y * y;
        if (spec.kind == "gaussian")
            out[i] = spec.amplitude * std::exp(-y2);
        else if (spec.kind == "mean_zero")
            out[i] = spec.amplitude * (1.0 - 2.0 * y2 / n) * std::exp(-y2);
        else if (spec.kind == "constant")
            out[i] = spec.amplitude;
    }
    return out;
}

std::array<Field, 3> sample_data(const TorusGrid& g, const std::array<TorusDataSpec, 3>& spec) {
    return {sample_data(g, spec[0]), sample_data(g, spec[1]), sample_data(g, spec[2])};
}

// ---------------------------------------------------------------- suites

std::vector<CheckResult> kernel_suite(std::uint64_t seed, int samples, double theta) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, 10.0), ur(0.0, 5.0);
    const std::array<double, 4> sigmas{0.5, 1.0, 1.5, 3.0};
    const std::array<double, 7> etas{0.5, 1.0, 2.0, 3.0, 3.0 - 1e-6, 3.0 + 1e-6, 5.0};
    std::uniform_int_distribution<std::size_t> us(0, sigmas.size() - 1), ue(0, etas.size() - 1);
    double worst_res = 0.0, worst_ic = 0.0, worst_abel = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = ut(rng), r = ur(rng);
        const KernelParams kp{sigmas[us(rng)], etas[ue(rng)], theta};
        const double res = kernel_ode_residual(t, r, kp);
        worst_res = std::isnan(res) ? INFINITY : std::max(worst_res, res);
        const double abel = abel_defect(t, r, kp);
        worst_abel = std::isnan(abel) ? INFINITY : std::max(worst_abel, abel);
        const Mat3 M = kernel_matrix(0.0, r, kp);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const double d = std::abs(M[a][b] - (a == b ? 1.0 : 0.0));
                worst_ic = std::isnan(d) ? INFINITY : std::max(worst_ic, d);
            }
    }
    const std::string n = std::to_string(samples) + " random samples";
    return {check_below("kernel ODE residual", worst_res, 1e-7, n),
            check_below("initial-condition matrix at t = 0", worst_ic, 1e-10, n),
            check_below("Abel determinant identity", worst_abel, 1e-8, n)};
}

CheckResult eta3_continuity(double theta) {
    const double sigma = 1.0, t = 1.0, r = 1.0;
    const KernelValues ref = kernel_values(t, r, {sigma, 3.0, theta});
    double worst = 0.0;
    for (double eta : {3.0 - 1e-6, 3.0 + 1e-6}) {
        const KernelValues kv = kernel_values(t, r, {sigma, eta, theta});
        for (int j = 0; j < 3; ++j) {
            const double rel = std::abs(kv.D[0][j] - ref.D[0][j]) / std::abs(ref.D[0][j]);
            worst = std::isfinite(rel) ? std::max(worst, rel) : INFINITY;
        }
    }
    return check_below("kernel continuity at eta = 3", worst, 1e-4, "eta = 3 +- 1e-6 at (t, r) = (1, 1)");
}

std::vector<CheckResult> estimate_suite(unsigned workers) {
    std::vector<CheckResult> out;
    const double tuples[10][3] = {{0, 0.5, 0.5}, {0, 1, 0.75}, {0.5, 1, 1}, {0, 2, 1},    {1, 2, 1.5},
                                  {0, 3, 3},     {0.25, 4, 2}, {0, 4, 0.5}, {-0.2, 0.5, 1}, {0.5, 3, 0.5}};
    double worst = 0.0;
    std::string worst_at;
    std::vector<double> dev(10);
    parallel_for(10, workers, [&](std::size_t i) {
        const auto& u = tuples[i];
        const double rate = -3.0 * (2.0 * u[0] + u[1]) / (4.0 * u[2]);
        const double t = 10.0;
        const double ratio = weighted_gamma_integral(u[0], u[1], u[2], 1.0, 4.0 * t) / weighted_gamma_integral(u[0], u[1], u[2], 1.0, t);
        dev[i] = std::abs(ratio / std::pow(4.0, rate) - 1.0);
    });
    for (std::size_t i = 0; i < 10; ++i)
        if (dev[i] > worst || std::isnan(dev[i])) {
            worst = std::isnan(dev[i]) ? INFINITY : dev[i];
            std::ostringstream os;
            os << "(s, n, sigma) = (" << tuples[i][0] << ", " << tuples[i][1] << ", " << tuples[i][2] << ")";
            worst_at = os.str();
        }
    out.push_back(check_below("low-frequency integral rate, 10 tuples", worst, 0.02, "worst " + worst_at));

    const double n = 3.0, sigma = 1.0, eta = 2.0;
    const double target = -(3.0 * n - 8.0 * sigma) / (4.0 * sigma);
    const std::vector<double> times = log_times(1e2, 1e4, 8);
    NormSeries a1, a2;
    a1.t = a2.t = times;
    a1.value.resize(times.size());
    a2.value.resize(times.size());
    parallel_for(times.size(), workers, [&](std::size_t i) {
        const auto [x, y] = two_scale_integrals(times[i], eta, n, sigma);
        a1.value[i] = x;
        a2.value[i] = y;
    });
    out.push_back(check_within("oscillatory integral A1 rate", fit_rate(a1).slope, target, 0.05, "(n, sigma, eta) = (3, 1, 2)"));
    out.push_back(check_within("oscillatory integral A2 rate", fit_rate(a2).slope, target, 0.05, "(n, sigma, eta) = (3, 1, 2)"));
    return out;
}

std::vector<CheckResult> scaling_suite() {
    std::vector<CheckResult> out;
    const TorusGrid g(1, 400.0, 1 << 14);
    for (double gamma : {0.5, 1.0, 1.5})
        for (int R : {2, 4}) {
            std::ostringstream name;
            name << "dilation identity gamma = " << gamma << ", R = " << R;
            out.push_back(check_below(name.str(), frac_lap_scaling_check(gamma, R, g), 1e-6, "q = 3, L = 400, N = 2^14"));
        }
    const TorusGrid big(1, 4000.0, 1 << 16);
    for (double sigma : {0.5, 1.0}) {
        const EnvelopeFit f = envelope_bound_check(sigma, 3.0, big);
        std::ostringstream name;
        name << "envelope exponent sigma = " << sigma;
        out.push_back(check_within(name.str(), f.exponent, f.expected, 0.2, "q = 3, L = 4000, N = 2^16"));
    }
    return out;
}

std::vector<CheckResult> solver_suite() {
    std::vector<CheckResult> out;
    {
        // One step from the exact linear state against the exact state one step later.
        const ModelParams mp{1, 1, 2, 2, 1};
        const TorusGrid g(1, 40.0, 256);
        const std::array<Field, 3> d{g.sample([](double x) { return std::exp(-x * x); }),
                                    g.sample([](double x) { return x * std::exp(-x * x); }),
                                    g.sample([](double x) { return std::exp(-0.5 * x * x); })};
        MildSolverConfig cfg;
        cfg.dt = 0.1;
        cfg.nonlinearity = 0.0;
        const KernelParams kp{mp.sigma, mp.eta, cfg.theta};
        const StateTriple s0 = initial_state(g, d);
        auto exact = [&](double t) {
            StateTriple s;
            s.t = t;
            s.u.resize(g.size());
            s.ut.resize(g.size());
            s.utt.resize(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                const Mat3 M = kernel_matrix(t, g.k_abs(i), kp);
                s.u[i] = M[0][0] * s0.u[i] + M[0][1] * s0.ut[i] + M[0][2] * s0.utt[i];
                s.ut[i] = M[1][0] * s0.u[i] + M[1][1] * s0.ut[i] + M[1][2] * s0.utt[i];
                s.utt[i] = M[2][0] * s0.u[i] + M[2][1] * s0.ut[i] + M[2][2] * s0.utt[i];
            }
            return s;
        };
        double worst = 0.0;
        for (double t : {0.0, 0.5, 2.3})
            for (double h : {0.05, 0.1}) {
                const StateTriple a = exact(t);
                const StateTriple b = duhamel_step(a, h, g, mp, cfg);
                const StateTriple e = exact(t + h);
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    num = std::max({num, std::abs(b.u[i] - e.u[i]), std::abs(b.ut[i] - e.ut[i]), std::abs(b.utt[i] - e.utt[i])});
                    den = std::max({den, std::abs(e.u[i]), std::abs(e.ut[i]), std::abs(e.utt[i])});
                }
                worst = std::max(worst, num / den);
            }
        out.push_back(check_below("linear step against exact propagator", worst, 1e-10, "relative, per step"));
    }
    {
        const ModelParams mp{1, 1, 2, 2, 1};
        const TorusGrid g(1, 40.0, 256);
        const std::array<Field, 3> d{Field(g.size(), 0.0), Field(g.size(), 0.0),
                                    g.sample([](double x) { return std::exp(-x * x); })};
        std::vector<Field> fin;
        for (double dt : {0.1, 0.05, 0.025}) {
            MildSolverConfig cfg;
            cfg.dt = dt;
            cfg.max_time = 4.0;
            cfg.step_control = 0.0;
            cfg.check_resolution = false;
            cfg.field_interval = cfg.max_time;
            fin.push_back(integrate(mp, g, d, cfg).first.fields.back());
        }
        auto diff = [&](int a, int b) {
            double m = 0.0;
            for (std::size_t i = 0; i < fin[a].size(); ++i) m = std::max(m, std::abs(fin[a][i] - fin[b][i]));
            return m;
        };
        const double order = std::log2(diff(0, 1) / diff(1, 2));
        out.push_back(check_within("midpoint self-convergence order", order, 2.0, 0.25, "dt = 0.1, 0.05, 0.025 to t = 4"));
    }
    {
        const ModelParams mp{1, 3, 2, 3, 0.5};
        const TorusGrid g(1, 40.0, 512);
        const std::array<Field, 3> d{g.sample([](double x) { return std::exp(-x * x); }), Field(g.size(), 0.0),
                                    g.sample([](double x) { return std::exp(-x * x); })};
        MildSolverConfig cfg;
        cfg.dt = 0.01;
        cfg.max_time = 4.0;
        cfg.field_interval = 0.01;
        cfg.step_control = 0.0;
        cfg.check_resolution = false;
        const auto traj = integrate(mp, g, d, cfg).first;
        const WeakFormReport w = weak_form_residual(traj, g, TestFunctionParams::defaults(1, 3, 4.0), mp);
        std::ostringstream os;
        os << "sigma = 3, eta = 2, p = 3, eps = 0.5, R = 4; nonlinear term " << io::format_double(w.nonlinear_term);
        out.push_back(check_below("weak-form residual", w.residual, 1e-3, os.str()));
    }
    return out;
}

std::vector<CheckResult> exponent_table_suite() {
    bool ok = true;
    std::string detail;
    for (int n = 1; n <= 10; ++n) {
        const Extended<Rational> pc = critical_exponent(Rational(n), Rational(3));
        if (n <= 4) {
            ok = ok && is_unbounded(pc);
        } else {
            const Rational expect = Rational(1) + Rational(6, n - 4);
            ok = ok && !is_unbounded(pc) && std::get<Rational>(pc) == expect;
        }
    }
    const Rational le = lifespan_exponent(Rational(5), Rational(3), Rational(2));
    std::ostringstream os;
    os << le.numerator() << "/" << le.denominator();
    return {{"critical exponent at sigma = 3, n = 1..10", ok, ok ? 1.0 : 0.0, 1.0, "exact rationals"},
            {"lifespan exponent at (5, 3, 2)", le == Rational(-2, 5), to_double(le), -0.4, os.str()}};
}

// ---------------------------------------------------------------- runners

Outcome run_kernel_table(const ExperimentPlan& plan) {
    Outcome out;
    const KernelParams kp{plan.model.sigma, plan.model.eta, plan.solver.theta};
    const auto ts = plan.options.at("t").get<std::vector<double>>();
    const auto rs = plan.options.at("r").get<std::vector<double>>();
    io::CsvTable table({"t", "r", "K0", "K1", "K2", "K0_t", "K1_t", "K2_t", "K0_tt", "K1_tt", "K2_tt", "ode_residual",
                        "abel_defect", "divided_difference_path"});
    double worst_res = 0.0, worst_abel = 0.0;
    for (double t : ts)
        for (double r : rs) {
            const KernelValues kv = kernel_values(t, r, kp);
            const double res = kernel_ode_residual(kv, r, kp);
            const double abel = abel_defect(t, r, kp);
            worst_res = std::isnan(res) ? INFINITY : std::max(worst_res, res);
            worst_abel = std::isnan(abel) ? INFINITY : std::max(worst_abel, abel);
            table.add_row({t, r, kv.D[0][0], kv.D[0][1], kv.D[0][2], kv.D[1][0], kv.D[1][1], kv.D[1][2], kv.D[2][0],
                           kv.D[2][1], kv.D[2][2], res, abel, kv.divided_difference_path});
        }
    out.checks = {check_below("kernel ODE residual", worst_res, plan.options.at("residual_limit").get<double>()),
                  check_below("Abel determinant identity", worst_abel, plan.options.at("abel_limit").get<double>())};
    const CharRoots cr = char_roots(plan.model.eta, 1.0, plan.model.sigma);
    out.report["roots_at_r1"] = json::array();
    for (const auto& l : cr.lambda) out.report["roots_at_r1"].push_back({l.real(), l.imag()});
    out.report["regime"] = to_string(classify_eta(plan.model.eta).profile);
    out.table = std::move(table);
    return out;
}

Outcome run_stability_scan(const ExperimentPlan& plan) {
    Outcome out;
    const auto etas = plan.options.at("etas").get<std::vector<double>>();
    const double r = plan.options.at("r").get<double>();
    const double horizon = plan.options.at("horizon").get<double>();
    const double gt = plan.options.at("gevrey_t").get<double>();
    io::CsvTable table({"eta", "stability", "theory_exponent", "measured_exponent", "sup_over_initial",
                        "final_over_initial", "strictly_decaying", "gevrey_slope"});
    std::vector<StabilityMeasurement> meas(etas.size());
    std::vector<double> gev(etas.size(), NAN), theory(etas.size());
    parallel_for(etas.size(), plan.workers, [&](std::size_t i) {
        const PropagatorParams pp{plan.model.n, plan.model.sigma, etas[i], 1.0, plan.solver.theta};
        meas[i] = instability_rate(r, pp, horizon);
        const CharRoots cr = char_roots(etas[i], r, plan.model.sigma);
        double top = -INFINITY;
        for (const auto& l : cr.lambda) top = std::max(top, l.real());
        theory[i] = top;
        try {
            const DataTriple data{RadialDataSpec::zero(), RadialDataSpec::zero(), RadialDataSpec::gaussian(1.0, 1.0)};
            gev[i] = gevrey_slope(data, gt, pp);
        } catch (const std::exception&) {
            gev[i] = NAN;
        }
    });
    bool signs = true, gevrey_ok = true;
    for (std::size_t i = 0; i < etas.size(); ++i) {
        const double e = etas[i];
        table.add_row({e, to_string(classify_eta(e).stability), theory[i], meas[i].exponent, meas[i].sup_over_initial,
                       meas[i].final_over_initial, meas[i].strictly_decaying, gev[i]});
        if (e < 1.0) signs = signs && meas[i].exponent > 0;
        if (e == 1.0) signs = signs && meas[i].sup_over_initial <= 10.0;
        if (e > 1.0) signs = signs && meas[i].strictly_decaying;
        const bool positive = gev[i] > 0.05;
        gevrey_ok = gevrey_ok && (positive == (e > 1.0));
        if (e == 0.5) {
            out.checks.push_back({"growth exponent at eta = 0.5", below(std::abs(meas[i].exponent / theory[i] - 1.0), 0.01),
                                  meas[i].exponent, theory[i], "relative tolerance 1%"});
        }
        if (e == 1.0)
            out.checks.push_back(check_below("bounded amplitude at eta = 1", meas[i].sup_over_initial, 10.0, "sup / initial"));
        if (e > 1.0) {
            std::ostringstream name;
            name << "strict decay at eta = " << e;
            out.checks.push_back({name.str(), meas[i].strictly_decaying, meas[i].final_over_initial, 1.0, "final / initial"});
        }
    }
    out.checks.push_back({"trichotomy signs", signs, NAN, NAN, "growth below 1, bounded at 1, decay above 1"});
    out.checks.push_back({"Gevrey slope positive iff eta > 1", gevrey_ok, NAN, NAN, "slope threshold 0.05"});
    out.checks.push_back(eta3_continuity(plan.solver.theta));
    out.table = std::move(table);
    out.report["r"] = r;
    out.report["horizon"] = horizon;
    return out;
}

Outcome run_decay_study(const ExperimentPlan& plan) {
    Outcome out;
    const auto& o = plan.options;
    const ModelParams& m = plan.model;
    const PropagatorParams pp{m.n, m.sigma, m.eta, o.at("eps0").get<double>(), plan.solver.theta};
    const json& rd = o.at("radial_data");
    const DataTriple data{parse_radial(rd.at("v0")), parse_radial(rd.at("v1")), parse_radial(rd.at("v2"))};
    const auto tab = decay_rates(m.n, m.sigma, m.eta);
    const std::vector<double> times =
        log_times(o.at("t_min").get<double>(), o.at("t_max").get<double>(), o.at("per_decade").get<int>());
    const double hs = 4.0 * m.sigma / 3.0;
    const NormSeries l2 = norm_series([&](double t) { return radial_norm(data, t, 0.0, pp); }, times, 0.0, plan.workers);
    const NormSeries h = norm_series([&](double t) { return radial_norm(data, t, hs, pp); }, times, hs, plan.workers);
    const NormSeries diff =
        norm_series([&](double t) { return refined_difference_norm(data, t, 0.0, pp); }, times, 0.0, plan.workers);
    const DecayFit f2 = fit_rate(l2), fh = fit_rate(h), fd = fit_rate(diff);
    const double st = o.at("slope_tolerance").get<double>();
    out.checks.push_back(check_within("L2 decay slope", f2.slope, -tab.l2_rate, st));
    out.checks.push_back(check_within("homogeneous Sobolev decay slope", fh.slope, -tab.hs_rate, st));
    out.checks.push_back(check_within("profile refinement gain", fd.slope - f2.slope, -tab.refined_gain,
                                      o.at("gain_tolerance").get<double>(), "difference slope minus L2 slope"));
    const LemmaCheckReport sharp = sharpness_check(l2, -tab.l2_rate, {}, o.at("ratio_bound").get<double>(),
                                                   o.at("drift_limit").get<double>());
    out.checks.push_back({"sharpness of the L2 rate", sharp.pass, sharp.c_upper / sharp.c_lower,
                          o.at("ratio_bound").get<double>(),
                          "last-decade drift " + io::format_double(sharp.drift)});
    io::CsvTable table({"t", "l2", "hs", "profile_difference"});
    for (std::size_t i = 0; i < times.size(); ++i) table.add_row({times[i], l2.value[i], h.value[i], diff.value[i]});
    out.table = std::move(table);
    auto fit_json = [](const DecayFit& f) {
        return json{{"slope", f.slope},           {"intercept", f.intercept},       {"rms_residual", f.rms_residual},
                    {"samples", f.samples},       {"curvature", f.curvature},       {"non_power_law", f.non_power_law},
                    {"window", {f.window.t_min, f.window.t_max}}};
    };
    out.report["fits"] = {{"l2", fit_json(f2)}, {"hs", fit_json(fh)}, {"profile_difference", fit_json(fd)}};
    out.report["sharpness"] = {{"c_lower", sharp.c_lower}, {"c_upper", sharp.c_upper}, {"drift", sharp.drift}};
    out.report["profile"] = to_string(profile_for(m.eta));
    out.report["mass_v2"] = data[2].mass;
    if (data[2].is_zero()) out.report["note"] = "P(v2) = 0: the sharp lower bound does not apply";
    return out;
}

Outcome run_verify(const ExperimentPlan& plan) {
    Outcome out;
    const int samples = plan.options.at("samples").get<int>();
    const double theta = plan.options.at("theta").get<double>();
    auto append = [&](const std::string& group, std::vector<CheckResult> cs) {
        for (auto& c : cs) {
            c.name = group + ": " + c.name;
            out.checks.push_back(std::move(c));
        }
    };
    append("kernels", kernel_suite(plan.seed, samples, theta));
    append("kernels", {eta3_continuity(theta)});
    append("estimates", estimate_suite(plan.workers));
    append("functionals", scaling_suite());
    append("nonlinear", solver_suite());
    append("model", exponent_table_suite());
    return out;
}

namespace {

double decade_growth(const TrajectoryRecord& tr, double start) {
    double worst = -INFINITY;
    auto at = [&](double t) {
        std::size_t k = 0;
        while (k + 1 < tr.times.size() && tr.times[k + 1] <= t * (1 + 1e-9)) ++k;
        return tr.xT_weighted_sup[k];
    };
    for (double a = start; 10.0 * a <= tr.times.back() * (1 + 1e-9); a *= 10.0) worst = std::max(worst, at(10.0 * a) / at(a) - 1.0);
    return worst;
}

json blowup_json(const BlowupReport& r) {
    return {{"blew_up", r.blew_up},
            {"lifespan_estimate", r.lifespan_estimate},
            {"crossing_time", r.crossing_time},
            {"threshold_sensitivity", r.threshold_sensitivity},
            {"resolution_flag", r.resolution_flag},
            {"resolution_change", r.resolution_change},
            {"threshold", r.threshold},
            {"final_time", r.final_time},
            {"final_sup", r.final_sup},
            {"label", r.label}};
}

}  // namespace

Outcome run_nonlinear(const ExperimentPlan& plan) {
    Outcome out;
    const TorusGrid g(static_cast<int>(plan.model.n), plan.grid.L, plan.grid.N);
    const auto [tr, rep] = integrate(plan.model, g, sample_data(g, plan.data), plan.solver);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        out.records.push_back({{"t", tr.times[i]},
                               {"l2", tr.l2_norms[i]},
                               {"hs", tr.hs_norms[i]},
                               {"sup", tr.sup_norms[i]},
                               {"xT", tr.xT_weighted_sup[i]}});
    out.report["blowup"] = blowup_json(rep);
    out.report["xT_norm"] = xT_norm(tr, plan.model);
    out.report["steps"] = tr.steps;
    out.report["max_imag_ratio"] = tr.max_imag_ratio;
    const std::string expect = plan.options.at("expect").get<std::string>();
    if (expect == "bounded") {
        out.checks.push_back({"no blow-up before max_time", !rep.blew_up && rep.final_time >= plan.solver.max_time * (1 - 1e-9),
                              rep.final_time, plan.solver.max_time, "threshold " + io::format_double(rep.threshold)});
        const double start = plan.options.at("decade_start").get<double>();
        out.checks.push_back(check_below("X(T) growth per decade", decade_growth(tr, start),
                                         plan.options.at("growth_limit").get<double>(),
                                         "after t = " + io::format_double(start)));
    } else if (expect == "blowup") {
        out.checks.push_back({"blow-up detected", rep.blew_up, rep.lifespan_estimate, NAN, rep.label});
    } else if (expect != "none") {
        throw ConfigError("options.expect must be bounded, blowup or none");
    }
    out.checks.push_back(check_below("imaginary residue", tr.max_imag_ratio, 1e-10, "relative to sup-norm"));
    return out;
}

Outcome run_lifespan_sweep(const ExperimentPlan& plan) {
    Outcome out;
    const ModelParams& m0 = plan.model;
    const auto pc_ext = critical_exponent(m0.n, m0.sigma);
    const double pc = to_double(pc_ext);
    const bool critical = std::isfinite(pc) && std::abs(m0.p - pc) <= 1e-12 * pc;
    if (std::isfinite(pc) && m0.p > pc && !critical) throw RegimeError("supercritical p: lifespan sweep needs p <= p_crit");
    const double theory = critical ? -(m0.p - 1.0) : lifespan_exponent(m0.n, m0.sigma, m0.p);

    const std::size_t ne = plan.epsilon_grid.size();
    const bool doubling = plan.options.at("l_doubling").get<bool>();
    const std::size_t jobs = doubling ? 2 * ne : ne;
    std::vector<BlowupReport> reps(jobs);
    parallel_for(jobs, plan.workers, [&](std::size_t k) {
        const bool big = k >= ne;
        ModelParams mp = m0;
        mp.epsilon = plan.epsilon_grid[k % ne];
        const TorusGrid g(static_cast<int>(mp.n), plan.grid.L * (big ? 2 : 1), plan.grid.N * (big ? 2 : 1));
        MildSolverConfig cfg = plan.solver;
        if (big) {
            cfg.check_resolution = false;
            cfg.sensitivity_factor = 1.0;
        }
        reps[k] = integrate(mp, g, sample_data(g, plan.data), cfg).second;
    });
    {
        const TorusGrid g(static_cast<int>(m0.n), plan.grid.L, plan.grid.N);
        const Field u2 = sample_data(g, plan.data[2]);
        out.report["u2_mass"] = integrate_field(g, u2);
        if (!(integrate_field(g, u2) > 0)) out.report["warning"] = "u2 is not mean-positive";
    }
    auto fit = [&](std::size_t offset, std::vector<std::string>* excluded) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < ne; ++i) {
            const BlowupReport& r = reps[offset + i];
            if (!r.blew_up || !std::isfinite(r.lifespan_estimate)) {
                if (excluded) excluded->push_back(io::format_double(plan.epsilon_grid[i]));
                continue;
            }
            x.push_back(std::log(plan.epsilon_grid[i]));
            y.push_back(critical ? std::log(std::log(r.lifespan_estimate)) : std::log(r.lifespan_estimate));
        }
        return least_squares(x, y);
    };
    std::vector<std::string> excluded;
    const Line base = fit(0, &excluded);
    io::CsvTable table({"epsilon", "blew_up", "lifespan_estimate", "crossing_time", "threshold_sensitivity",
                        "resolution_flag", "resolution_change", "lifespan_doubled_L"});
    bool all_blew = true, monotone = true;
    double worst_sens = 0.0;
    for (std::size_t i = 0; i < ne; ++i) {
        const BlowupReport& r = reps[i];
        all_blew = all_blew && r.blew_up;
        worst_sens = std::isnan(r.threshold_sensitivity) ? INFINITY : std::max(worst_sens, r.threshold_sensitivity);
        if (i > 0) monotone = monotone && r.lifespan_estimate > reps[i - 1].lifespan_estimate;
        table.add_row({plan.epsilon_grid[i], r.blew_up, r.lifespan_estimate, r.crossing_time, r.threshold_sensitivity,
                       r.resolution_flag, r.resolution_change, doubling ? json(reps[ne + i].lifespan_estimate) : json(nullptr)});
    }
    out.table = std::move(table);
    const double rel = std::abs(base.slope - theory) / std::abs(theory);
    out.checks.push_back({"every epsilon blows up", all_blew, static_cast<double>(ne - excluded.size()),
                          static_cast<double>(ne), excluded.empty() ? "" : "excluded from fit"});
    out.checks.push_back({"lifespan exponent", below(rel, plan.options.at("slope_tolerance").get<double>()), base.slope,
                          theory, critical ? "log log T against log eps" : "log T against log eps"});
    out.checks.push_back(check_below("threshold robustness", worst_sens, plan.options.at("sensitivity_limit").get<double>(),
                                     "relative lifespan change between thresholds " +
                                         io::format_double(plan.solver.blowup_threshold) + " and " +
                                         io::format_double(plan.solver.blowup_threshold * plan.solver.sensitivity_factor)));
    out.checks.push_back({"lifespan monotone in epsilon", monotone, NAN, NAN, ""});
    json sweep{{"fitted_exponent", base.slope},
               {"theoretical_exponent", theory},
               {"relative_error", rel},
               {"measured_constant", std::exp(base.intercept)},
               {"critical", critical},
               {"excluded_epsilons", excluded}};
    if (doubling) {
        const Line big = fit(ne, nullptr);
        const double shift = 100.0 * std::abs(big.slope - base.slope) / std::abs(theory);
        sweep["fitted_exponent_doubled_L"] = big.slope;
        sweep["finite_size_shift_points"] = shift;
        out.checks.push_back(check_below("L-doubling shift (points)", shift, plan.options.at("shift_limit").get<double>()));
    }
    bool resolved = true;
    for (std::size_t i = 0; i < ne; ++i) resolved = resolved && reps[i].resolution_flag;
    sweep["resolution_ok"] = resolved;
    out.report["sweep"] = sweep;
    return out;
}

Outcome run_functional_check(const ExperimentPlan& plan) {
    Outcome out;
    const ModelParams& m = plan.model;
    const auto Rs = plan.options.at("R").get<std::vector<double>>();
    if (Rs.empty()) throw ConfigError("options.R must not be empty");
    const double K = plan.options.at("K").get<double>();
    const double weak_R = plan.options.at("weak_R").get<double>();
    const double stab = plan.options.at("stability").get<double>();
    double horizon = weak_R;
    for (double R : Rs) horizon = std::max(horizon, std::pow(R, 2.0 * m.sigma / 3.0));
    MildSolverConfig cfg = plan.solver;
    cfg.max_time = horizon;
    if (!(cfg.field_interval > 0)) throw ConfigError("functional checks need solver.field_interval > 0");
    const TorusGrid g(static_cast<int>(m.n), plan.grid.L, plan.grid.N);
    const auto [tr, rep] = integrate(m, g, sample_data(g, plan.data), cfg);
    out.report["blowup"] = blowup_json(rep);

    io::CsvTable table({"R", "K", "m", "I_R", "Y_p", "J_R", "data_term", "rhs_bound", "chain_constant"});
    std::vector<FunctionalValues> fvs;
    for (double R : Rs) {
        TestFunctionParams tp = TestFunctionParams::defaults(m.n, m.sigma, R);
        tp.K = K;
        tp.validate(m.n, m.sigma);
        try {
            fvs.push_back(evaluate_functionals(tr, g, tp, m));
        } catch (const CoverageError& e) {
            FunctionalValues fv;
            fv.R = R;
            fv.K = K;
            fv.m = tp.m;
            fvs.push_back(fv);
            out.report["coverage_warning"] = e.what();
            continue;
        }
    }
    for (const auto& fv : fvs)
        table.add_row({fv.R, fv.K, fv.m, fv.I_R, fv.Y_p, fv.J_R, fv.data_term, fv.rhs_bound, fv.chain_constant});
    out.table = std::move(table);

    bool nonneg = true, mono = true, chain = true, yratio = true;
    double prev_y = -INFINITY, worst_chain = 0.0, worst_y = 0.0;
    double y_ref = NAN;
    for (std::size_t i = 0; i < fvs.size(); ++i) {
        const auto& fv = fvs[i];
        nonneg = nonneg && !(fv.I_R < 0) && !(fv.Y_p < 0);
        if (std::isfinite(fv.Y_p)) {
            mono = mono && fv.Y_p >= prev_y;
            prev_y = fv.Y_p;
            const double ratio = fv.Y_p / fv.J_R;
            if (std::isnan(y_ref)) y_ref = ratio;
            worst_y = std::max(worst_y, std::abs(ratio / y_ref - 1.0));
        }
        if (i > 0 && std::isfinite(fv.chain_constant) && std::isfinite(fvs[i - 1].chain_constant))
            worst_chain = std::max(worst_chain, std::abs(fv.chain_constant / fvs[i - 1].chain_constant - 1.0));
    }
    chain = below(worst_chain, stab);
    yratio = below(worst_y, stab);
    out.checks.push_back({"functionals nonnegative", nonneg, NAN, NAN, ""});
    out.checks.push_back({"Y_p non-decreasing in R", mono, NAN, NAN, ""});
    out.checks.push_back({"chain constant stable across R doubling", chain, worst_chain, stab, "largest relative change"});
    out.checks.push_back({"Y_p / J_R stable in R", yratio, worst_y, stab, "largest relative change"});

    TestFunctionParams wtp = TestFunctionParams::defaults(m.n, m.sigma, weak_R);
    wtp.K = K;
    json weak;
    try {
        const WeakFormReport w = weak_form_residual(tr, g, wtp, m, cfg.nonlinearity);
        weak = {{"R", weak_R},          {"residual", w.residual}, {"lhs", w.lhs}, {"rhs", w.rhs},
                {"nonlinear", w.nonlinear_term}, {"data", w.data_term}, {"sigma_in_3N", w.sigma_in_3N}, {"note", w.note}};
        if (w.sigma_in_3N) out.checks.push_back(check_below("weak-form residual", w.residual, 1e-3));
    } catch (const CoverageError& e) {
        weak = {{"error", e.what()}};
    }
    out.report["weak_form"] = weak;
    out.report["sigma_in_3N"] = sigma_in_3N(m.sigma);
    if (!sigma_in_3N(m.sigma)) out.report["note"] = "sigma outside 3N: outside the critical-case hypotheses";
    return out;
}

Outcome run(const ExperimentPlan& plan) {
    Outcome out;
    switch (plan.kind) {
        case ExperimentKind::KernelTable: out = run_kernel_table(plan); break;
        case ExperimentKind::StabilityScan: out = run_stability_scan(plan); break;
        case ExperimentKind::DecayStudy: out = run_decay_study(plan); break;
        case ExperimentKind::LemmaVerify: out = run_verify(plan); break;
        case ExperimentKind::NonlinearRun: out = run_nonlinear(plan); break;
        case ExperimentKind::LifespanSweep: out = run_lifespan_sweep(plan); break;
        case ExperimentKind::FunctionalCheck: out = run_functional_check(plan); break;
    }
    out.report["kind"] = to_string(plan.kind);
    out.report["model"] = model_json(plan.model);
    out.report["theory"] = theory_json(plan.model);
    out.report["checks"] = checks_json(out.checks);
    out.report["pass"] = all_pass(out.checks);
    return out;
}

json run_record(const ExperimentPlan& plan, const Outcome& out) {
    auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream ts;
    ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << io::plan_hash(plan.resolved);
    return {{"plan_hash", hash.str()},
            {"version", version},
            {"seed", plan.seed},
            {"workers", plan.workers},
            {"finished_utc", ts.str()},
            {"plan", plan.resolved},
            {"report", out.report}};
}

}  // namespace fracthird::lab
