#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "fracthird/io.hpp"
#include "fracthird/lab.hpp"
#include "fracthird/parallel.hpp"

using namespace fracthird;
using namespace fracthird::lab;

namespace {

constexpr std::uint64_t seed = 20240531;

struct Criterion {
    int id;
    std::string title;
    double time_limit;  // seconds; 0 means unbounded
    std::function<std::vector<CheckResult>()> body;
};

std::vector<CheckResult> pick(const std::vector<CheckResult>& all, const std::vector<std::string>& prefixes) {
    std::vector<CheckResult> out;
    for (const auto& c : all)
        for (const auto& p : prefixes)
            if (c.name.rfind(p, 0) == 0) {
                out.push_back(c);
                break;
            }
    return out;
}

std::string summary(const CheckResult& c) {
    std::string s = c.name + " measured=" + io::format_double(c.measured) + " target=" + io::format_double(c.target);
    if (!c.detail.empty()) s += " (" + c.detail + ")";
    return s;
}

Outcome decay_outcome(unsigned workers) {
    static Outcome cached;
    static bool done = false;
    if (!done) {
        cached = run(ExperimentPlan::from_json(ExperimentKind::DecayStudy, json::object(), seed, workers));
        done = true;
    }
    return cached;
}

}  // namespace

int main() {
    const unsigned workers = default_workers();
    const std::vector<Criterion> criteria{
        {1, "kernel correctness", 5.0, [] { return kernel_suite(seed); }},
        {2, "regime continuity at eta = 3", 0.0, [] { return std::vector<CheckResult>{eta3_continuity()}; }},
        {3, "decay-rate reproduction", 30.0,
         [&] { return pick(decay_outcome(workers).checks, {"L2 decay slope", "homogeneous Sobolev decay slope"}); }},
        {4, "sharpness of the L2 rate", 0.0, [&] { return pick(decay_outcome(workers).checks, {"sharpness"}); }},
        {5, "profile refinement", 0.0, [&] { return pick(decay_outcome(workers).checks, {"profile refinement gain"}); }},
        {6, "stability trichotomy", 0.0,
         [&] {
             const auto out = run(ExperimentPlan::from_json(ExperimentKind::StabilityScan, json::object(), seed, workers));
             return pick(out.checks, {"growth exponent", "bounded amplitude", "strict decay", "trichotomy"});
         }},
        {7, "estimate oracles", 60.0, [&] { return estimate_suite(workers); }},
        {8, "scaling identity and envelope", 0.0, [] { return scaling_suite(); }},
        {9, "nonlinear solver consistency", 0.0, [] { return solver_suite(); }},
        {10, "blow-up and lifespan scaling", 0.0,
         [&] { return run(ExperimentPlan::from_json(ExperimentKind::LifespanSweep, json::object(), seed, workers)).checks; }},
        {11, "supercritical boundedness", 0.0,
         [&] { return run(ExperimentPlan::from_json(ExperimentKind::NonlinearRun, json::object(), seed, workers)).checks; }},
        {12, "exponent tables", 0.0, [] { return exponent_table_suite(); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckResult> checks;
        std::string error;
        try {
            checks = c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = error.empty() && !checks.empty() && all_pass(checks);
        std::string note;
        if (c.time_limit > 0 && secs >= c.time_limit) {
            pass = false;
            note = " runtime over " + io::format_double(c.time_limit) + " s";
        }
        std::printf("%s criterion %2d %s: %zu checks, %.2f s%s%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    checks.size(), secs, note.c_str(), error.empty() ? "" : (" error: " + error).c_str());
        for (const auto& k : checks)
            if (!k.pass) std::printf("     failed: %s\n", summary(k).c_str());
        std::fflush(stdout);
        if (!pass) ++failed;
    }

    // Same supercritical setting with mean-positive data, reported without a verdict.
    try {
        const json cfg{{"data", {{"u2", {{"kind", "gaussian"}}}}}, {"options", {{"expect", "none"}}}};
        const auto out = run(ExperimentPlan::from_json(ExperimentKind::NonlinearRun, cfg, seed, workers));
        const auto& b = out.report.at("blowup");
        std::printf("INFO mean-positive data in the supercritical setting: blew_up=%s final_time=%s\n",
                    b.at("blew_up").get<bool>() ? "true" : "false", io::dump_json(b.at("final_time")).c_str());
    } catch (const std::exception& e) {
        std::printf("INFO mean-positive data in the supercritical setting: error %s\n", e.what());
    }

    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
