#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracthird/io.hpp"
#include "fracthird/model.hpp"
#include "fracthird/nonlinear.hpp"
#include "fracthird/spectral.hpp"

namespace fracthird::lab {

using json = nlohmann::json;

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = NAN;
    double target = NAN;
    std::string detail;

    json to_json() const;
};

bool all_pass(const std::vector<CheckResult>& checks);

enum class ExperimentKind { KernelTable, StabilityScan, DecayStudy, LemmaVerify, NonlinearRun, LifespanSweep, FunctionalCheck };

std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& s);

struct GridSpec {
    double L = 40.0;
    int N = 256;
};

// Physical-space data profile on the torus; x is scaled by `width`.
struct TorusDataSpec {
    std::string kind = "zero";  // zero | gaussian | mean_zero | constant
    double width = 1.0;
    double amplitude = 1.0;
};

struct ExperimentPlan {
    ExperimentKind kind = ExperimentKind::LemmaVerify;
    ModelParams model;
    GridSpec grid;
    MildSolverConfig solver;
    std::array<TorusDataSpec, 3> data;
    std::vector<double> epsilon_grid;
    json options = json::object();
    std::uint64_t seed = 0;
    unsigned workers = 1;
    // Effective configuration after defaults were applied.
    json resolved;

    static json defaults(ExperimentKind kind);
    // Merges `config` over the defaults of `kind`; malformed input raises ConfigError.
    static ExperimentPlan from_json(ExperimentKind kind, const json& config, std::uint64_t seed = 0, unsigned workers = 1);
};

Field sample_data(const TorusGrid& g, const TorusDataSpec& spec);
std::array<Field, 3> sample_data(const TorusGrid& g, const std::array<TorusDataSpec, 3>& spec);

struct Outcome {
    json report = json::object();
    std::vector<CheckResult> checks;
    std::optional<io::CsvTable> table;
    std::vector<json> records;
};

Outcome run_kernel_table(const ExperimentPlan& plan);
Outcome run_stability_scan(const ExperimentPlan& plan);
Outcome run_decay_study(const ExperimentPlan& plan);
Outcome run_verify(const ExperimentPlan& plan);
Outcome run_nonlinear(const ExperimentPlan& plan);
Outcome run_lifespan_sweep(const ExperimentPlan& plan);
Outcome run_functional_check(const ExperimentPlan& plan);
Outcome run(const ExperimentPlan& plan);

// Individual suites, shared by run_verify and the acceptance driver.
std::vector<CheckResult> kernel_suite(std::uint64_t seed, int samples = 500, double theta = 1e-3);
CheckResult eta3_continuity(double theta = 1e-3);
std::vector<CheckResult> estimate_suite(unsigned workers = 1);
std::vector<CheckResult> scaling_suite();
std::vector<CheckResult> solver_suite();
std::vector<CheckResult> exponent_table_suite();

// Wraps a report with plan hash, version, seed and timestamps.
json run_record(const ExperimentPlan& plan, const Outcome& out);

inline constexpr const char* version = "1.0.0";

}  // namespace fracthird::lab
