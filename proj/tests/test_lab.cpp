#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracthird/errors.hpp"
#include "fracthird/io.hpp"
#include "fracthird/lab.hpp"

using namespace fracthird;
using namespace fracthird::lab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fracthird_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const char* cli = std::getenv("FRACTHIRD_CLI");
    if (!cli) return -1;
    const int rc = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Io, SeventeenDigits) {
    EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(io::format_double(INFINITY), "inf");
    EXPECT_EQ(io::format_double(NAN), "nan");
    EXPECT_EQ(io::dump_json(json{{"a", 0.1}, {"b", NAN}}, -1), "{\"a\":0.10000000000000001,\"b\":\"nan\"}");
    io::CsvTable t({"x", "y"});
    t.add_row({1.0 / 3.0, "a,b"});
    std::ostringstream os;
    t.write(os);
    EXPECT_EQ(os.str(), "x,y\n0.33333333333333331,\"a,b\"\n");
    EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(Plan, DefaultsAndOverrides) {
    const auto plan = ExperimentPlan::from_json(ExperimentKind::LifespanSweep, json::object());
    EXPECT_EQ(plan.epsilon_grid.size(), 8u);
    EXPECT_NEAR(plan.epsilon_grid[2], 0.005, 1e-15);
    const auto p2 = ExperimentPlan::from_json(ExperimentKind::KernelTable, json{{"model", {{"eta", 5.0}}}});
    EXPECT_EQ(p2.model.eta, 5.0);
    EXPECT_EQ(p2.model.sigma, 1.0);
    EXPECT_EQ(p2.resolved["model"]["eta"], 5.0);
}

TEST(Plan, RejectsMalformedConfig) {
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::KernelTable, json{{"modle", {}}}), ConfigError);
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::KernelTable, json{{"model", {{"etaa", 1.0}}}}), ConfigError);
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::KernelTable, json{{"model", {{"eta", "x"}}}}), ConfigError);
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::KernelTable, json{{"model", {{"eta", -1.0}}}}), ConfigError);
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::LifespanSweep, json{{"epsilon_grid", {0.1, 0.2, 0.05, 0.01, 0.001}}}),
                 ConfigError);
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::LifespanSweep, json{{"epsilon_grid", {0.1, 0.05}}}), ConfigError);
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::NonlinearRun, json{{"model", {{"n", 3.0}}}}), ConfigError);
    EXPECT_THROW(ExperimentPlan::from_json(ExperimentKind::NonlinearRun, json{{"data", {{"u2", {{"kind", "bump"}}}}}}),
                 ConfigError);
    EXPECT_THROW(kind_from_string("nope"), ConfigError);
}

TEST(Plan, SupercriticalSweepIsRejected) {
    auto plan = ExperimentPlan::from_json(ExperimentKind::LifespanSweep, json{{"model", {{"sigma", 0.3}, {"p", 3.0}}}});
    EXPECT_THROW(run_lifespan_sweep(plan), RegimeError);
}

TEST(Data, MeanZeroProfileHasZeroMass) {
    const TorusGrid g(1, 200.0, 2048);
    const Field f = sample_data(g, TorusDataSpec{"mean_zero", 1.0, 1.0});
    EXPECT_NEAR(integrate_field(g, f), 0.0, 1e-13);
    EXPECT_GT(integrate_field(g, sample_data(g, TorusDataSpec{"gaussian", 2.0, 1.0})), 0.0);
}

TEST(Runners, KernelTableReport) {
    const auto plan = ExperimentPlan::from_json(ExperimentKind::KernelTable, json::object(), 1, 1);
    const Outcome out = run(plan);
    EXPECT_TRUE(all_pass(out.checks));
    ASSERT_TRUE(out.table.has_value());
    EXPECT_EQ(out.table->rows(), 30u);
    EXPECT_TRUE(out.report.contains("theory"));
    const json rec = run_record(plan, out);
    EXPECT_EQ(rec["version"], version);
    EXPECT_EQ(rec["plan_hash"].get<std::string>().size(), 16u);
}

TEST(Runners, ReproducibleAcrossWorkerCounts) {
    const json cfg{{"options", {{"t_min", 100.0}, {"t_max", 1000.0}, {"per_decade", 4}}}};
    auto render = [&](unsigned workers) {
        const auto plan = ExperimentPlan::from_json(ExperimentKind::DecayStudy, cfg, 5, workers);
        const Outcome out = run(plan);
        std::ostringstream os;
        out.table->write(os);
        return os.str() + io::dump_json(out.report);
    };
    EXPECT_EQ(render(1), render(1));
    EXPECT_EQ(render(1), render(3));
}

TEST(Cli, ExitCodesAndOutputs) {
    if (!std::getenv("FRACTHIRD_CLI")) GTEST_SKIP() << "FRACTHIRD_CLI not set";
    const fs::path out = scratch("cli");
    EXPECT_EQ(run_cli("--out " + out.string() + " kernel-table"), 0);
    EXPECT_TRUE(fs::exists(out / "kernel-table.csv"));
    EXPECT_TRUE(fs::exists(out / "kernel-table.jsonl"));
    EXPECT_TRUE(fs::exists(out / "kernel-table.json"));
    const std::string csv = slurp(out / "kernel-table.csv");
    const std::string jsonl = slurp(out / "kernel-table.jsonl");
    EXPECT_EQ(run_cli("--out " + out.string() + " --workers 2 kernel-table"), 0);
    EXPECT_EQ(slurp(out / "kernel-table.csv"), csv);
    EXPECT_EQ(slurp(out / "kernel-table.jsonl"), jsonl);

    EXPECT_EQ(run_cli("no-such-command"), 2);
    EXPECT_EQ(run_cli(""), 2);
    const fs::path bad = out / "bad.json";
    std::ofstream(bad) << "{\"model\": {\"eta\": \"two\"}}";
    EXPECT_EQ(run_cli("--config " + bad.string() + " --out " + out.string() + " kernel-table"), 2);
    std::ofstream(bad) << "{not json";
    EXPECT_EQ(run_cli("--config " + bad.string() + " --out " + out.string() + " kernel-table"), 2);
    const fs::path fail = out / "fail.json";
    std::ofstream(fail) << "{\"options\": {\"residual_limit\": 1e-30}}";
    EXPECT_EQ(run_cli("--config " + fail.string() + " --out " + out.string() + " kernel-table"), 1);
}
