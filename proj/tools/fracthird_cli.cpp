#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "fracthird/errors.hpp"
#include "fracthird/io.hpp"
#include "fracthird/lab.hpp"
#include "fracthird/parallel.hpp"

namespace fl = fracthird::lab;
namespace fio = fracthird::io;

namespace {

fl::json load_config(const std::string& path) {
    if (path.empty()) return fl::json::object();
    std::ifstream f(path);
    if (!f) throw fracthird::ConfigError("cannot open config file " + path);
    try {
        return fl::json::parse(f);
    } catch (const fl::json::parse_error& e) {
        throw fracthird::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

void write_outputs(const std::string& dir, const std::string& name, const fl::ExperimentPlan& plan, const fl::Outcome& out) {
    const std::filesystem::path base(dir);
    if (out.table) {
        std::ostringstream os;
        out.table->write(os);
        fio::write_file(base / (name + ".csv"), os.str());
    }
    std::vector<fl::json> lines = out.records;
    for (const auto& c : out.checks) lines.push_back(c.to_json());
    fio::write_jsonl(base / (name + ".jsonl"), lines);
    fio::write_file(base / (name + ".json"), fio::dump_json(fl::run_record(plan, out)) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional third-order evolution lab"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out";
    unsigned workers = fracthird::default_workers();
    std::uint64_t seed = 20240531;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Random seed");
    const std::pair<const char*, const char*> commands[] = {
        {"kernel-table", "Kernel values, ODE residuals and Abel defects on a (t, r) grid"},
        {"stability-scan", "Single-mode growth, boundedness and decay across eta"},
        {"decay-study", "Linear decay slopes, sharpness and profile refinement by radial quadrature"},
        {"verify-lemmas", "Oracle checks for kernels, estimates, scaling identities and the solver"},
        {"nonlinear-run", "One mild-solution run with blow-up detection and X(T) monitoring"},
        {"lifespan-sweep", "Lifespan against epsilon with threshold and domain-size checks"},
        {"functional-check", "Test-function functionals and the weak-form identity along a run"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const auto plan = fl::ExperimentPlan::from_json(fl::kind_from_string(name), load_config(config_path), seed, workers);
        const fl::Outcome out = fl::run(plan);
        write_outputs(out_dir, name, plan, out);
        for (const auto& c : out.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << fio::format_double(c.measured)
                      << " target=" << fio::format_double(c.target) << (c.detail.empty() ? "" : "  (" + c.detail + ")")
                      << "\n";
        return fl::all_pass(out.checks) ? 0 : 1;
    } catch (const fracthird::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fracthird::RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return 2;
    } catch (const fracthird::ParameterDomainError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
