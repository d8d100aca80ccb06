// biharlab: runs a configured experiment and writes its reports.
//
//   biharlab run <config.yaml> [--out DIR] [--tol-scale X]
//   biharlab list-experiments [--json]
//
// Exit codes: 0 pass, 1 validation error, 2 numerical failure, 3 tolerance failure.

#include "bihar/experiments.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

int list_experiments(bool json) {
    if (json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& e : bihar::experiment_catalog())
            j.push_back({{"name", e.name}, {"description", e.description}, {"checks", bihar::check_groups(e.kind)}});
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    for (const auto& e : bihar::experiment_catalog()) std::cout << e.name << "  " << e.description << "\n";
    return 0;
}

int run(const std::string& path, const std::string& out, double tol_scale) {
    try {
        bihar::ExperimentConfig c = bihar::load_config(path);
        if (!out.empty()) c.out_dir = out;
        if (tol_scale > 0.0) c.tol_scale = tol_scale;
        const bihar::ExperimentResult r = bihar::run_experiment(c);
        bihar::write_outputs(r, c.out_dir);
        std::cout << bihar::summary_text(r);
        return r.passed() ? 0 : 3;
    } catch (const bihar::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const bihar::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for the perturbed biharmonic inverse problem"};
    app.require_subcommand(1);

    std::string config, out;
    double tol_scale = 0.0;
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a YAML config");
    run_cmd->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out, "output directory (overrides the config)");
    run_cmd->add_option("--tol-scale", tol_scale, "widen every tolerance by this factor")
        ->check(CLI::PositiveNumber);

    bool json = false;
    auto* list_cmd = app.add_subcommand("list-experiments", "print the experiment catalog");
    list_cmd->add_flag("--json", json, "machine-readable catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // --help exits 0; everything else is a usage error
        return code == 0 ? 0 : 1;
    }
    if (*list_cmd) return list_experiments(json);
    return run(config, out, tol_scale);
}
