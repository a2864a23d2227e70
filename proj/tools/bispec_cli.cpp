#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "bispec/config.hpp"

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw bispec::InvalidArgument("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fisher-information bounds for pulsed biphoton spectroscopy"};
    app.require_subcommand(1);

    std::string config_path, out_path, engine;
    int threads = 0;
    std::string grid_refine;

    auto* run = app.add_subcommand("run", "Run the sweep described by a JSON config");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--out", out_path, "Output file (overrides output.path), '-' for stdout");
    run->add_option("--engine", engine, "closedform, gdm or both")->check(CLI::IsMember({"closedform", "gdm", "both"}));
    run->add_option("--threads", threads, "Worker threads for grid points")->check(CLI::NonNegativeNumber);
    run->add_option("--grid-refine", grid_refine, "Automatic grid refinement: on or off")
        ->check(CLI::IsMember({"on", "off"}));

    auto* val = app.add_subcommand("validate", "Check a JSON config and list every error");
    val->add_option("config", config_path, "Config file")->required();

    CLI11_PARSE(app, argc, argv);

    std::string text;
    try {
        text = slurp(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    if (*val) {
        auto errs = bispec::validate_config(text);
        for (const auto& e : errs) std::cout << e << '\n';
        if (errs.empty()) std::cout << "ok\n";
        return errs.empty() ? 0 : 1;
    }

    // command-line overrides are applied to the document, so they are validated too
    if (!engine.empty() || !grid_refine.empty()) {
        auto doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_object()) {
            if (!engine.empty()) doc["engine"] = engine;
            if (!grid_refine.empty()) doc["grid"]["refine"] = grid_refine == "on";
            text = doc.dump();
        }
    }
    auto errs = bispec::validate_config(text);
    if (!errs.empty()) {
        for (const auto& e : errs) std::cerr << e << '\n';
        return 1;
    }
    bispec::ExperimentConfig cfg = bispec::parse_config(text);
    if (!out_path.empty()) cfg.output_path = out_path;
    if (threads > 0) omp_set_num_threads(threads);

    try {
        bispec::SweepTable t = bispec::run_experiment(cfg);
        std::ofstream file;
        std::ostream* os = &std::cout;
        if (!cfg.output_path.empty() && cfg.output_path != "-") {
            file.open(cfg.output_path);
            if (!file) {
                std::cerr << "cannot write " << cfg.output_path << '\n';
                return 1;
            }
            os = &file;
        }
        if (cfg.format == bispec::OutputFormat::JSON)
            bispec::write_json(*os, t);
        else
            bispec::write_csv(*os, t);
    } catch (const bispec::InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
