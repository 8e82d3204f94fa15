// uwoam: underwater OAM link simulator and analysis pipeline.
//
// Subcommands:
//   simulate <config>     run a full experiment, write frames/tables/manifest
//   analyze <frames-dir>  run the angle-recognition pipeline on PGM frames
//   reproduce <name>      canned comparison against a published link statistic
//   validate <config>     check a config file, print an itemized report

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "uwoam/runner.hpp"

namespace {

int cmd_simulate(const std::string& config_path, const std::string& output_override) {
    uwoam::ExperimentConfig cfg = uwoam::load_config(config_path);
    if (!output_override.empty()) cfg.output_dir = output_override;
    const uwoam::ValidationReport report = uwoam::validate_config(cfg);
    if (!report.ok()) {
        std::cerr << report.to_string();
        return 1;
    }
    const uwoam::RunManifest manifest = uwoam::run_experiment(cfg);
    std::cout << "wrote " << manifest.files.size() << " files to " << cfg.output_dir << " in "
              << manifest.wall_seconds << " s\n";
    for (const auto& s : manifest.states) {
        std::cout << "  state " << s.label;
        if (!std::isnan(s.sent_theta))
            std::cout << ": mean fidelity " << s.mean_fidelity << ", std " << s.fidelity_std
                      << ", mean deviation " << s.mean_deviation_deg << " deg";
        if (s.failed > 0) std::cout << " (" << s.failed << " failed frames)";
        std::cout << "\n";
    }
    return 0;
}

int cmd_analyze(const std::string& dir, int ell, double sent_theta_deg, double threshold) {
    namespace fs = std::filesystem;
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".pgm") paths.push_back(entry.path().string());
    if (paths.empty()) {
        std::cerr << "no .pgm frames in " << dir << "\n";
        return 1;
    }
    std::sort(paths.begin(), paths.end());

    const double sent_theta = uwoam::wrap_2pi(sent_theta_deg * std::numbers::pi / 180.0);
    std::cout << "frame,angle_deg,theta_deg,quality,fidelity,deviation_deg\n";
    int failed = 0;
    for (size_t i = 0; i < paths.size(); ++i) {
        uwoam::Frame frame = uwoam::read_pgm16(paths[i]);
        frame.index = static_cast<int>(i);
        const uwoam::PetalSet petals = uwoam::segment_petals(frame, ell, threshold);
        if (!petals.accepted()) {
            std::cout << i << ",,,,," << "\n";
            ++failed;
            continue;
        }
        const uwoam::OrientationResult r = uwoam::orientation(petals);
        const double deg = 180.0 / std::numbers::pi;
        std::cout << i << "," << r.angle * deg << "," << r.theta * deg << "," << r.quality << ","
                  << uwoam::analytic_fidelity(sent_theta, r.theta) << ","
                  << uwoam::angle_deviation(sent_theta, r, ell) << "\n";
    }
    if (failed > 0) std::cerr << failed << " of " << paths.size() << " frames failed detection\n";
    return 0;
}

int cmd_reproduce(const std::string& name) {
    if (name == "list") {
        for (const auto& n : uwoam::reproduce_registry()) std::cout << n << "\n";
        return 0;
    }
    const uwoam::ReproduceReport report = uwoam::reproduce(name);
    std::cout << report.name << ": " << report.status << "\n";
    for (const auto& line : report.lines) std::cout << "  " << line << "\n";
    return report.status == "fail" ? 1 : 0;
}

int cmd_validate(const std::string& config_path) {
    const uwoam::ExperimentConfig cfg = uwoam::load_config(config_path);
    const uwoam::ValidationReport report = uwoam::validate_config(cfg);
    std::cout << report.to_string();
    return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater OAM transmission simulator"};
    app.require_subcommand(1);

    std::string config_path, frames_dir, statistic;
    int ell = 1;
    double sent_theta_deg = 0.0, threshold = 0.5;
    bool print_default = false;

    std::string output_override;
    auto* simulate = app.add_subcommand("simulate", "run an experiment from a config file");
    simulate->add_option("config", config_path, "config file")->required();
    simulate->add_option("--output", output_override, "override the config's output_dir");

    auto* analyze = app.add_subcommand("analyze", "angle recognition on a directory of PGM frames");
    analyze->add_option("frames-dir", frames_dir, "directory of .pgm frames")->required();
    analyze->add_option("--ell", ell, "|ell| of the sent superposition")->required();
    analyze->add_option("--sent-theta", sent_theta_deg, "sent relative phase [deg]")->required();
    analyze->add_option("--threshold", threshold, "segmentation threshold fraction");

    auto* repro = app.add_subcommand("reproduce", "compare against a published statistic");
    repro->add_option("name", statistic, "statistic name, or 'list'")->required();

    auto* validate = app.add_subcommand("validate", "validate a config file");
    validate->add_option("config", config_path, "config file");
    validate->add_flag("--print-default", print_default, "print a commented default config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, output_override);
        if (analyze->parsed()) return cmd_analyze(frames_dir, ell, sent_theta_deg, threshold);
        if (repro->parsed()) return cmd_reproduce(statistic);
        if (validate->parsed()) {
            if (print_default) {
                std::cout << uwoam::default_config_text();
                return 0;
            }
            if (config_path.empty()) {
                std::cerr << "validate: config file required (or --print-default)\n";
                return 1;
            }
            return cmd_validate(config_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
