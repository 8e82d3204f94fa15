#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uwoam/analysis.hpp"
#include "uwoam/config.hpp"

namespace uwoam {

struct StateSummary {
    std::string label;
    double sent_theta = 0.0;     ///< [rad]; NaN for pure states
    double mean_fidelity = 0.0;
    double fidelity_std = 0.0;
    double mean_deviation_deg = 0.0;
    int frames = 0;
    int failed = 0;
};

struct RunManifest {
    std::string config_echo;
    std::vector<StateSummary> states;
    std::vector<std::pair<std::string, uint64_t>> files;  ///< path, fnv1a64
    uint64_t master_seed = 0;
    double wall_seconds = 0.0;
    std::string version;

    std::string to_text() const;
};

/// FNV-1a 64-bit content checksum, the manifest integrity primitive.
uint64_t fnv1a64_file(const std::string& path);

/// Per-frame realization seed: hash of (master_seed, state_index,
/// frame_index). Every stochastic draw in a run derives from these.
uint64_t frame_seed(uint64_t master_seed, int state_index, int frame_index);

/// End-to-end pipeline: for each sent state, emit -> per-frame transmit
/// -> capture -> analyze. Writes PGM frames, CSV tables and the manifest
/// under cfg.output_dir. Bit-reproducible for a fixed master_seed.
RunManifest run_experiment(const ExperimentConfig& cfg);

struct ReproduceReport {
    std::string name;
    std::string status;  ///< "pass", "fail" or "info"
    std::vector<std::string> lines;
};

/// Canned comparisons against the published link statistics. Unknown
/// names throw std::invalid_argument listing the registry.
ReproduceReport reproduce(const std::string& statistic_name);
std::vector<std::string> reproduce_registry();

}  // namespace uwoam
