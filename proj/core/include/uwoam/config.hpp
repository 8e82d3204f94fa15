#pragma once

#include <string>
#include <vector>

#include "uwoam/channel.hpp"
#include "uwoam/detector.hpp"
#include "uwoam/source.hpp"

namespace uwoam {

/// One experiment: which states to send, how many frames each, and every
/// physical parameter of the link. Parsed from sectioned key=value text.
struct ExperimentConfig {
    SourceSpec source;
    GridSpec grid;
    ChannelSpec channel;
    DetectorSpec detector;
    double waist = 0.01;  ///< emitted beam waist [m]
    std::vector<std::variant<PureState, SuperpositionSpec>> sent_states;
    int frames_per_state = 1;
    uint64_t master_seed = 0;
    std::string output_dir = "out";
    /// Mean detected photons per frame. Negative means: derive from the
    /// photon budget, channel loss and exposure.
    double expected_photons = -1.0;

    /// Effective expected photons per frame after applying the derivation
    /// chain budget.rate * transmittance * exposure when no override is set.
    double resolved_expected_photons() const;
};

struct ValidationReport {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
    std::string to_string() const;
};

ValidationReport validate_config(const ExperimentConfig& cfg);

/// Parses the sectioned key=value config format. Throws
/// std::runtime_error with a line-numbered message on syntax errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Serializes back to the canonical text form (used for the manifest echo).
std::string config_to_text(const ExperimentConfig& cfg);

/// A commented config with every default filled in.
std::string default_config_text();

}  // namespace uwoam
