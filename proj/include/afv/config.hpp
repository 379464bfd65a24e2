#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "afv/coherence_gate.hpp"
#include "afv/farneback.hpp"
#include "afv/flow_encoding.hpp"

namespace afv {

struct DotsConfig {
    int count = 500;
    int lifetime = 8;
    int radius = 0;
    std::uint64_t seed = 1;
};

struct NoiseConfig {
    std::uint64_t seed = 1;
};

struct IoConfig {
    std::string frame_pattern = "frame_%06d.png";
    std::string flow_pattern = "flow_%06d.flo";
};

// Free-text provenance notes; records any non-default hyperparameters and
// where they came from.
struct ProvenanceNote {
    std::string key;
    std::string value;
};

struct PipelineConfig {
    FlowParams flow;
    NormalizationConfig normalization;
    GateParams gate;
    bool gate_enabled = true;
    DotsConfig dots;
    NoiseConfig noise;
    IoConfig io;
    std::vector<ProvenanceNote> provenance;
};

// Plain-text config: [section] headers and key = value lines; '#' starts a
// comment. Unknown sections or keys are validation errors with the line
// number (only [provenance] accepts arbitrary keys). Missing keys keep their
// defaults. Parsed values are range-checked.
PipelineConfig load_config(const std::filesystem::path& path);

void validate_config(const PipelineConfig& config);

// Canonical text form: every key in fixed order. Used for serialization and
// for the config hash recorded in run manifests.
std::string config_to_text(const PipelineConfig& config);

}  // namespace afv
