#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ags/harness/synthetic.hpp"
#include "ags/mapping/mapping.hpp"
#include "ags/sim/hardware.hpp"
#include "ags/tracking/tracking.hpp"

namespace ags::harness {

struct ExperimentConfig {
    std::string dataset = "synthetic";  // synthetic | tum
    std::string tum_dir;
    int tum_downsample = 1;
    int frame_start = 0;
    int frame_count = 0;  // 0: every frame
    std::string output_dir = "ags_out";
    std::uint64_t seed = 1;
    SyntheticSpec synthetic;  // also supplies the intrinsics of TUM input
    tracking::TrackingConfig tracking;
    mapping::MappingConfig mapping;
    bool auto_thresh_n = true;  // thresh_n = desk_thresh_n(image size)
    sim::HardwareConfig hardware;
    Exec exec = Exec::kParallel;

    // Throws std::invalid_argument naming the first out-of-range value.
    void validate() const;
};

// One documented key of the text format. Every key is also a CLI flag.
struct ConfigKey {
    std::string name;
    std::string help;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_keys();

using Settings = std::vector<std::pair<std::string, std::string>>;

// Parses "key = value" lines; '#' starts a comment. Throws
// std::invalid_argument on malformed lines or unknown keys.
Settings parse_settings(const std::string& text);

// Applies settings in order, except that `preset` is applied first so that
// individual hardware keys refine it.
void apply_settings(ExperimentConfig& cfg, const Settings& settings);

ExperimentConfig load_config(const std::filesystem::path& path);

// Every key with its current value; load_config of the result reproduces
// `cfg` exactly.
std::string save_config(const ExperimentConfig& cfg);

// thresh_n in effect for images of the given size.
int effective_thresh_n(const ExperimentConfig& cfg, int width, int height);

}  // namespace ags::harness
