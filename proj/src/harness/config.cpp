#include "ags/harness/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace ags::harness {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
}

template <typename T>
T parse_value(const std::string& key, const std::string& v) {
    if constexpr (std::is_same_v<T, std::string>) {
        return v;
    } else if constexpr (std::is_same_v<T, bool>) {
        if (v == "true" || v == "1" || v == "on") return true;
        if (v == "false" || v == "0" || v == "off") return false;
        bad_value(key, v);
    } else if constexpr (std::is_floating_point_v<T>) {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) bad_value(key, v);
            return d;
        } catch (const std::logic_error&) {
            bad_value(key, v);
        }
    } else {
        T out{};
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
        return out;
    }
}

template <typename T>
std::string format_value(const T& v) {
    if constexpr (std::is_same_v<T, std::string>) {
        return v;
    } else if constexpr (std::is_same_v<T, bool>) {
        return v ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    } else {
        return std::to_string(v);
    }
}

template <typename Ref>
ConfigKey field(std::string name, std::string help, Ref ref) {
    using T = std::remove_reference_t<decltype(ref(std::declval<ExperimentConfig&>()))>;
    ConfigKey k;
    k.name = name;
    k.help = std::move(help);
    k.get = [ref](const ExperimentConfig& c) { return format_value(ref(const_cast<ExperimentConfig&>(c))); };
    k.set = [ref, name](ExperimentConfig& c, const std::string& v) { ref(c) = parse_value<T>(name, v); };
    return k;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<ConfigKey> build_keys() {
    using C = ExperimentConfig;
    std::vector<ConfigKey> k;
    // input
    k.push_back(field("dataset", "input source: synthetic or tum", [](C& c) -> auto& { return c.dataset; }));
    k.push_back(field("tum_dir", "TUM RGB-D sequence directory", [](C& c) -> auto& { return c.tum_dir; }));
    k.push_back(field("tum_downsample", "integer downsampling of TUM frames", [](C& c) -> auto& { return c.tum_downsample; }));
    k.push_back(field("frame_start", "first frame used", [](C& c) -> auto& { return c.frame_start; }));
    k.push_back(field("frame_count", "frames used, 0 for all", [](C& c) -> auto& { return c.frame_count; }));
    k.push_back(field("output_dir", "report directory", [](C& c) -> auto& { return c.output_dir; }));
    k.push_back({"seed", "seed of the synthetic scene and keyframe sampling",
                 [](const C& c) { return format_value(c.seed); },
                 [](C& c, const std::string& v) {
                     c.seed = parse_value<std::uint64_t>("seed", v);
                     c.synthetic.seed = c.seed;
                     c.mapping.seed = c.seed;
                 }});
    k.push_back({"exec", "serial or parallel kernels",
                 [](const C& c) { return std::string(c.exec == Exec::kSerial ? "serial" : "parallel"); },
                 [](C& c, const std::string& v) {
                     if (v == "serial") {
                         c.exec = Exec::kSerial;
                     } else if (v == "parallel") {
                         c.exec = Exec::kParallel;
                     } else {
                         bad_value("exec", v);
                     }
                 }});
    // camera and synthetic scene
    k.push_back(field("width", "image width", [](C& c) -> auto& { return c.synthetic.width; }));
    k.push_back(field("height", "image height", [](C& c) -> auto& { return c.synthetic.height; }));
    k.push_back(field("fx", "focal length x (pixels)", [](C& c) -> auto& { return c.synthetic.fx; }));
    k.push_back(field("fy", "focal length y (pixels)", [](C& c) -> auto& { return c.synthetic.fy; }));
    k.push_back(field("cx", "principal point x", [](C& c) -> auto& { return c.synthetic.cx; }));
    k.push_back(field("cy", "principal point y", [](C& c) -> auto& { return c.synthetic.cy; }));
    k.push_back(field("gaussian_count", "ground-truth Gaussians", [](C& c) -> auto& { return c.synthetic.gaussian_count; }));
    k.push_back(field("foreground_fraction", "share of Gaussians in front of the wall",
                      [](C& c) -> auto& { return c.synthetic.foreground_fraction; }));
    k.push_back(field("wall_depth", "wall distance", [](C& c) -> auto& { return c.synthetic.wall_depth; }));
    k.push_back(field("wall_half_width", "wall half width", [](C& c) -> auto& { return c.synthetic.wall_half_width; }));
    k.push_back(field("wall_half_height", "wall half height", [](C& c) -> auto& { return c.synthetic.wall_half_height; }));
    k.push_back(field("frames", "synthetic frame count", [](C& c) -> auto& { return c.synthetic.frames; }));
    k.push_back({"trajectory", "static, pan, orbit, random-walk or random-jump",
                 [](const C& c) { return to_string(c.synthetic.trajectory); },
                 [](C& c, const std::string& v) {
                     const auto t = trajectory_from_string(v);
                     if (!t) bad_value("trajectory", v);
                     c.synthetic.trajectory = *t;
                 }});
    k.push_back(field("step_px", "image-plane motion per frame", [](C& c) -> auto& { return c.synthetic.step_px; }));
    k.push_back(field("jump_translation", "random-jump translation range", [](C& c) -> auto& { return c.synthetic.jump_translation; }));
    k.push_back(field("jump_rotation", "random-jump rotation range (rad)", [](C& c) -> auto& { return c.synthetic.jump_rotation; }));
    k.push_back(field("min_jump_px", "minimum random-jump image motion", [](C& c) -> auto& { return c.synthetic.min_jump_px; }));
    k.push_back(field("noise", "colour noise std-dev", [](C& c) -> auto& { return c.synthetic.noise; }));
    // codec
    k.push_back(field("block_size", "macro-block size", [](C& c) -> auto& { return c.tracking.motion.block_size; }));
    k.push_back(field("search_radius", "motion search radius", [](C& c) -> auto& { return c.tracking.motion.search_radius; }));
    // tracking
    k.push_back(field("thresh_t", "refine iff fc < thresh_t", [](C& c) -> auto& { return c.tracking.thresh_t; }));
    k.push_back(field("iter_t", "refinement iterations", [](C& c) -> auto& { return c.tracking.iter_t; }));
    k.push_back(field("model_alignment", "align the coarse pose to a render of the map (true or false)",
                      [](C& c) -> auto& { return c.tracking.model_alignment; }));
    k.push_back(field("pose_lr", "pose step size", [](C& c) -> auto& { return c.tracking.pose_lr; }));
    k.push_back(field("baseline_iters", "tracking iterations of the baseline", [](C& c) -> auto& { return c.tracking.baseline_iters; }));
    k.push_back(field("lambda_depth", "depth term weight", [](C& c) -> auto& { return c.tracking.lambda_depth; }));
    // mapping
    k.push_back(field("thresh_m", "non-key iff fc to the last key frame > thresh_m", [](C& c) -> auto& { return c.mapping.thresh_m; }));
    k.push_back(field("thresh_alpha", "negligible alpha", [](C& c) -> auto& { return c.mapping.thresh_alpha; }));
    k.push_back({"thresh_n", "skip iff negligible count > thresh_n; auto scales 450 to the image area",
                 [](const C& c) { return c.auto_thresh_n ? std::string("auto") : format_value(c.mapping.thresh_n); },
                 [](C& c, const std::string& v) {
                     if (v == "auto") {
                         c.auto_thresh_n = true;
                     } else {
                         c.mapping.thresh_n = parse_value<int>("thresh_n", v);
                         c.auto_thresh_n = false;
                     }
                 }});
    k.push_back(field("n_m", "mapping iterations per frame", [](C& c) -> auto& { return c.mapping.n_m; }));
    k.push_back(field("mask_alpha", "selective mapping ignores pixels where a skipped Gaussian reaches this alpha",
                      [](C& c) -> auto& { return c.mapping.mask_alpha; }));
    k.push_back(field("keyframe_window", "past keyframes per mapping iteration", [](C& c) -> auto& { return c.mapping.keyframe_window; }));
    k.push_back(field("lr_mu", "mean step size", [](C& c) -> auto& { return c.mapping.lr.mu; }));
    k.push_back(field("lr_color", "colour step size", [](C& c) -> auto& { return c.mapping.lr.color; }));
    k.push_back(field("lr_opacity", "opacity step size", [](C& c) -> auto& { return c.mapping.lr.opacity; }));
    k.push_back(field("lr_scale", "scale step size", [](C& c) -> auto& { return c.mapping.lr.scale; }));
    k.push_back(field("lr_rotation", "rotation step size", [](C& c) -> auto& { return c.mapping.lr.rotation; }));
    k.push_back(field("densify_block", "densification block size", [](C& c) -> auto& { return c.mapping.densify.block_size; }));
    k.push_back(field("densify_t", "densify where final T exceeds this", [](C& c) -> auto& { return c.mapping.densify.transmittance_threshold; }));
    k.push_back(field("densify_scale", "new Gaussian scale in pixels at its depth", [](C& c) -> auto& { return c.mapping.densify.scale_factor; }));
    k.push_back(field("densify_opacity", "new Gaussian opacity", [](C& c) -> auto& { return c.mapping.densify.opacity; }));
    // hardware
    k.push_back({"preset", "hardware preset: edge or server",
                 [](const C& c) { return c.hardware.name; },
                 [](C& c, const std::string& v) { c.hardware = sim::preset(v); }});
    k.push_back(field("num_gpe_groups", "mapping GS array groups", [](C& c) -> auto& { return c.hardware.num_gpe_groups; }));
    k.push_back(field("tracking_gpe_groups", "tracking GS array groups", [](C& c) -> auto& { return c.hardware.tracking_gpe_groups; }));
    k.push_back(field("systolic_macs", "systolic MACs per cycle", [](C& c) -> auto& { return c.hardware.systolic_macs; }));
    k.push_back(field("systolic_overhead", "systolic fill/drain cycles", [](C& c) -> auto& { return c.hardware.systolic_overhead; }));
    k.push_back(field("gauss_buffer_bytes", "Gaussian buffer size", [](C& c) -> auto& { return c.hardware.gauss_buffer_bytes; }));
    k.push_back(field("logging_table_bytes", "GS logging table size", [](C& c) -> auto& { return c.hardware.logging_table_bytes; }));
    k.push_back(field("skipping_table_bytes", "GS skipping table size", [](C& c) -> auto& { return c.hardware.skipping_table_bytes; }));
    k.push_back(field("clock_mhz", "clock frequency", [](C& c) -> auto& { return c.hardware.clock_mhz; }));
    k.push_back(field("dram_bytes_per_cycle", "DRAM bandwidth", [](C& c) -> auto& { return c.hardware.dram_bytes_per_cycle; }));
    k.push_back(field("dram_latency", "DRAM latency (cycles)", [](C& c) -> auto& { return c.hardware.dram_latency; }));
    k.push_back(field("c_alpha", "cycles per alpha", [](C& c) -> auto& { return c.hardware.c_alpha; }));
    k.push_back(field("c_blend", "cycles per blend", [](C& c) -> auto& { return c.hardware.c_blend; }));
    k.push_back(field("c_grad", "cycles per gradient op", [](C& c) -> auto& { return c.hardware.c_grad; }));
    k.push_back(field("alpha_buffer_entries", "alpha buffer entries per GPE", [](C& c) -> auto& { return c.hardware.alpha_buffer_entries; }));
    k.push_back(field("hot_window_tiles", "logging prefetch window", [](C& c) -> auto& { return c.hardware.hot_window_tiles; }));
    k.push_back(field("hot_threshold", "tiles that make a Gaussian hot", [](C& c) -> auto& { return c.hardware.hot_threshold; }));
    k.push_back(field("record_bytes", "contribution record size", [](C& c) -> auto& { return c.hardware.record_bytes; }));
    k.push_back(field("gaussian_bytes", "bytes per Gaussian fetch", [](C& c) -> auto& { return c.hardware.gaussian_bytes; }));
    k.push_back(field("e_alpha", "energy per alpha", [](C& c) -> auto& { return c.hardware.energy.alpha; }));
    k.push_back(field("e_blend", "energy per blend", [](C& c) -> auto& { return c.hardware.energy.blend; }));
    k.push_back(field("e_grad", "energy per gradient op", [](C& c) -> auto& { return c.hardware.energy.grad; }));
    k.push_back(field("e_mac", "energy per MAC", [](C& c) -> auto& { return c.hardware.energy.mac; }));
    k.push_back(field("e_add", "energy per add", [](C& c) -> auto& { return c.hardware.energy.add; }));
    k.push_back(field("e_compare", "energy per compare", [](C& c) -> auto& { return c.hardware.energy.compare; }));
    k.push_back(field("e_dram_byte", "energy per DRAM byte", [](C& c) -> auto& { return c.hardware.energy.dram_byte; }));
    return k;
}

const ConfigKey* find_key(const std::string& name) {
    for (const ConfigKey& k : config_keys()) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = build_keys();
    return keys;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    require(dataset == "synthetic" || dataset == "tum", "dataset must be synthetic or tum");
    require(dataset != "tum" || !tum_dir.empty(), "tum_dir is required for dataset = tum");
    require(tum_downsample >= 1, "tum_downsample >= 1");
    require(frame_start >= 0 && frame_count >= 0, "frame_start and frame_count must be >= 0");
    require(synthetic.width > 0 && synthetic.height > 0, "image size must be positive");
    require(synthetic.fx > 0.0 && synthetic.fy > 0.0, "focal lengths must be positive");
    require(synthetic.gaussian_count >= 1 && synthetic.frames >= 1, "gaussian_count and frames must be >= 1");
    require(tracking.thresh_t >= 0.0 && tracking.thresh_t <= 1.0, "0 <= thresh_t <= 1");
    require(tracking.iter_t >= 0 && tracking.baseline_iters >= 0, "iteration counts must be >= 0");
    require(tracking.motion.block_size >= 1 && tracking.motion.search_radius >= 0, "bad motion search settings");
    require(mapping.thresh_m >= 0.0 && mapping.thresh_m <= 1.0, "0 <= thresh_m <= 1");
    require(mapping.thresh_alpha > 0.0 && mapping.thresh_alpha < 1.0, "0 < thresh_alpha < 1");
    require(mapping.thresh_n >= 0, "thresh_n >= 0");
    require(mapping.n_m >= 1, "n_m >= 1");
    require(mapping.keyframe_window >= 0, "keyframe_window >= 0");
    hardware.validate();
}

Settings parse_settings(const std::string& text) {
    Settings out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (find_key(key) == nullptr) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

void apply_settings(ExperimentConfig& cfg, const Settings& settings) {
    for (const auto& [key, value] : settings) {
        if (key == "preset") find_key(key)->set(cfg, value);
    }
    for (const auto& [key, value] : settings) {
        if (key == "preset") continue;
        const ConfigKey* k = find_key(key);
        if (k == nullptr) throw std::invalid_argument("config: unknown key '" + key + "'");
        k->set(cfg, value);
    }
    cfg.tracking.exec = cfg.exec;
    cfg.tracking.motion.exec = cfg.exec;
    cfg.mapping.exec = cfg.exec;
    cfg.mapping.motion = cfg.tracking.motion;
    cfg.mapping.lambda_depth = cfg.tracking.lambda_depth;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg;
    apply_settings(cfg, parse_settings(ss.str()));
    return cfg;
}

std::string save_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const ConfigKey& k : config_keys()) out += "# " + k.help + "\n" + k.name + " = " + k.get(cfg) + "\n";
    return out;
}

int effective_thresh_n(const ExperimentConfig& cfg, int width, int height) {
    return cfg.auto_thresh_n ? mapping::desk_thresh_n(width, height) : cfg.mapping.thresh_n;
}

}  // namespace ags::harness
