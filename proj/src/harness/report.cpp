#include "ags/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "ags/sim/trace.hpp"

namespace ags::harness {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kHeader =
    "frame,fc,level,refined,refine_iters,key,fc_to_key,skip_size,fp_rate,fp_rate_any,track_loss,map_loss,"
    "gaussians,psnr,x,y,z,gt_x,gt_y,gt_z,tracking_cycles,mapping_cycles";

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw std::runtime_error("report: bad number '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw std::runtime_error("report: bad integer '" + s + "'");
    return v;
}

// JSON has no infinity; such values become the string "inf".
ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(num(v)); }

ordered_json jopt(const std::optional<double>& v) { return v ? jnum(*v) : ordered_json(nullptr); }

double ate_scale(const std::string& units) { return units == "m" ? 100.0 : 1.0; }

ordered_json mode_json(const ModeReport& m, const sim::HardwareConfig& hw, const std::string& units) {
    ordered_json j;
    j["mode"] = m.mode;
    j["frames"] = m.rows.size();
    j["frames_csv"] = m.mode + "_frames.csv";
    j["ate_rmse"] = jnum(m.ate_rmse * ate_scale(units));
    j["ate_units"] = units == "m" ? "cm" : units;
    j["psnr_db"] = jnum(m.psnr);
    j["fp_rate"] = jopt(m.fp_rate);
    j["fp_rate_any_pixel"] = jopt(m.fp_rate_any);
    j["refine_fraction"] = m.refine_fraction;
    j["key_fraction"] = m.key_fraction;
    j["skip_fraction"] = m.skip_fraction;
    j["sim"] = sim::to_json(m.sim, hw);
    j["energy"] = jnum(m.energy);
    return j;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

double json_double(const nlohmann::json& j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

}  // namespace

std::string frames_csv(const ModeReport& mode) {
    std::string out = std::string(kHeader) + "\n";
    for (const FrameRow& r : mode.rows) {
        std::ostringstream line;
        line << r.frame << ',' << num(r.fc) << ',' << r.level << ',' << (r.refined ? 1 : 0) << ',' << r.refine_iters
             << ',' << (r.key ? 1 : 0) << ',' << num(r.fc_to_key) << ',' << r.skip_size << ',' << opt(r.fp_rate)
             << ',' << opt(r.fp_rate_any) << ',' << num(r.track_loss) << ',' << num(r.map_loss) << ','
             << r.gaussians << ',' << num(r.psnr);
        for (int k = 0; k < 3; ++k) line << ',' << num(r.position[k]);
        for (int k = 0; k < 3; ++k) line << ',' << num(r.gt_position[k]);
        line << ',' << r.tracking_cycles << ',' << r.mapping_cycles << '\n';
        out += line.str();
    }
    return out;
}

std::vector<FrameRow> parse_frames_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw std::runtime_error("frames csv: bad header");
    std::vector<FrameRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 22) throw std::runtime_error("frames csv: expected 22 fields, got " + std::to_string(f.size()));
        FrameRow r;
        r.frame = static_cast<int>(parse_uint(f[0]));
        r.fc = parse_double(f[1]);
        r.level = static_cast<int>(parse_uint(f[2]));
        r.refined = f[3] == "1";
        r.refine_iters = static_cast<int>(parse_uint(f[4]));
        r.key = f[5] == "1";
        r.fc_to_key = parse_double(f[6]);
        r.skip_size = parse_uint(f[7]);
        if (!f[8].empty()) r.fp_rate = parse_double(f[8]);
        if (!f[9].empty()) r.fp_rate_any = parse_double(f[9]);
        r.track_loss = parse_double(f[10]);
        r.map_loss = parse_double(f[11]);
        r.gaussians = parse_uint(f[12]);
        r.psnr = parse_double(f[13]);
        for (int k = 0; k < 3; ++k) r.position[k] = parse_double(f[14 + k]);
        for (int k = 0; k < 3; ++k) r.gt_position[k] = parse_double(f[17 + k]);
        r.tracking_cycles = parse_uint(f[20]);
        r.mapping_cycles = parse_uint(f[21]);
        rows.push_back(r);
    }
    return rows;
}

std::string report_json(const RunReport& report) {
    ExperimentConfig cfg;
    apply_settings(cfg, parse_settings(report.config));
    ordered_json j;
    j["format"] = "ags-report";
    j["version"] = 1;
    j["units"] = report.units;
    j["preset"] = report.preset;
    j["speedup"] = jopt(report.speedup);
    if (report.baseline) j["baseline"] = mode_json(*report.baseline, cfg.hardware, report.units);
    if (report.ags) j["ags"] = mode_json(*report.ags, cfg.hardware, report.units);
    if (report.baseline && report.ags) {
        j["dram_bytes"] = {{"baseline", report.baseline->sim.dram_read_bytes + report.baseline->sim.dram_write_bytes},
                           {"ags", report.ags->sim.dram_read_bytes + report.ags->sim.dram_write_bytes}};
    }
    j["config"] = report.config;
    return j.dump(2) + "\n";
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    // Render everything before touching the directory so a failure leaves no partial report.
    const std::string json = report_json(report);
    std::vector<std::pair<std::string, std::string>> tables;
    for (const auto* m : {&report.baseline, &report.ags}) {
        if (*m) tables.emplace_back((*m)->mode + "_frames.csv", frames_csv(**m));
    }
    for (const auto& [name, text] : tables) write_file(dir / name, text);
    write_file(dir / "report.json", json);
}

RunReport parse_report(const std::filesystem::path& dir) {
    const nlohmann::json j = nlohmann::json::parse(read_file(dir / "report.json"));
    if (j.value("format", "") != "ags-report") throw std::runtime_error("report: not an ags report");
    RunReport r;
    r.units = j.at("units").get<std::string>();
    r.preset = j.at("preset").get<std::string>();
    r.config = j.at("config").get<std::string>();
    if (!j.at("speedup").is_null()) r.speedup = json_double(j.at("speedup"));
    for (const char* name : {"baseline", "ags"}) {
        if (!j.contains(name)) continue;
        const nlohmann::json& mj = j.at(name);
        ModeReport m;
        m.mode = mj.at("mode").get<std::string>();
        m.rows = parse_frames_csv(read_file(dir / mj.at("frames_csv").get<std::string>()));
        m.sim = sim::sim_stats_from_json(mj.at("sim"));
        m.energy = json_double(mj.at("energy"));
        m = recompute_aggregates(m);
        (std::string(name) == "baseline" ? r.baseline : r.ags) = m;
    }
    return r;
}

}  // namespace ags::harness
