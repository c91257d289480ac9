#include "motx/report.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "motx/errors.hpp"

namespace motx {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_json(const SweepConfig& cfg) {
    ordered_json j;
    j["p_min"] = cfg.p_min;
    j["p_max"] = cfg.p_max;
    j["f"] = cfg.f;
    j["precision"] = cfg.precision;
    j["depth"] = cfg.depth;
    j["samples"] = cfg.samples;
    j["vf_vmin"] = cfg.vf_vmin;
    j["vf_vmax"] = cfg.vf_vmax;
    j["vf_digits"] = cfg.vf_digits;
    j["zz_lo"] = cfg.zz_lo;
    j["zz_hi"] = cfg.zz_hi;
    j["seed"] = cfg.seed;
    ordered_json cs = ordered_json::array();
    for (const auto& c : cfg.c_vectors) {
        ordered_json v = ordered_json::array();
        for (const auto& r : c) v.push_back(to_string(r));
        cs.push_back(v);
    }
    j["c_vectors"] = cs;
    j["c_random"] = cfg.c_random;
    j["y_vars"] = cfg.y_vars;
    j["y_samples"] = cfg.y_samples;
    j["profile_polys"] = cfg.profile_polys;
    j["tolerance"] = cfg.tolerance;
    j["max_enum"] = cfg.limits.max_enum;
    j["max_characters"] = cfg.limits.max_characters;
    return j;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

} // namespace

std::string report_json(const RunManifest& m, const SweepConfig& cfg,
                        const TransferReport& rep) {
    ordered_json j;
    j["schema_version"] = 1;
    ordered_json mj;
    mj["command"] = m.command;
    mj["inputs"] = m.inputs;
    mj["version"] = m.version;
    mj["seed"] = m.seed;
    mj["timestamp"] = m.timestamp;
    j["manifest"] = mj;
    j["config"] = config_json(cfg);
    j["statement"] = rep.statement;
    j["ok"] = rep.ok;
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.rows) {
        ordered_json rj;
        rj["statement"] = r.statement;
        rj["p"] = r.p;
        rj["field"] = r.field;
        rj["depth"] = r.depth;
        rj["grid_size"] = r.grid_size;
        rj["hypothesis_ok"] = r.hypothesis_ok;
        rj["min_N"] = r.min_n;
        rj["violations"] = r.violations;
        rj["flags"] = r.flags;
        rj["detail"] = r.detail;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string report_csv(const TransferReport& rep) {
    std::string out = "statement,p,field,depth,grid_size,hypothesis_ok,min_N,violations,flags\n";
    for (const auto& r : rep.rows) {
        out += csv_escape(r.statement) + "," + std::to_string(r.p) + "," + r.field + "," +
               std::to_string(r.depth) + "," + std::to_string(r.grid_size) + "," +
               (r.hypothesis_ok ? "true" : "false") + "," + std::to_string(r.min_n) + "," +
               std::to_string(r.violations) + "," + csv_escape(r.flags) + "\n";
    }
    return out;
}

std::vector<std::string> write_report(const RunManifest& m, const SweepConfig& cfg,
                                      const TransferReport& rep, const std::string& dir,
                                      const std::string& stem, const std::string& format) {
    if (format != "json" && format != "csv" && format != "both")
        throw EvalError("unknown report format '" + format + "'");
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    auto emit = [&](const std::string& ext, const std::string& body) {
        std::filesystem::path p = std::filesystem::path(dir) / (stem + ext);
        std::ofstream os(p, std::ios::binary);
        if (!os) throw Error("cannot write " + p.string());
        os << body;
        paths.push_back(p.string());
    };
    if (format == "json" || format == "both") emit(".json", report_json(m, cfg, rep));
    if (format == "csv" || format == "both") emit(".csv", report_csv(rep));
    return paths;
}

} // namespace motx
