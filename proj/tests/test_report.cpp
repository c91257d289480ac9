#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "motx/errors.hpp"
#include "motx/parser.hpp"
#include "motx/report.hpp"
#include "motx/transfer.hpp"

using namespace motx;

namespace {

ExpFunSpec fixture(const std::string& stem) {
    return parse_spec_file(std::string(MOTX_FIXTURE_DIR) + "/" + stem + ".spec");
}

// small real sweep so the report carries genuine rows
TransferReport sample_report() {
    SweepConfig cfg;
    cfg.p_min = 5;
    cfg.p_max = 7;
    cfg.samples = 4;
    cfg.seed = 9;
    ExpFunSpec h = fixture("ce_const");
    ExpFunSpec g = fixture("g_one");
    return check_bound_transfer(h, g, cfg);
}

RunManifest sample_manifest() {
    RunManifest m;
    m.command = "motx sweep --check bound ce_const.spec g_one.spec";
    m.inputs = {"ce_const.spec", "g_one.spec"};
    m.seed = 9;
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    return std::string(std::istreambuf_iterator<char>(is),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("csv output: exact header and row formatting") {
    TransferReport rep;
    rep.statement = "demo";
    ReportRow a;
    a.statement = "demo";
    a.p = 5;
    a.field = "eq";
    a.depth = 1;
    a.grid_size = 20;
    a.hypothesis_ok = true;
    a.min_n = 3;
    a.violations = 0;
    a.flags = "";
    ReportRow b;
    b.statement = "demo, quoted \"part\"";
    b.p = 7;
    b.field = "mixed";
    b.depth = 0;
    b.grid_size = 12;
    b.hypothesis_ok = false;
    b.min_n = 0;
    b.violations = 2;
    b.flags = "depth raised to 1; seed reused";
    rep.rows = {a, b};

    std::string csv = report_csv(rep);
    std::string expected =
        "statement,p,field,depth,grid_size,hypothesis_ok,min_N,violations,flags\n"
        "demo,5,eq,1,20,true,3,0,\n"
        "\"demo, quoted \"\"part\"\"\",7,mixed,0,12,false,0,2,depth raised to 1; seed reused\n";
    CHECK(csv == expected);
}

TEST_CASE("json output: schema version, manifest, config, rows") {
    TransferReport rep = sample_report();
    RunManifest m = sample_manifest();
    SweepConfig cfg;
    cfg.p_min = 5;
    cfg.p_max = 7;
    cfg.samples = 4;
    cfg.seed = 9;
    std::string text = report_json(m, cfg, rep);

    auto j = nlohmann::json::parse(text);
    CHECK(j["schema_version"] == 1);
    CHECK(j["manifest"]["command"] == m.command);
    CHECK(j["manifest"]["inputs"].size() == 2);
    CHECK(j["manifest"]["version"] == "0.1.0");
    CHECK(j["manifest"]["seed"] == 9);
    // default timestamp stays empty so reruns are reproducible
    CHECK(j["manifest"]["timestamp"] == "");
    CHECK(j["config"]["p_min"] == 5);
    CHECK(j["config"]["p_max"] == 7);
    CHECK(j["config"]["samples"] == 4);
    CHECK(j["config"]["seed"] == 9);
    CHECK(j["statement"] == rep.statement);
    CHECK(j["ok"] == rep.ok);
    REQUIRE(j["rows"].size() == rep.rows.size());
    const auto& r0 = j["rows"][0];
    CHECK(r0["statement"] == rep.rows[0].statement);
    CHECK(r0["p"] == rep.rows[0].p);
    CHECK(r0["field"] == rep.rows[0].field);
    CHECK(r0["min_N"] == rep.rows[0].min_n);
    CHECK(r0["violations"] == rep.rows[0].violations);
    CHECK(r0.contains("hypothesis_ok"));
    CHECK(r0.contains("grid_size"));
    CHECK(r0.contains("depth"));
    CHECK(r0.contains("flags"));
    CHECK(r0.contains("detail"));
    CHECK(text.back() == '\n');
}

TEST_CASE("identical manifest and config give byte-identical reports") {
    SweepConfig cfg;
    cfg.p_min = 5;
    cfg.p_max = 7;
    cfg.samples = 4;
    cfg.seed = 9;
    ExpFunSpec h = fixture("ce_const");
    ExpFunSpec g = fixture("g_one");

    // two independent end-to-end runs of the same sweep
    TransferReport r1 = check_bound_transfer(h, g, cfg);
    TransferReport r2 = check_bound_transfer(h, g, cfg);
    RunManifest m = sample_manifest();
    CHECK(report_json(m, cfg, r1) == report_json(m, cfg, r2));
    CHECK(report_csv(r1) == report_csv(r2));

    // a set timestamp is embedded verbatim and breaks equality
    RunManifest stamped = m;
    stamped.timestamp = "2026-08-14T12:00:00Z";
    CHECK(report_json(stamped, cfg, r1) != report_json(m, cfg, r1));
    CHECK(report_json(stamped, cfg, r1).find("2026-08-14T12:00:00Z") != std::string::npos);
}

TEST_CASE("write_report emits requested formats and reruns byte-identically") {
    namespace fs = std::filesystem;
    TransferReport rep = sample_report();
    RunManifest m = sample_manifest();
    SweepConfig cfg;
    cfg.p_min = 5;
    cfg.p_max = 7;
    cfg.samples = 4;
    cfg.seed = 9;

    fs::path dir = fs::temp_directory_path() / "motx_report_test";
    fs::remove_all(dir);

    auto paths = write_report(m, cfg, rep, dir.string(), "run", "both");
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].size() > 5);
    CHECK(paths[0].substr(paths[0].size() - 5) == ".json");
    CHECK(paths[1].substr(paths[1].size() - 4) == ".csv");
    std::string json1 = slurp(paths[0]);
    std::string csv1 = slurp(paths[1]);
    CHECK(json1 == report_json(m, cfg, rep));
    CHECK(csv1 == report_csv(rep));

    // overwrite with a rerun of the same manifest: bytes unchanged
    auto again = write_report(m, cfg, rep, dir.string(), "run", "both");
    CHECK(again == paths);
    CHECK(slurp(paths[0]) == json1);
    CHECK(slurp(paths[1]) == csv1);

    auto only_csv = write_report(m, cfg, rep, dir.string(), "solo", "csv");
    REQUIRE(only_csv.size() == 1);
    CHECK(only_csv[0].substr(only_csv[0].size() - 4) == ".csv");
    CHECK(!fs::exists(dir / "solo.json"));

    CHECK_THROWS_AS(write_report(m, cfg, rep, dir.string(), "run", "xml"), EvalError);
    fs::remove_all(dir);
}
