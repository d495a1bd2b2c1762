#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "phasescat/cli.hpp"
#include "phasescat/errors.hpp"

using namespace phasescat;
using namespace phasescat::cli;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "name": "small_disk",
  "wavenumber": 1.0,
  "scatterer": {"type": "disk", "bc": "soft", "radius": 1.0},
  "layout": {
    "gamma": {"center": [-3, 4], "radius": 2, "aperture_pi": [1, 2], "points": 8},
    "sigma": {"center": [3, 4], "radius": 2, "aperture_pi": [1, 2], "points": 8}
  },
  "run": "retrieve",
  "seed": 3
})";

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("phasescat-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string with(const std::string& from, const std::string& to) {
    std::string s = kSmall;
    const auto p = s.find(from);
    REQUIRE(p != std::string::npos);
    return s.replace(p, from.size(), to);
}

}  // namespace

TEST_CASE("config parsing fills defaults and echoes a normalized document") {
    const auto cfg = parse_config(kSmall);
    CHECK(cfg.name == "small_disk");
    CHECK(cfg.k == 1.0);
    CHECK(cfg.run == RunKind::retrieve);
    CHECK(cfg.seed == 3u);
    CHECK(cfg.layout.gamma.points == 8);
    CHECK(cfg.echo["layout"]["gamma"]["aperture"][1].get<double>() == doctest::Approx(2 * 3.141592653589793));
    CHECK(std::holds_alternative<oracles::DiskSpec>(cfg.scatterer));
    // The echo parses back to the same configuration.
    const auto again = parse_config(cfg.echo.dump());
    CHECK(again.echo == cfg.echo);

    const auto defaults = parse_config(R"({"wavenumber": 2.0, "scatterer": {"type": "obstacle"}})");
    CHECK(defaults.layout.gamma.radius == 1.0);
    CHECK(defaults.run == RunKind::forward);
    CHECK(std::holds_alternative<solver::SoftObstacle>(defaults.scatterer));
}

TEST_CASE("config errors name the offending field") {
    CHECK(config_error(with("\"wavenumber\": 1.0", "\"wavenumber\": -1")).find("`wavenumber`") != std::string::npos);
    CHECK(config_error(with("\"radius\": 1.0", "\"radius\": 0")).find("`scatterer.radius`") != std::string::npos);
    CHECK(config_error(with("\"points\": 8}", "\"points\": 1}")).find("`layout.gamma.points`") != std::string::npos);
    CHECK(config_error(with("\"run\": \"retrieve\"", "\"run\": \"fly\"")).find("`run`") != std::string::npos);
    CHECK(config_error(with("\"seed\": 3", "\"seed\": 3, \"colour\": 1")).find("`colour`") != std::string::npos);
    CHECK(config_error(with("\"bc\": \"soft\"", "\"bc\": \"neumann\"")).find("`scatterer.bc`") != std::string::npos);
    CHECK(config_error(R"({"scatterer": {"type": "disk"}})").find("`wavenumber`") != std::string::npos);

    const auto syntax = config_error("{\n  \"wavenumber\": 1.0,\n  \"name\": }\n");
    CHECK(syntax.find("line 3") != std::string::npos);
    CHECK(syntax.find("column") != std::string::npos);
}

TEST_CASE("layout construction reports admissibility and overlap") {
    auto cfg = parse_config(with("\"radius\": 2, \"aperture_pi\": [1, 2], \"points\": 8},\n    \"sigma\"",
                                 "\"radius\": 2.5, \"aperture_pi\": [1, 2], \"points\": 8},\n    \"sigma\""));
    CHECK_THROWS_AS(build_layout(cfg), AdmissibilityError);
    auto overlap = parse_config(with("\"center\": [3, 4]", "\"center\": [-1, 4]"));
    const auto layout = build_layout(overlap);
    const auto report = geometry::validate_layout(layout, solver::shape_of(overlap.scatterer));
    CHECK(report.summary().find("Ω̄ ∩ Ḡ = ∅") != std::string::npos);
}

TEST_CASE("baseline thresholds and storage") {
    CHECK(baseline_threshold(std::nullopt) == kBaselineFloor);
    CHECK(baseline_threshold(1e-4) == kBaselineFloor);
    CHECK(baseline_threshold(0.2) == doctest::Approx(0.1));
    const auto dir = scratch("baselines");
    Baselines b;
    b.set("discriminate/a|b", 0.25);
    b.save(dir / "b.json");
    const auto back = Baselines::load(dir / "b.json");
    CHECK(back.get("discriminate/a|b") == 0.25);
    CHECK_FALSE(back.get("missing").has_value());
    CHECK(Baselines::load(dir / "absent.json").entries().empty());
    std::ofstream(dir / "bad.json") << "{\"version\": 2}";
    CHECK_THROWS_AS(Baselines::load(dir / "bad.json"), DataError);
}

TEST_CASE("output directory resolution order") {
    auto cfg = parse_config(kSmall);
    ::unsetenv("PHASESCAT_OUT");
    CHECK(resolve_output_dir(std::nullopt, cfg) == fs::path("phasescat-out"));
    ::setenv("PHASESCAT_OUT", "/tmp/env-out", 1);
    CHECK(resolve_output_dir(std::nullopt, cfg) == fs::path("/tmp/env-out"));
    cfg.output_dir = "cfg-out";
    CHECK(resolve_output_dir(std::nullopt, cfg) == fs::path("cfg-out"));
    CHECK(resolve_output_dir(std::string("flag-out"), cfg) == fs::path("flag-out"));
    ::unsetenv("PHASESCAT_OUT");
}

TEST_CASE("checks CSV and report JSON round trips") {
    std::vector<CheckRow> rows = {{"a", CheckStatus::pass, 1e-13, 1e-12, "<=", ""},
                                  {"b", CheckStatus::fail, 0.5, 0.25, ">", "detail, with comma\nand newline"},
                                  {"c", CheckStatus::error, 0.0, 0.0, "", "boom"}};
    std::stringstream ss;
    write_checks_csv(ss, rows);
    const auto back = read_checks_csv(ss);
    REQUIRE(back.size() == 3);
    CHECK(back[1].status == CheckStatus::fail);
    CHECK(back[1].measured == 0.5);
    CHECK(back[1].detail == "detail; with comma and newline");
    CHECK(back[2].status == CheckStatus::error);

    RunReport r;
    r.run_id = "abc";
    r.kind = RunKind::verify;
    r.seed = 9;
    r.config = {{"name", "x"}};
    r.checks = rows;
    r.artifacts = {{"checks.csv", "checks_csv"}};
    r.timings = {{"total", 0.5}};
    const auto doc = report_to_json(r);
    CHECK(doc["status"] == "fail");
    const auto rb = report_from_json(doc);
    CHECK(report_to_json(rb) == doc);
    CHECK_THROWS_AS(report_from_json(nlohmann::ordered_json{{"run_id", 1}}), DataError);
}

TEST_CASE("retrieve runs are deterministic and write every artifact") {
    const auto cfg = parse_config(kSmall);
    RunOptions a, b;
    a.output_dir = scratch("det-a");
    b.output_dir = scratch("det-b");
    a.baseline_path = b.baseline_path = a.output_dir / "none.json";
    const auto ra = run(cfg, a);
    const auto rb = run(cfg, b);
    CHECK(ra.passed());
    CHECK(ra.run_id == rb.run_id);
    for (const char* f : {"triple.csv", "recovered.csv", "checks.csv"}) {
        REQUIRE(fs::exists(a.output_dir / f));
        CHECK(read_file(a.output_dir / f) == read_file(b.output_dir / f));
    }
    auto ja = nlohmann::ordered_json::parse(read_file(a.output_dir / "report.json"));
    auto jb = nlohmann::ordered_json::parse(read_file(b.output_dir / "report.json"));
    ja.erase("timings_s");
    jb.erase("timings_s");
    CHECK(ja == jb);
    CHECK(ja["config"] == cfg.echo);
    for (const auto& e : fs::directory_iterator(a.output_dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("verify rows run independently under a filter") {
    const auto cfg = parse_config(kSmall);
    Baselines none;
    const auto rows = verify_suite(cfg, 1, {"cross_term_identity", "admissibility_gate"}, none, false);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) CHECK(r.status == CheckStatus::pass);
    CHECK(verify_check_names().size() == 13);
}

TEST_CASE("discrimination compares triples on one layout") {
    const auto a = parse_config(kSmall);
    const auto b = parse_config(with("\"bc\": \"soft\"", "\"bc\": \"impedance\", \"lambda\": 1.0"));
    RunOptions o;
    o.output_dir = scratch("disc");
    o.baseline_path = o.output_dir / "none.json";
    const auto same = discriminate(a, a, o);
    CHECK(same.passed());
    const auto diff = discriminate(a, b, o);
    CHECK(diff.passed());
    CHECK(fs::exists(o.output_dir / "triple_b.csv"));
    const auto c = parse_config(with("\"wavenumber\": 1.0", "\"wavenumber\": 0.9"));
    CHECK_THROWS_WITH_AS(discriminate(a, c, o), doctest::Contains("layout mismatch"), ConfigError);
}
