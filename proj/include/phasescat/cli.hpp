#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasescat/field_matrix.hpp"
#include "phasescat/geometry.hpp"
#include "phasescat/phaseless.hpp"

// Experiment configuration, pipelines, the verification suite and reports.
namespace phasescat::cli {

using Vec2 = geometry::Vec2;

enum class RunKind { forward, measure, retrieve, discriminate, verify };

std::string to_string(RunKind kind);
RunKind run_kind_from_string(const std::string& name);

struct ArcSpec {
    Vec2 center{};
    double radius = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
    int points = 16;
};

struct LayoutSpec {
    ArcSpec gamma;
    ArcSpec sigma;
    std::optional<Vec2> z0;  // default_reference_source when absent
};

struct ExperimentConfig {
    std::string name;
    double k = 1.0;
    solver::Scatterer scatterer = oracles::DiskSpec::soft({0.0, 0.0}, 1.0);
    LayoutSpec layout;
    RunKind run = RunKind::forward;
    std::vector<std::string> checks;  // verify filter; empty runs every row
    std::optional<std::string> output_dir;
    std::uint64_t seed = 0;
    double tau_rel = phaseless::kDefaultTauRel;
    nlohmann::ordered_json echo;  // normalized document, reproduced in reports
};

/// Parses a JSON document. Syntax errors carry line and column; semantic
/// errors name the offending field, e.g. `wavenumber` or `layout.gamma.radius`.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Layout built from the spec; throws ConfigError for malformed arcs.
geometry::SourceReceiverLayout build_layout(const ExperimentConfig& config);

enum class CheckStatus { pass, fail, error };
std::string to_string(CheckStatus status);
CheckStatus check_status_from_string(const std::string& name);

struct CheckRow {
    std::string name;
    CheckStatus status = CheckStatus::error;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string comparator;  // "<=", ">", ">=" or "==" relating measured to tolerance
    std::string detail;
};

struct Artifact {
    std::string path;  // relative to the output directory
    std::string kind;  // field_csv, triple_csv, recovered_csv, report_json, checks_csv
};

struct RunReport {
    std::string run_id;
    RunKind kind = RunKind::forward;
    nlohmann::ordered_json config;
    std::uint64_t seed = 0;
    std::vector<CheckRow> checks;
    std::vector<Artifact> artifacts;
    std::vector<std::pair<std::string, double>> timings;  // seconds

    bool passed() const;
};

/// Named regression values stored as {"version": 1, "entries": {name: value}}.
class Baselines {
public:
    static Baselines load(const std::filesystem::path& path);  // empty when the file is absent
    void save(const std::filesystem::path& path) const;

    std::optional<double> get(const std::string& name) const;
    void set(const std::string& name, double value) { entries_[name] = value; }
    const std::map<std::string, double>& entries() const { return entries_; }

private:
    std::map<std::string, double> entries_;
};

inline constexpr double kBaselineFloor = 1e-3;
inline constexpr double kBaselineFraction = 0.5;

/// Pass threshold for a discrepancy expected to be positive.
double baseline_threshold(const std::optional<double>& recorded);

struct RunOptions {
    std::filesystem::path output_dir;
    std::filesystem::path baseline_path;
    bool record_baseline = false;
    std::optional<std::uint64_t> seed;  // overrides the config seed
    std::vector<std::string> checks;    // overrides the config filter
};

/// Resolution order: explicit flag, config output_dir, PHASESCAT_OUT, "phasescat-out".
std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag, const ExperimentConfig& config);

/// Executes the configured pipeline (or `kind` when given), writes data CSVs,
/// report.json and checks.csv atomically, and returns the report.
RunReport run(const ExperimentConfig& config, const RunOptions& options, std::optional<RunKind> kind = {});

/// Check rows in fixed order; every row is evaluated independently.
std::vector<CheckRow> verify_suite(const ExperimentConfig& config, std::uint64_t seed,
                                   const std::vector<std::string>& filter, Baselines& baselines, bool record);

/// Both triples over the first config's layout; discrepancy with r/s/t breakdown.
RunReport discriminate(const ExperimentConfig& a, const ExperimentConfig& b, const RunOptions& options);

/// Names of the verify rows in execution order.
const std::vector<std::string>& verify_check_names();

void write_checks_csv(std::ostream& os, const std::vector<CheckRow>& rows);
std::vector<CheckRow> read_checks_csv(std::istream& is);
nlohmann::ordered_json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::ordered_json& doc);

/// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace phasescat::cli
