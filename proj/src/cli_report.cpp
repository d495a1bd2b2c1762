#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "phasescat/cli.hpp"
#include "phasescat/csv.hpp"
#include "phasescat/errors.hpp"

namespace phasescat::cli {
namespace {

using ojson = nlohmann::ordered_json;

// CSV cells are unquoted, so commas and line breaks are replaced.
std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::error: return "error";
    }
    return "error";
}

CheckStatus check_status_from_string(const std::string& name) {
    if (name == "pass") return CheckStatus::pass;
    if (name == "fail") return CheckStatus::fail;
    if (name == "error") return CheckStatus::error;
    throw DataError("unknown check status '" + name + "'");
}

bool RunReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRow& r) { return r.status == CheckStatus::pass; });
}

double baseline_threshold(const std::optional<double>& recorded) {
    return recorded ? std::max(kBaselineFloor, kBaselineFraction * *recorded) : kBaselineFloor;
}

Baselines Baselines::load(const std::filesystem::path& path) {
    Baselines b;
    std::ifstream in(path);
    if (!in) return b;
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const ojson::parse_error& e) {
        throw DataError("baseline file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || doc.value("version", 0) != 1 || !doc.contains("entries") || !doc["entries"].is_object()) {
        throw DataError("baseline file " + path.string() + " lacks version 1 entries");
    }
    for (const auto& [name, value] : doc["entries"].items()) {
        if (!value.is_number()) throw DataError("baseline '" + name + "' is not a number");
        b.entries_[name] = value.get<double>();
    }
    return b;
}

void Baselines::save(const std::filesystem::path& path) const {
    ojson doc;
    doc["version"] = 1;
    doc["entries"] = ojson::object();
    for (const auto& [name, value] : entries_) doc["entries"][name] = value;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_file_atomic(path, doc.dump(2) + "\n");
}

std::optional<double> Baselines::get(const std::string& name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void write_checks_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
    os << "name,status,measured,tolerance,comparator,detail\n";
    for (const auto& r : rows) {
        os << r.name << ',' << to_string(r.status) << ',' << csv::format_double(r.measured) << ','
           << csv::format_double(r.tolerance) << ',' << r.comparator << ',' << sanitize(r.detail) << '\n';
    }
}

std::vector<CheckRow> read_checks_csv(std::istream& is) {
    std::vector<CheckRow> rows;
    for (const auto& cells : csv::read_table(is, {"name", "status", "measured", "tolerance", "comparator", "detail"})) {
        CheckRow r;
        r.name = cells[0];
        r.status = check_status_from_string(cells[1]);
        r.measured = csv::parse_double(cells[2]);
        r.tolerance = csv::parse_double(cells[3]);
        r.comparator = cells[4];
        r.detail = cells[5];
        rows.push_back(std::move(r));
    }
    return rows;
}

ojson report_to_json(const RunReport& report) {
    ojson doc;
    doc["run_id"] = report.run_id;
    doc["kind"] = to_string(report.kind);
    doc["status"] = report.passed() ? "pass" : "fail";
    doc["seed"] = report.seed;
    doc["config"] = report.config;
    doc["checks"] = ojson::array();
    for (const auto& r : report.checks) {
        doc["checks"].push_back({{"name", r.name},
                                 {"status", to_string(r.status)},
                                 {"measured", r.measured},
                                 {"tolerance", r.tolerance},
                                 {"comparator", r.comparator},
                                 {"detail", r.detail}});
    }
    doc["artifacts"] = ojson::array();
    for (const auto& a : report.artifacts) doc["artifacts"].push_back({{"path", a.path}, {"kind", a.kind}});
    doc["timings_s"] = ojson::object();
    for (const auto& [name, t] : report.timings) doc["timings_s"][name] = t;
    return doc;
}

RunReport report_from_json(const ojson& doc) {
    try {
        RunReport r;
        r.run_id = doc.at("run_id").get<std::string>();
        r.kind = run_kind_from_string(doc.at("kind").get<std::string>());
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.config = doc.at("config");
        for (const auto& c : doc.at("checks")) {
            r.checks.push_back({c.at("name").get<std::string>(), check_status_from_string(c.at("status").get<std::string>()),
                                c.at("measured").get<double>(), c.at("tolerance").get<double>(),
                                c.at("comparator").get<std::string>(), c.at("detail").get<std::string>()});
        }
        for (const auto& a : doc.at("artifacts")) {
            r.artifacts.push_back({a.at("path").get<std::string>(), a.at("kind").get<std::string>()});
        }
        for (const auto& [name, t] : doc.at("timings_s").items()) r.timings.emplace_back(name, t.get<double>());
        return r;
    } catch (const ojson::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace phasescat::cli
