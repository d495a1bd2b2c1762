#include "phasescat/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>

#include "phasescat/errors.hpp"

namespace phasescat::csv {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::vector<std::string>> read_table(std::istream& is, const std::vector<std::string>& columns) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("CSV input is empty");
    if (split(line) != columns) throw DataError("unexpected CSV header: " + trim(line));
    std::vector<std::vector<std::string>> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (cells.size() != columns.size()) {
            throw DataError("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(columns.size()));
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

double parse_double(const std::string& cell) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
        throw DataError("not a number in CSV: '" + cell + "'");
    }
    return v;
}

long parse_index(const std::string& cell) {
    char* end = nullptr;
    const long v = std::strtol(cell.c_str(), &end, 10);
    if (cell.empty() || end != cell.c_str() + cell.size() || v < 0) {
        throw DataError("not an index in CSV: '" + cell + "'");
    }
    return v;
}

}  // namespace phasescat::csv
