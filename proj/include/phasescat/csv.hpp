#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Minimal CSV helpers shared by the field-matrix and triple formats.
namespace phasescat::csv {

/// Shortest round-trip form with 17 significant digits.
std::string format_double(double v);

/// Reads a header plus rows; the header must match `columns` (whitespace around
/// cells is ignored). Throws DataError on malformed input.
std::vector<std::vector<std::string>> read_table(std::istream& is, const std::vector<std::string>& columns);

double parse_double(const std::string& cell);
long parse_index(const std::string& cell);

}  // namespace phasescat::csv
