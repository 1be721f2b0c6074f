#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace parwb::csv {

// Locale-independent number formatting: '.' decimal separator, no grouping.
// Reals use up to 6 significant digits ("%.6g"), which is byte-stable across
// runs for the deterministic quantities emitted by the CLI.
std::string num(double v);
std::string num(std::int64_t v);
inline std::string num(int v) { return num(static_cast<std::int64_t>(v)); }
inline std::string num(std::size_t v) { return num(static_cast<std::int64_t>(v)); }

// Joins fields with ',' and appends a single LF.
std::string row(const std::vector<std::string>& fields);

}  // namespace parwb::csv
