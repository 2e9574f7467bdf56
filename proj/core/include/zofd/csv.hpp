#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace zofd::csv {

/// Shortest round-trip-safe text for a double ("%.17g").
std::string format_double(double value);

/// Writes one comma-joined line terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Writes through a temporary file next to `path` and renames it into place.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& body);

/// Splits on commas; no quoting (fields never contain commas).
std::vector<std::string> split(std::string_view line);

}  // namespace zofd::csv
