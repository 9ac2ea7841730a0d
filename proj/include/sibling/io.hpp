#pragma once
#include <string>

namespace sibling::io {

// Versioned CSV schema marker; downstream plotting scripts key off it.
inline constexpr const char* kCsvHeader = "# sibling-collector v1";

// Shortest round-trip decimal form; byte-stable for identical doubles.
std::string fmt(double v);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace sibling::io
