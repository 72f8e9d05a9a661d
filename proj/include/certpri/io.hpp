#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace certpri {

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace certpri
