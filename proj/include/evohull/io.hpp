#pragma once

#include <filesystem>
#include <string>

namespace evohull {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace evohull
