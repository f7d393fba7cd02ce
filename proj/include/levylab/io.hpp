#pragma once

#include <filesystem>
#include <string>

namespace levylab {

/// Shortest round-trip-safe decimal form ("%.17g"), locale independent.
std::string format_double(double v);

/// Writes `contents` to `path` atomically enough for our purposes: a temp
/// file in the same directory is renamed over the destination.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace levylab
