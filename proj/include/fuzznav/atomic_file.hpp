#pragma once

#include <filesystem>
#include <string_view>

namespace fuzznav::cli {

/// Writes to a sibling temporary file, then renames it over path, so readers
/// see either the old file or the complete new one. Throws
/// std::filesystem::filesystem_error or std::runtime_error.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace fuzznav::cli
