#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bnn {

/// Decimal with 17 significant digits; parses back to the same double.
std::string format_double(double v);

/// Whole-string parse; accepts "inf", "-inf" and "nan". Returns false on any
/// trailing characters.
bool parse_double(std::string_view text, double& out);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace bnn
