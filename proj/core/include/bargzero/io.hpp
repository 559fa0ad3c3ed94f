#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bargzero {

/// 17 significant digits, '.' decimal point; "nan"/"inf" for non-finite.
std::string csv_number(double v);

/// Joins fields with commas and appends a newline.
std::string csv_row(const std::vector<std::string>& fields);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace bargzero
