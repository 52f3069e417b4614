#pragma once

#include "pfc/geometry.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace pfc::cli {

/// printf %.17g: enough digits to round-trip any double.
std::string format_double(double v);

/// CSV with header time_index,node_index,value; one row per entry.
void write_series_csv(const std::filesystem::path& path, const std::vector<Eigen::VectorXd>& series);
std::vector<Eigen::VectorXd> read_series_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace pfc::cli
