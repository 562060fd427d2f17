#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "geoscale/point_cloud.hpp"

namespace geoscale {

/// Parses a rectangular numeric CSV, one point per row. A first row that
/// does not parse as numbers is treated as a header. Throws ParseError with
/// the 1-based (row, column) of the first offending cell.
PointCloud read_csv(std::istream& in);
PointCloud load_csv(const std::filesystem::path& path);

/// Writes a header row x1..xr followed by one row per point, every value
/// with 17 significant digits so that read_csv(write_csv(c)) == c.
void write_csv(std::ostream& out, const PointCloud& cloud);
void save_csv(const PointCloud& cloud, const std::filesystem::path& path);

/// Writes `contents` to `path` through a sibling temporary file and an
/// atomic rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace geoscale
