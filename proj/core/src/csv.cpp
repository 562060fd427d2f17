#include "geoscale/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "geoscale/errors.hpp"

namespace geoscale {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view field, double& value) {
  if (field.empty()) {
    return false;
  }
  if (field.front() == '+') {
    field.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc{} && ptr == field.data() + field.size() && std::isfinite(value);
}

} // namespace

PointCloud read_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t line_number = 0;
  bool first_content_line = true;

  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);

    if (first_content_line) {
      first_content_line = false;
      columns = fields.size();
      double probe = 0.0;
      bool numeric = false;
      for (const auto field : fields) {
        numeric = numeric || parse_number(field, probe);
      }
      if (!numeric) {
        continue; // header row
      }
    }

    if (fields.size() != columns) {
      throw ParseError(line_number, std::min(fields.size(), columns) + 1,
                       "expected " + std::to_string(columns) + " fields, found " +
                           std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double value = 0.0;
      if (!parse_number(fields[c], value)) {
        throw ParseError(line_number, c + 1,
                         "not a finite number: '" + std::string(fields[c]) + "'");
      }
      values.push_back(value);
    }
    ++rows;
  }

  if (rows == 0) {
    throw ParseError(line_number + 1, 1, "no data rows");
  }
  if (rows < 2) {
    throw ParseError(line_number + 1, 1, "a point cloud needs at least 2 rows");
  }

  Matrix points(static_cast<Index>(rows), static_cast<Index>(columns));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns; ++c) {
      points(static_cast<Index>(r), static_cast<Index>(c)) = values[r * columns + c];
    }
  }
  return PointCloud(std::move(points));
}

PointCloud load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  return read_csv(in);
}

void write_csv(std::ostream& out, const PointCloud& cloud) {
  const Matrix& points = cloud.points();
  for (Index c = 0; c < points.cols(); ++c) {
    out << (c == 0 ? "" : ",") << 'x' << (c + 1);
  }
  out << '\n';

  char buffer[64];
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index c = 0; c < points.cols(); ++c) {
      const auto result = std::to_chars(buffer, buffer + sizeof(buffer), points(i, c),
                                        std::chars_format::general, 17);
      if (c > 0) {
        out << ',';
      }
      out.write(buffer, result.ptr - buffer);
    }
    out << '\n';
  }
}

void save_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ostringstream out;
  write_csv(out, cloud);
  write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + temp.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      throw IoError("failed writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw IoError("cannot move '" + temp.string() + "' to '" + path.string() + "'");
  }
}

} // namespace geoscale
