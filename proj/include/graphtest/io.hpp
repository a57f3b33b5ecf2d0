#pragma once

#include "graphtest/geometry.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace graphtest {

// Headerless CSV, one point per row, comma-separated decimals. IoError when
// the file cannot be opened, InvalidInputError on malformed content.
PointSample read_points_csv(const std::filesystem::path& path);
PointSample parse_points_csv(const std::string& text, const std::string& source = "<string>");

void write_points_csv(std::ostream& out, const Matrix& points);

// Shortest decimal form that round-trips.
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
};

struct ScatterSeries {
  Matrix points;  // first two columns are plotted
  std::string colour;
  std::string label;
};

std::string svg_scatter(const std::vector<ScatterSeries>& series, const std::string& title);
std::string svg_polyline(const std::vector<double>& ys, const std::string& title);

void save_text(const std::filesystem::path& path, const std::string& text);

}  // namespace graphtest
