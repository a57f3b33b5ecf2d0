#include "graphtest/io.hpp"

#include "graphtest/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace graphtest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

PointSample parse_points_csv(const std::string& text, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw InvalidInputError(source + ":" + std::to_string(line_no) + ": cannot parse '" +
                                std::string(field) + "' as a number");
      if (!std::isfinite(value))
        throw InvalidInputError(source + ":" + std::to_string(line_no) + ": non-finite value");
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInputError(source + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(rows.front().size()) + " columns, got " +
                              std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInputError(source + ": no points");
  Matrix points(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      points(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return PointSample(std::move(points));
}

PointSample read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_points_csv(text.str(), path.string());
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_points_csv(std::ostream& out, const Matrix& points) {
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (j) out << ',';
      out << format_number(points(i, j));
    }
    out << '\n';
  }
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  write(out);
  save_text(path, out.str());
}

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 30.0;

struct Frame {
  double x0, x1, y0, y1;
  double sx(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double sy(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

Frame padded(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) { x0 -= 1.0; x1 += 1.0; }
  if (!(y1 > y0)) { y0 -= 1.0; y1 += 1.0; }
  const double px = 0.05 * (x1 - x0);
  const double py = 0.05 * (y1 - y0);
  return {x0 - px, x1 + px, y0 - py, y1 + py};
}

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kMargin << "\" y=\"18\" font-size=\"13\">" << title << "</text>\n";
}

}  // namespace

std::string svg_scatter(const std::vector<ScatterSeries>& series, const std::string& title) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.points.rows() == 0) continue;
    x0 = std::min(x0, s.points.col(0).minCoeff());
    x1 = std::max(x1, s.points.col(0).maxCoeff());
    const Index yc = s.points.cols() > 1 ? 1 : 0;
    y0 = std::min(y0, s.points.col(yc).minCoeff());
    y1 = std::max(y1, s.points.col(yc).maxCoeff());
  }
  if (!std::isfinite(x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;
  const Frame f = padded(x0, x1, y0, y1);
  std::ostringstream out;
  open_svg(out, title);
  double legend_y = 34.0;
  for (const auto& s : series) {
    const Index yc = s.points.cols() > 1 ? 1 : 0;
    for (Index i = 0; i < s.points.rows(); ++i)
      out << "<circle cx=\"" << f.sx(s.points(i, 0)) << "\" cy=\"" << f.sy(s.points(i, yc))
          << "\" r=\"2\" fill=\"" << s.colour << "\" fill-opacity=\"0.6\"/>\n";
    out << "<text x=\"" << kWidth - 120 << "\" y=\"" << legend_y << "\" font-size=\"11\" fill=\""
        << s.colour << "\">" << s.label << "</text>\n";
    legend_y += 14.0;
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_polyline(const std::vector<double>& ys, const std::string& title) {
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (double y : ys) y0 = std::min(y0, y), y1 = std::max(y1, y);
  if (ys.empty()) y0 = 0.0, y1 = 1.0;
  const Frame f = padded(0.0, static_cast<double>(std::max<std::size_t>(ys.size(), 2) - 1), y0, y1);
  std::ostringstream out;
  open_svg(out, title);
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < ys.size(); ++i)
    out << f.sx(static_cast<double>(i)) << ',' << f.sy(ys[i]) << ' ';
  out << "\"/>\n</svg>\n";
  return out.str();
}

}  // namespace graphtest
