#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace wpflux {

struct Series {
  std::string name;
  std::vector<double> values;
  std::vector<double> error;  // optional symmetric error bars (SVG only)
  bool secondary_axis = false;
  bool dotted = false;
};

/// Columns sharing one abscissa.
struct SeriesCollection {
  std::string x_name = "t";
  std::vector<double> x;
  std::vector<Series> series;
  std::string title;
  std::string x_label = "t (dimensionless)";
  std::string y_label = "j (dimensionless)";
  std::string y2_label;

  void validate() const;
};

/// Shortest decimal form that reads back to the same double (17 significant
/// digits at most).
std::string format_double(double v);

/// UTF-8 CSV: header row, '.' decimal separator, full double precision.
void emit_csv(const SeriesCollection& data, const std::filesystem::path& path);

/// Reads a CSV written by emit_csv; the first column becomes x.
SeriesCollection read_csv(const std::filesystem::path& path);

/// Self-contained SVG line plot: one polyline per series, labelled axes,
/// legend, optional right-hand axis for secondary series.
void emit_svg(const SeriesCollection& data, const std::filesystem::path& path);

std::string render_svg(const SeriesCollection& data);

}  // namespace wpflux
