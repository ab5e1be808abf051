#include "wpflux/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "wpflux/errors.hpp"

namespace wpflux {

void SeriesCollection::validate() const {
  if (x.empty() || series.empty()) throw UsageError("nothing to emit: empty series collection");
  for (const auto& s : series) {
    if (s.values.size() != x.size()) {
      throw UsageError("series '" + s.name + "' length differs from the abscissa");
    }
    if (!s.error.empty() && s.error.size() != x.size()) {
      throw UsageError("series '" + s.name + "' error bars differ in length");
    }
    if (s.name.find_first_of(",\n\"") != std::string::npos) {
      throw UsageError("series name '" + s.name + "' contains a CSV delimiter");
    }
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path, int line) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw UsageError(path.string() + ":" + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void emit_csv(const SeriesCollection& data, const std::filesystem::path& path) {
  data.validate();
  auto out = open_for_write(path);
  out << data.x_name;
  for (const auto& s : data.series) out << ',' << s.name;
  out << '\n';
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    out << format_double(data.x[i]);
    for (const auto& s : data.series) out << ',' << format_double(s.values[i]);
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

SeriesCollection read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path.string() + ": empty CSV");
  const auto header = split_csv(line);
  if (header.size() < 2) throw UsageError(path.string() + ": need at least two columns");
  SeriesCollection data;
  data.x_name = header[0];
  for (std::size_t c = 1; c < header.size(); ++c) data.series.push_back({header[c], {}, {}});
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": column count mismatch");
    }
    data.x.push_back(parse_cell(cells[0], path, line_no));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      data.series[c - 1].values.push_back(parse_cell(cells[c], path, line_no));
    }
  }
  return data;
}

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    if (!valid()) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi == lo) {
      const double d = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
      lo -= d;
      hi += d;
    } else {
      const double d = 0.05 * (hi - lo);
      lo -= d;
      hi += d;
    }
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return ticks;
}

std::string tick_label(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const SeriesCollection& data) {
  data.validate();
  constexpr double width = 900.0;
  constexpr double height = 540.0;
  constexpr double left = 80.0;
  constexpr double right_margin = 80.0;
  constexpr double top = 50.0;
  constexpr double bottom = 60.0;
  const double plot_w = width - left - right_margin;
  const double plot_h = height - top - bottom;

  Range xr;
  Range yr;
  Range y2r;
  bool has_secondary = false;
  for (double v : data.x) xr.include(v);
  for (const auto& s : data.series) {
    Range& r = s.secondary_axis ? y2r : yr;
    has_secondary = has_secondary || s.secondary_axis;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double e = s.error.empty() ? 0.0 : s.error[i];
      r.include(s.values[i] - e);
      r.include(s.values[i] + e);
    }
  }
  if (xr.valid() && xr.hi == xr.lo) xr.pad();
  if (!xr.valid()) xr.pad();
  yr.pad();
  y2r.pad();

  auto px = [&](double v) { return left + (v - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double v, const Range& r) { return top + (r.hi - v) / (r.hi - r.lo) * plot_h; };

  std::ostringstream svg;
  svg.precision(6);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!data.title.empty()) {
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape_xml(data.title) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double v : nice_ticks(xr.lo, xr.hi)) {
    const double x = px(v);
    svg << "<line x1=\"" << x << "\" y1=\"" << top + plot_h << "\" x2=\"" << x << "\" y2=\""
        << top + plot_h + 5 << "\" stroke=\"black\"/>"
        << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << tick_label(v) << "</text>\n";
  }
  for (double v : nice_ticks(yr.lo, yr.hi)) {
    const double y = py(v, yr);
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
        << "\" stroke=\"black\"/>"
        << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << tick_label(v) << "</text>\n";
  }
  if (has_secondary) {
    for (double v : nice_ticks(y2r.lo, y2r.hi)) {
      const double y = py(v, y2r);
      svg << "<line x1=\"" << left + plot_w << "\" y1=\"" << y << "\" x2=\"" << left + plot_w + 5
          << "\" y2=\"" << y << "\" stroke=\"black\"/>"
          << "<text x=\"" << left + plot_w + 8 << "\" y=\"" << y + 4 << "\">" << tick_label(v)
          << "</text>\n";
    }
    svg << "<text transform=\"translate(" << width - 18 << ',' << top + plot_h / 2
        << ") rotate(90)\" text-anchor=\"middle\">" << escape_xml(data.y2_label) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 18
      << "\" text-anchor=\"middle\">" << escape_xml(data.x_label) << "</text>\n"
      << "<text transform=\"translate(22," << top + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(data.y_label) << "</text>\n";

  for (std::size_t s = 0; s < data.series.size(); ++s) {
    const auto& series = data.series[s];
    const Range& r = series.secondary_axis ? y2r : yr;
    const char* color = kPalette[s % std::size(kPalette)];
    if (!series.error.empty()) {
      svg << "<path stroke=\"" << color << "\" stroke-opacity=\"0.35\" fill=\"none\" d=\"";
      for (std::size_t i = 0; i < data.x.size(); ++i) {
        if (!std::isfinite(series.values[i]) || !std::isfinite(series.error[i])) continue;
        svg << 'M' << px(data.x[i]) << ',' << py(series.values[i] - series.error[i], r) << 'V'
            << py(series.values[i] + series.error[i], r);
      }
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (series.dotted) svg << " stroke-dasharray=\"2,3\"";
    svg << " points=\"";
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      if (!std::isfinite(series.values[i]) || !std::isfinite(data.x[i])) continue;
      svg << px(data.x[i]) << ',' << py(series.values[i], r) << ' ';
    }
    svg << "\"/>\n";
    const double ly = top + 16 + 16 * static_cast<double>(s);
    svg << "<line x1=\"" << left + plot_w - 170 << "\" y1=\"" << ly << "\" x2=\""
        << left + plot_w - 145 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"" << (series.dotted ? " stroke-dasharray=\"2,3\"" : "") << "/>"
        << "<text x=\"" << left + plot_w - 140 << "\" y=\"" << ly + 4 << "\">"
        << escape_xml(series.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg(const SeriesCollection& data, const std::filesystem::path& path) {
  const std::string text = render_svg(data);
  auto out = open_for_write(path);
  out << text;
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace wpflux
