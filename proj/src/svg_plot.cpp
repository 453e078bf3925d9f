#include "lgd/svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lgd/error.hpp"

namespace lgd {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, std::size_t line, const char* column) {
  const std::string s = text;
  if (s == "nan" || s == "NaN") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ParseError("results csv line " + std::to_string(line) + ": column '" + column + "' is not a number: '" + s +
                     "'");
  }
  return v;
}

long parse_long(const std::string& s, std::size_t line, const char* column) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("results csv line " + std::to_string(line) + ": column '" + column +
                     "' is not an integer: '" + s + "'");
  }
  return v;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string px(double v) { return format_number(v, "%.2f"); }

struct Axis {
  double lo = 0.0;  // log10 bounds
  double hi = 1.0;
  double pixel_lo = 0.0;
  double pixel_hi = 1.0;

  double map(double value) const {
    return pixel_lo + (std::log10(value) - lo) / (hi - lo) * (pixel_hi - pixel_lo);
  }
};

Axis decade_axis(double min_value, double max_value, double pixel_lo, double pixel_hi) {
  Axis axis{std::floor(std::log10(min_value)), std::ceil(std::log10(max_value)), pixel_lo, pixel_hi};
  if (axis.hi <= axis.lo) axis.hi = axis.lo + 1.0;
  return axis;
}

}  // namespace

std::string format_number(double value, const char* spec) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

std::string format_results_csv(const std::vector<CurveRow>& rows) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const CurveRow& r : rows) {
    out += r.method + "," + std::to_string(r.n_train) + "," + format_number(r.mean_mse) + "," +
           format_number(r.stderr_mse) + "," + std::to_string(r.n_tasks) + "," + std::to_string(r.diverged) + "\n";
  }
  return out;
}

std::vector<CurveRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("results csv: empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) {
    throw ParseError("results csv line 1: expected header '" + std::string(kResultsHeader) + "'");
  }
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) {
      throw ParseError("results csv line " + std::to_string(line_no) + ": expected 6 fields, got " +
                       std::to_string(f.size()));
    }
    if (f[0].empty()) throw ParseError("results csv line " + std::to_string(line_no) + ": empty method name");
    rows.push_back({f[0], parse_long(f[1], line_no, "n_train"), parse_double(f[2], line_no, "mean_mse"),
                    parse_double(f[3], line_no, "stderr"), parse_long(f[4], line_no, "n_tasks"),
                    parse_long(f[5], line_no, "diverged_count")});
    if (rows.back().n_train < 1) {
      throw ParseError("results csv line " + std::to_string(line_no) + ": n_train must be >= 1");
    }
  }
  if (rows.empty()) throw ParseError("results csv: no data rows after the header");
  return rows;
}

std::string render_curves_svg(const std::vector<CurveRow>& rows, const std::string& title) {
  std::vector<std::string> methods;
  std::map<std::string, std::vector<const CurveRow*>> series;
  double y_min = INFINITY, y_max = 0.0;
  long x_min = 0, x_max = 0;
  for (const CurveRow& r : rows) {
    if (!std::isfinite(r.mean_mse) || r.mean_mse <= 0.0) continue;
    if (!series.count(r.method)) methods.push_back(r.method);
    series[r.method].push_back(&r);
    const double se = std::isfinite(r.stderr_mse) ? std::max(r.stderr_mse, 0.0) : 0.0;
    const double low = r.mean_mse - se > 0.0 ? r.mean_mse - se : r.mean_mse;
    y_min = std::min(y_min, low);
    y_max = std::max(y_max, r.mean_mse + se);
    x_min = x_min == 0 ? r.n_train : std::min(x_min, r.n_train);
    x_max = std::max(x_max, r.n_train);
  }
  if (methods.empty()) throw ConfigError("plot: no rows with a positive finite mean");

  const Axis xa = decade_axis(static_cast<double>(x_min), static_cast<double>(x_max), kLeft, kWidth - kRight);
  const Axis ya = decade_axis(y_min, y_max, kHeight - kBottom, kTop);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\"" << px(kHeight)
      << "\" viewBox=\"0 0 " << px(kWidth) << ' ' << px(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << px(kWidth) << "\" height=\"" << px(kHeight) << "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << px((kLeft + kWidth - kRight) / 2) << "\" y=\"24.00\" text-anchor=\"middle\" font-size=\"14\">"
        << escape_xml(title) << "</text>\n";
  }

  // Grid and ticks: decades on the loss axis, data values on the n_train axis.
  for (int e = static_cast<int>(ya.lo); e <= static_cast<int>(ya.hi); ++e) {
    const double v = std::pow(10.0, e);
    const double y = ya.map(v);
    svg << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(y) << "\" x2=\"" << px(kWidth - kRight) << "\" y2=\""
        << px(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  std::vector<long> xs;
  for (const CurveRow& r : rows) {
    if (std::isfinite(r.mean_mse) && r.mean_mse > 0.0) xs.push_back(r.n_train);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (long n : xs) {
    const double x = xa.map(static_cast<double>(n));
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << px(kHeight - kBottom) << "\" x2=\"" << px(x) << "\" y2=\""
        << px(kHeight - kBottom + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(x) << "\" y=\"" << px(kHeight - kBottom + 18) << "\" text-anchor=\"middle\">" << n
        << "</text>\n";
  }
  svg << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(kWidth - kLeft - kRight)
      << "\" height=\"" << px(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << px((kLeft + kWidth - kRight) / 2) << "\" y=\"" << px(kHeight - 16)
      << "\" text-anchor=\"middle\">training samples per task</text>\n";
  svg << "<text x=\"20.00\" y=\"" << px((kTop + kHeight - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20.00 "
      << px((kTop + kHeight - kBottom) / 2) << ")\">validation MSE</text>\n";

  for (std::size_t s = 0; s < methods.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    auto points = series[methods[s]];
    std::stable_sort(points.begin(), points.end(),
                     [](const CurveRow* a, const CurveRow* b) { return a->n_train < b->n_train; });
    svg << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    if (points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) svg << ' ';
        svg << px(xa.map(static_cast<double>(points[i]->n_train))) << ',' << px(ya.map(points[i]->mean_mse));
      }
      svg << "\"/>\n";
    }
    for (const CurveRow* p : points) {
      const double x = xa.map(static_cast<double>(p->n_train));
      const double se = std::isfinite(p->stderr_mse) ? std::max(p->stderr_mse, 0.0) : 0.0;
      if (se > 0.0) {
        const double lo = p->mean_mse - se > 0.0 ? p->mean_mse - se : p->mean_mse;
        const double y_lo = ya.map(lo), y_hi = ya.map(p->mean_mse + se);
        svg << "<line x1=\"" << px(x) << "\" y1=\"" << px(y_lo) << "\" x2=\"" << px(x) << "\" y2=\"" << px(y_hi)
            << "\"/>\n";
        svg << "<line x1=\"" << px(x - 4) << "\" y1=\"" << px(y_lo) << "\" x2=\"" << px(x + 4) << "\" y2=\""
            << px(y_lo) << "\"/>\n";
        svg << "<line x1=\"" << px(x - 4) << "\" y1=\"" << px(y_hi) << "\" x2=\"" << px(x + 4) << "\" y2=\""
            << px(y_hi) << "\"/>\n";
      }
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << px(ya.map(p->mean_mse)) << "\" r=\"3.00\"/>\n";
    }
    svg << "</g>\n";
    const double ly = kTop + 10.0 + 20.0 * static_cast<double>(s);
    const double lx = kWidth - kRight + 15.0;
    svg << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(lx + 20) << "\" y2=\"" << px(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << px(lx + 26) << "\" y=\"" << px(ly + 4) << "\">" << escape_xml(methods[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void plot_curves(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path,
                 const std::string& title) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open '" + csv_path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string svg = render_curves_svg(parse_results_csv(buffer.str()), title);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + svg_path.string() + "' for writing");
  out << svg;
}

}  // namespace lgd
