#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lgd {

/// One row of the learning-curve table.
struct CurveRow {
  std::string method;
  long n_train = 0;
  double mean_mse = 0.0;
  double stderr_mse = 0.0;
  long n_tasks = 0;
  long diverged = 0;
};

inline constexpr const char* kResultsHeader = "method,n_train,mean_mse,stderr,n_tasks,diverged_count";

std::string format_results_csv(const std::vector<CurveRow>& rows);
/// Throws ParseError naming the 1-based line of the first malformed row, or on an empty body.
std::vector<CurveRow> parse_results_csv(const std::string& text);

/// Log-log learning curves, one series per method in order of first appearance,
/// with stderr whiskers. Output depends only on `rows`. Rows with a non-finite
/// or non-positive mean are skipped.
std::string render_curves_svg(const std::vector<CurveRow>& rows, const std::string& title = "");

void plot_curves(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path,
                 const std::string& title = "");

/// printf-style formatting used for every number written to CSV and SVG.
std::string format_number(double value, const char* spec = "%.10g");

}  // namespace lgd
