#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kickrot/stats.hpp"

namespace kickrot::io {

/// Numeric table with a fixed column order. Values are written with 12
/// significant digits so identical runs produce identical bytes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  void add_row(std::vector<double> row);
};

std::string format_number(double v);
std::string to_csv(const CsvTable& table, const std::vector<std::string>& comments = {});
/// Parses a table written by to_csv; lines starting with '#' are skipped.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, so readers never see a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

CsvTable stats_table(const MomentumStats& stats);
CsvTable histogram_table(const Histogram& histogram);

struct PlotSeries {
  std::filesystem::path csv;  // sibling CSV the data is read from
  std::string x;
  std::string y;
  std::string err;  // optional error-bar column
  std::string label;
  std::string color = "#1f77b4";
  bool line = true;
  bool markers = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

/// Renders a plain SVG (axes, ticks, polylines, markers, legend) using only
/// the data in the referenced CSV files.
std::string render_svg(const PlotSpec& spec);

}  // namespace kickrot::io
