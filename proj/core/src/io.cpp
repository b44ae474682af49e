#include "kickrot/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kickrot/params.hpp"

namespace kickrot::io {

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InvalidParameter("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(idx));
  return out;
}

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != header.size()) throw std::logic_error("CSV row width does not match header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv(const CsvTable& table, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

double parse_number(const std::string& field) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw InvalidParameter("bad CSV number '" + field + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      t.header = split(line);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& f : split(line)) row.push_back(parse_number(f));
    if (row.size() != t.header.size()) throw InvalidParameter("CSV row width does not match header");
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw InvalidParameter("CSV has no header");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

CsvTable stats_table(const MomentumStats& stats) {
  CsvTable t;
  t.header = {"kick", "mean_shift", "current", "sem", "second_moment", "variance"};
  const auto& s = stats.series;
  for (std::size_t k = 0; k < s.size(); ++k)
    t.add_row({static_cast<double>(k + 1), s.mean_shift[k], s.current[k], s.sem[k], s.second_moment[k],
               s.variance[k]});
  return t;
}

CsvTable histogram_table(const Histogram& histogram) {
  CsvTable t;
  t.header = {"bin_lo", "bin_hi", "center", "weight", "mean"};
  for (const auto& [k, bin] : histogram.bins())
    t.add_row({histogram.bin_lo(k), histogram.bin_hi(k), histogram.bin_center(k), bin.weight,
               bin.weight > 0.0 ? bin.moment / bin.weight : histogram.bin_center(k)});
  return t;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 30, kTop = 40, kBottom = 60;

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  struct Loaded {
    std::vector<double> x, y, err;
  };
  std::vector<Loaded> data;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : spec.series) {
    const auto table = read_csv(s.csv);
    Loaded d;
    d.x = table.column(s.x);
    d.y = table.column(s.y);
    if (!s.err.empty()) d.err = table.column(s.err);
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      double y = d.y[i];
      const double e = d.err.empty() ? 0.0 : d.err[i];
      if (spec.log_y) {
        if (!(y > 0.0)) continue;
        y = std::log10(y);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      } else {
        ymin = std::min(ymin, y - e);
        ymax = std::max(ymax, y + e);
      }
      xmin = std::min(xmin, d.x[i]);
      xmax = std::max(xmax, d.x[i]);
    }
    data.push_back(std::move(d));
  }
  if (!(xmax > xmin)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(xmin, xmax)) {
    o << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fmt(sx(t)) << "\" y2=\""
      << kTop + ph + 5 << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
      << format_number(t) << "</text>\n";
  }
  for (double t : nice_ticks(ymin, ymax)) {
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << kLeft << "\" y2=\"" << fmt(sy(t))
      << "\" stroke=\"black\"/>";
    const std::string label = spec.log_y ? "1e" + format_number(t) : format_number(t);
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(sy(t) + 4) << "\" text-anchor=\"end\">" << label
      << "</text>\n";
  }
  if (ymin < 0.0 && ymax > 0.0 && !spec.log_y)
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(sy(0)) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << fmt(sy(0))
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
    << esc(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << kTop + ph / 2 << ")\">" << esc(spec.y_label) << "</text>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const auto& d = data[si];
    std::string points;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      double y = d.y[i];
      if (spec.log_y) {
        if (!(y > 0.0)) continue;
        y = std::log10(y);
      }
      points += fmt(sx(d.x[i])) + "," + fmt(sy(y)) + " ";
      if (s.markers)
        o << "<circle cx=\"" << fmt(sx(d.x[i])) << "\" cy=\"" << fmt(sy(y)) << "\" r=\"3\" fill=\"" << s.color
          << "\"/>\n";
      if (!d.err.empty() && !spec.log_y && d.err[i] > 0.0)
        o << "<line x1=\"" << fmt(sx(d.x[i])) << "\" y1=\"" << fmt(sy(y - d.err[i])) << "\" x2=\""
          << fmt(sx(d.x[i])) << "\" y2=\"" << fmt(sy(y + d.err[i])) << "\" stroke=\"" << s.color << "\"/>\n";
    }
    if (s.line && !points.empty())
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << points
        << "\"/>\n";
    const double ly = kTop + 16 + 16 * static_cast<double>(si);
    o << "<line x1=\"" << kLeft + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + 30 << "\" y2=\"" << ly - 4
      << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>";
    o << "<text x=\"" << kLeft + 36 << "\" y=\"" << ly << "\">" << esc(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace kickrot::io
