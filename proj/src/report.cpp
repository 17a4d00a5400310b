#include "lab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lab::report {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvTable::render() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << "\n";
  }
  return out.str();
}

std::string SvgPlot::render() const {
  const double W = 640, H = 420, m = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [name, pts] : series)
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const auto X = [&](double x) {
    return m + (W - 2 * m) * (x - xmin) / (xmax - xmin);
  };
  const auto Y = [&](double y) {
    return H - m - (H - 2 * m) * (y - ymin) / (ymax - ymin);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">"
      << title << "</text>\n";
  out << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m
      << "\" y2=\"" << H - m << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m
      << "\" y2=\"" << H - m << "\" stroke=\"black\"/>\n";
  int ci = 0;
  double legend_y = m;
  for (const auto& [sname, pts] : series) {
    const char* col = colors[ci % 6];
    out << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
    for (const auto& [x, y] : pts) out << X(x) << "," << Y(y) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << W - m + 4 << "\" y=\"" << legend_y
        << "\" fill=\"" << col << "\" font-size=\"11\">" << sname
        << "</text>\n";
    legend_y += 14;
    ++ci;
  }
  out << "</svg>\n";
  return out.str();
}

void ReportBundle::write(const std::string& dir, bool with_svg) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure("report: cannot create " + dir);
  for (const auto& t : tables) {
    std::ofstream out(fs::path(dir) / (t.name + ".csv"),
                      std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("report: cannot write " + t.name + ".csv");
    out << t.render();
  }
  if (with_svg) {
    for (const auto& p : plots) {
      std::ofstream out(fs::path(dir) / (p.name + ".svg"),
                        std::ios::binary | std::ios::trunc);
      if (!out) throw IoFailure("report: cannot write " + p.name + ".svg");
      out << p.render();
    }
  }
  std::ofstream out(fs::path(dir) / "manifest.txt",
                    std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("report: cannot write manifest.txt");
  for (const auto& [k, v] : manifest) out << k << " = " << v << "\n";
}

}  // namespace lab::report
