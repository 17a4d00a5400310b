#pragma once

#include <string>
#include <vector>

#include "lab/core.hpp"

namespace lab::report {

std::string format_double(double v);  // %.17g, deterministic

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void row(std::vector<std::string> r) { rows.push_back(std::move(r)); }
  std::string render() const;
};

struct SvgPlot {
  std::string name;
  std::string title;
  // one polyline per series: (x, y) points
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>
      series;
  std::string render() const;
};

struct ReportBundle {
  std::vector<CsvTable> tables;
  std::vector<SvgPlot> plots;
  std::vector<std::pair<std::string, std::string>> manifest;  // key, value
  bool contract_ok = true;
  std::vector<std::string> contract_notes;

  // Writes CSVs, optional SVGs and manifest.txt under dir.
  void write(const std::string& dir, bool with_svg) const;
};

}  // namespace lab::report
