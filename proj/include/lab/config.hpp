#pragma once

#include <map>
#include <string>
#include <vector>

#include "lab/core.hpp"
#include "lab/geom.hpp"

namespace lab::config {

// Sectioned plain-text key = value format; lists comma-separated, complex
// atoms/punctures as whitespace-separated number groups within one entry.
// parse(emit(c)) == c on the normalized form.

struct ExperimentConfig {
  std::string scenario = "fs-baseline";
  std::string kind = "bergman";  // dim|bergman|fscurrent|zeros|expectation|ma2|report-all
  std::vector<int> p_list = {4, 8, 16, 32};
  std::uint64_t seed = 1;
  int samples = 2000;

  bool has_weight_override = false;
  double w_fs_coeff = 1.0;
  double w_quad_coeff = 0.0;
  std::vector<geom::Atom> w_atoms;
  double w_eps = 0.0;
  std::vector<cplx> w_punctures;

  bool has_volume_override = false;
  std::string vol_kind = "fs";  // fs | poincare
  std::vector<cplx> vol_punctures;

  double grid_r0 = 0.5, grid_r1 = 2.0;
  int grid_nr = 10, grid_ntheta = 16;
  double grid_delta = 0.1;

  std::vector<std::array<double, 4>> region_boxes;  // s0 s1 t0 t1

  std::string out_dir = "out";
  bool svg = false;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse(const std::string& text);
ExperimentConfig parse_file(const std::string& path);
std::string emit(const ExperimentConfig& c);

std::uint64_t config_hash(const ExperimentConfig& c);

// Known scenario preset names.
const std::vector<std::string>& scenario_names();

}  // namespace lab::config
