#pragma once

#include <string>

#include "lab/config.hpp"
#include "lab/currents.hpp"
#include "lab/report.hpp"

namespace lab::runner {

// Scenario presets: concrete weight/volume data for both models.
struct Scenario {
  geom::ModelKind model = geom::ModelKind::Sphere;
  geom::SingularWeight weight;
  geom::VolumeDensity volume;
  geom::ToricWeight tweight;
  geom::ToricVolume tvolume;
};

Scenario resolve_scenario(const config::ExperimentConfig& c);

// Default cache directory: $LAB_CACHE_DIR, else ./.lab-cache.
std::string default_cache_dir();

// Executes the configured experiment and writes the bundle under
// c.out_dir/<scenario>-<kind>. Empty cache_dir disables the cache.
report::ReportBundle run(const config::ExperimentConfig& c,
                         const std::string& cache_dir);

// Scale a current by s (atoms, densities and declared mass alike).
currents::CurrentMeasure scaled(const currents::CurrentMeasure& c, double s);

struct GcReport {
  int evicted = 0;
  std::uint64_t evicted_bytes = 0;
  std::uint64_t remaining_bytes = 0;
};

// Least-recently-used eviction down to max_bytes; rewrites the cache
// manifest. Throws IoFailure when the directory is missing.
GcReport cache_gc(const std::string& dir, std::uint64_t max_bytes);

}  // namespace lab::runner
