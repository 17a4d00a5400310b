// Experiment runner CLI. Exit codes: 0 pass, 1 usage/config errors,
// 2 numerical contract violation.

#include <CLI11.hpp>
#include <cstdio>

#include "lab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical lab for Bergman kernels, Fubini-Study currents and "
               "random section zeros on model spaces"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false, no_cache = false, svg = false;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "path to the config file")
      ->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "master seed override")
      ->each([&](const std::string&) { have_seed = true; });
  run->add_flag("--no-cache", no_cache, "disable the ortho-basis cache");
  run->add_flag("--svg", svg, "emit best-effort SVG plots");

  std::string gc_dir;
  std::uint64_t max_bytes = 0;
  auto* gc = app.add_subcommand("cache-gc", "evict cached bases (LRU)");
  gc->add_option("--max-bytes", max_bytes, "byte budget")->required();
  gc->add_option("--dir", gc_dir, "cache directory (default resolution)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      lab::config::ExperimentConfig cfg =
          lab::config::parse_file(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (have_seed) cfg.seed = seed;
      if (svg) cfg.svg = true;
      const std::string cache =
          no_cache ? std::string() : lab::runner::default_cache_dir();
      const auto bundle = lab::runner::run(cfg, cache);
      for (const auto& note : bundle.contract_notes)
        std::fprintf(stderr, "contract: %s\n", note.c_str());
      if (!bundle.contract_ok) {
        std::fprintf(stderr, "FAIL %s %s\n", cfg.scenario.c_str(),
                     cfg.kind.c_str());
        return 2;
      }
      std::printf("ok %s %s -> %s\n", cfg.scenario.c_str(), cfg.kind.c_str(),
                  cfg.out_dir.c_str());
      return 0;
    }
    if (gc->parsed()) {
      const std::string dir =
          gc_dir.empty() ? lab::runner::default_cache_dir() : gc_dir;
      const auto rep = lab::runner::cache_gc(dir, max_bytes);
      std::printf("evicted %d entries (%llu bytes), %llu bytes remain\n",
                  rep.evicted, (unsigned long long)rep.evicted_bytes,
                  (unsigned long long)rep.remaining_bytes);
      return 0;
    }
  } catch (const lab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const lab::IoFailure& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 1;
  } catch (const lab::Error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  }
  return 1;
}
