#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lab/config.hpp"
#include "lab/report.hpp"
#include "lab/runner.hpp"

using namespace lab;
namespace fs = std::filesystem;

TEST_CASE("config: parse/emit round trip on the normalized form") {
  config::ExperimentConfig c;
  c.scenario = "nu-half";
  c.kind = "dim";
  c.p_list = {4, 8};
  c.seed = 42;
  c.samples = 500;
  c.has_weight_override = true;
  c.w_fs_coeff = 0.5;
  c.w_atoms = {{cplx(0.0, 0.0), 0.5}};
  c.region_boxes = {{-2.0, 0.0, 0.0, 2.0}};
  c.out_dir = "outdir";
  const std::string text = config::emit(c);
  const auto back = config::parse(text);
  CHECK(back == c);
  CHECK(config::emit(back) == text);
  CHECK(config::config_hash(back) == config::config_hash(c));
}

TEST_CASE("config: errors name the offending key") {
  CHECK_THROWS_WITH_AS(config::parse("[experiment]\nbogus = 1\n"),
                       doctest::Contains("experiment.bogus"), ConfigError);
  CHECK_THROWS_AS(config::parse("[nonsense]\n"), ConfigError);
  CHECK_THROWS_AS(config::parse("[experiment]\nscenario = what\n"),
                  ConfigError);
  CHECK_THROWS_AS(config::parse("[experiment]\nkind = what\n"), ConfigError);
  CHECK_THROWS_AS(config::parse("[experiment]\np_list = 1; 2\n"), ConfigError);
  CHECK_THROWS_AS(config::parse("just text\n"), ConfigError);
}

TEST_CASE("scenario resolution wires weights and volumes") {
  config::ExperimentConfig c;
  c.scenario = "nu-half";
  const auto sc = runner::resolve_scenario(c);
  REQUIRE(sc.weight.atoms.size() == 1);
  CHECK(sc.weight.atoms[0].nu == doctest::Approx(0.5));
  CHECK(sc.weight.smooth.fs_coeff == doctest::Approx(0.5));

  config::ExperimentConfig pv;
  pv.scenario = "poincare-vol";
  CHECK(runner::resolve_scenario(pv).volume.kind ==
        geom::VolumeDensity::Kind::Poincare);

  config::ExperimentConfig pr;
  pr.scenario = "atom-line";
  const auto scp = runner::resolve_scenario(pr);
  CHECK(scp.model == geom::ModelKind::ProductSphere);
  CHECK(scp.tweight.factor1.total_nu() == doctest::Approx(0.5));
}

TEST_CASE("dim experiment emits the filter table deterministically") {
  const std::string out1 =
      (fs::temp_directory_path() / "lab-out-a").string();
  const std::string out2 =
      (fs::temp_directory_path() / "lab-out-b").string();
  fs::remove_all(out1);
  fs::remove_all(out2);
  config::ExperimentConfig c;
  c.scenario = "nu-half";
  c.kind = "dim";
  c.p_list = {2, 4, 8};

  c.out_dir = out1;
  runner::run(c, "");
  c.out_dir = out2;
  runner::run(c, "");

  const auto slurp = [](const fs::path& pth) {
    std::ifstream in(pth, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  const std::string csv1 = slurp(fs::path(out1) / "nu-half-dim" / "dim.csv");
  const std::string csv2 = slurp(fs::path(out2) / "nu-half-dim" / "dim.csv");
  REQUIRE(!csv1.empty());
  CHECK(csv1 == csv2);
  // d_p = p + 1 - k_min per the filter oracle
  CHECK(csv1 == "p,d_p,k_min\n2,2,1\n4,3,2\n8,5,4\n");
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("cache-gc evicts oldest entries down to the budget") {
  const std::string dir = (fs::temp_directory_path() / "lab-gc").string();
  fs::remove_all(dir);
  fs::create_directories(dir);
  // three fake records, 64 bytes each, staggered mtimes
  for (int i = 0; i < 3; ++i) {
    std::ofstream out(fs::path(dir) / (std::to_string(i) + ".obc"),
                      std::ios::binary);
    std::string blob(64, char('a' + i));
    out << blob;
    out.close();
    fs::last_write_time(fs::path(dir) / (std::to_string(i) + ".obc"),
                        fs::file_time_type::clock::now() -
                            std::chrono::hours(24 * (3 - i)));
  }

  const auto none = runner::cache_gc(dir, 1 << 20);
  CHECK(none.evicted == 0);
  CHECK(none.remaining_bytes == 192);

  const auto some = runner::cache_gc(dir, 130);
  CHECK(some.evicted == 1);
  CHECK(some.remaining_bytes == 128);
  CHECK_FALSE(fs::exists(fs::path(dir) / "0.obc"));  // oldest went first

  const auto all = runner::cache_gc(dir, 0);
  CHECK(all.remaining_bytes == 0);
  CHECK(fs::exists(fs::path(dir) / "manifest.txt"));

  CHECK_THROWS_AS(runner::cache_gc(dir + "-missing", 10), IoFailure);
  fs::remove_all(dir);
}

TEST_CASE("report tables render headers and deterministic numbers") {
  report::CsvTable t;
  t.name = "x";
  t.header = {"a", "b"};
  t.row({report::format_double(1.5), report::format_double(1.0 / 3.0)});
  CHECK(t.render() == "a,b\n1.5,0.33333333333333331\n");
}
