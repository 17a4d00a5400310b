#include "lab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>

#include "lab/bergman.hpp"
#include "lab/random.hpp"

namespace lab::runner {

namespace fs = std::filesystem;
using report::format_double;

std::string default_cache_dir() {
  if (const char* env = std::getenv("LAB_CACHE_DIR")) return env;
  return ".lab-cache";
}

Scenario resolve_scenario(const config::ExperimentConfig& c) {
  Scenario s;
  const std::string& name = c.scenario;
  if (name == "fs-baseline") {
    s.weight = geom::fs_weight();
  } else if (name == "nu-third") {
    s.weight = geom::atom_weight(1.0 / 3.0);
  } else if (name == "nu-half") {
    s.weight = geom::atom_weight(0.5);
  } else if (name == "nu-one") {
    s.weight = geom::atom_weight(1.0);
  } else if (name == "poincare-vol") {
    s.weight = geom::fs_weight();
    s.volume = geom::poincare_volume({cplx(0.0, 0.0)});
  } else if (name == "product-fs") {
    s.model = geom::ModelKind::ProductSphere;
  } else if (name == "atom-line") {
    s.model = geom::ModelKind::ProductSphere;
    s.tweight.factor1 = geom::atom_weight(0.5);
  } else if (name == "custom") {
    if (!c.has_weight_override && !c.has_volume_override)
      throw ConfigError("scenario 'custom' needs [weight] or [volume]");
  } else {
    throw ConfigError("unknown scenario: " + name);
  }

  if (c.has_weight_override) {
    geom::SingularWeight w;
    w.smooth.fs_coeff = c.w_fs_coeff;
    w.smooth.quad_coeff = c.w_quad_coeff;
    w.atoms = c.w_atoms;
    w.punctures = c.w_punctures;
    if (c.w_eps > 0.0)
      w = geom::apply_poincare_perturbation(w, c.w_eps);
    s.weight = w;
  }
  if (c.has_volume_override) {
    s.volume = (c.vol_kind == "poincare")
                   ? geom::poincare_volume(c.vol_punctures)
                   : geom::fs_volume();
  }
  return s;
}

currents::CurrentMeasure scaled(const currents::CurrentMeasure& c, double s) {
  currents::CurrentMeasure out = c;
  for (auto& [pt, m] : out.atoms) m *= s;
  out.atom_at_infinity *= s;
  auto d0 = c.density0;
  auto di = c.densityinf;
  out.density0 = [d0, s](cplx z) { return s * d0(z); };
  out.densityinf = [di, s](cplx z) { return s * di(z); };
  out.declared_mass *= s;
  return out;
}

namespace {

std::string verdict_str(bool v) { return v ? "pass" : "fail"; }

// ---- experiment bodies -----------------------------------------------------

void run_dim(const config::ExperimentConfig& c, const Scenario& sc,
             report::ReportBundle& out) {
  report::CsvTable t;
  t.name = "dim";
  if (sc.model == geom::ModelKind::Sphere) {
    t.header = {"p", "d_p", "k_min"};
    for (int p : c.p_list) {
      const auto space = l2::integrability_filter(p, sc.weight, sc.volume);
      t.row({std::to_string(p), std::to_string(space.d()),
             std::to_string(space.k_min())});
    }
  } else {
    t.header = {"p", "d_p", "k_min_1", "k_min_2"};
    for (int p : c.p_list) {
      const auto space = l2::product_filter(p, sc.tweight, sc.tvolume);
      t.row({std::to_string(p), std::to_string(space.s1.d() * space.s2.d()),
             std::to_string(space.s1.k_min()),
             std::to_string(space.s2.k_min())});
    }
  }
  out.tables.push_back(std::move(t));
}

void run_bergman(const config::ExperimentConfig& c, const Scenario& sc,
                 const std::string& cache_dir, report::ReportBundle& out) {
  if (sc.model != geom::ModelKind::Sphere)
    throw ConfigError("bergman experiment needs a sphere scenario");
  const l2::GramSpec spec;
  bergman::RegionGrid grid{c.grid_r0, c.grid_r1, c.grid_nr, c.grid_ntheta,
                           c.grid_delta};
  const auto diag = bergman::mainhyp_diagnostic(sc.weight, sc.volume, c.p_list,
                                                grid, spec, cache_dir);
  report::CsvTable t;
  t.name = "bergman_diagnostics";
  t.header = {"p", "sup_abs_log_Pp_over_p", "grid_points", "verdict"};
  for (std::size_t i = 0; i < diag.p_list.size(); ++i) {
    const bool last = i + 1 == diag.p_list.size();
    t.row({std::to_string(diag.p_list[i]), format_double(diag.sup_abs[i]),
           std::to_string(diag.grid_points),
           (last && diag.has_verdict) ? verdict_str(diag.verdict) : ""});
  }
  out.tables.push_back(std::move(t));

  report::CsvTable n;
  n.name = "bergman_normalization";
  n.header = {"p", "d_p", "integral_Pp", "abs_error"};
  bool norm_ok = true;
  for (int p : c.p_list) {
    const auto basis = l2::build_basis(p, sc.weight, sc.volume, spec, cache_dir);
    const double integral = bergman::normalization_check(basis);
    const double err = std::abs(integral - basis.d());
    norm_ok = norm_ok && err <= 1e-7 * std::max(1.0, (double)basis.d());
    n.row({std::to_string(p), std::to_string(basis.d()),
           format_double(integral), format_double(err)});
  }
  out.tables.push_back(std::move(n));

  if (diag.has_verdict && !diag.verdict) {
    out.contract_ok = false;
    out.contract_notes.push_back("bergman: convergence trend gate failed");
  }
  if (!norm_ok) {
    out.contract_ok = false;
    out.contract_notes.push_back("bergman: integral of P_p drifted from d_p");
  }

  report::SvgPlot plot;
  plot.name = "bergman_sweep";
  plot.title = "sup (1/p)|log P_p| over the probe region";
  plot.series.push_back({"sup", {}});
  for (std::size_t i = 0; i < diag.p_list.size(); ++i)
    plot.series[0].second.push_back({(double)diag.p_list[i], diag.sup_abs[i]});
  out.plots.push_back(std::move(plot));
}

void run_fscurrent(const config::ExperimentConfig& c, const Scenario& sc,
                   const std::string& cache_dir, report::ReportBundle& out) {
  if (sc.model != geom::ModelKind::Sphere)
    throw ConfigError("fscurrent experiment needs a sphere scenario");
  const l2::GramSpec spec;
  const auto family = currents::standard_family();
  const auto gamma = currents::curvature_current(sc.weight);

  report::CsvTable t;
  t.name = "fscurrent";
  t.header = {"p",          "weak_distance", "atom_gap_max",
              "mass_error", "identity_rel_max"};
  std::vector<double> weak;
  bool ok_gap = true, ok_mass = true, ok_ident = true;
  report::SvgPlot densplot;
  densplot.name = "density_overlay";
  densplot.title = "radial densities: gamma_p/p vs gamma";

  for (int p : c.p_list) {
    const auto basis = l2::build_basis(p, sc.weight, sc.volume, spec, cache_dir);
    const auto gp = currents::fs_current(basis);
    const auto gp_over_p = scaled(gp, 1.0 / p);
    const double wd = currents::weak_distance(gp_over_p, gamma, family);
    weak.push_back(wd);

    double gap = 0.0;
    for (const auto& a : sc.weight.atoms) {
      double mass_p = 0.0;
      for (const auto& [pt, m] : gp_over_p.atoms)
        if (std::abs(pt - a.point) < 1e-9) mass_p += m;
      gap = std::max(gap, std::abs(mass_p - a.nu));
    }
    ok_gap = ok_gap && gap <= 1.0 / p + 1e-12;

    const double mass = currents::total_mass_quadrature(gp);
    const double mass_err = std::abs(mass - p);
    ok_mass = ok_mass && mass_err <= 1e-4 * p;

    double ident = 0.0;
    for (const auto& chi : family) {
      const double lhs = currents::pair_ddc_log_bergman(basis, chi);
      const double rhs = 2.0 * (currents::pair_current(gp, chi) -
                                p * currents::pair_current(gamma, chi));
      const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-2});
      ident = std::max(ident, std::abs(lhs - rhs) / scale);
    }
    ok_ident = ok_ident && ident <= 1e-4;

    t.row({std::to_string(p), format_double(wd), format_double(gap),
           format_double(mass_err), format_double(ident)});

    std::vector<std::pair<double, double>> pts;
    for (int i = 1; i <= 60; ++i) {
      const double r = 2.5 * i / 60.0;
      pts.push_back({r, gp_over_p.density0(cplx(r, 0.0))});
    }
    densplot.series.push_back({"p=" + std::to_string(p), pts});
  }
  std::vector<std::pair<double, double>> pts;
  for (int i = 1; i <= 60; ++i) {
    const double r = 2.5 * i / 60.0;
    pts.push_back({r, gamma.density0(cplx(r, 0.0))});
  }
  densplot.series.push_back({"limit", pts});
  out.plots.push_back(std::move(densplot));

  // Some scenarios are exactly reproduced at finite p (the nu = 1/2 atom at
  // even p, the FS baseline): there the distances sit at quadrature level
  // and the sweep passes by exactness rather than by strict decrease.
  double weak_max = 0.0;
  for (const double d : weak) weak_max = std::max(weak_max, d);
  bool decreasing = true;
  for (std::size_t i = 1; i < weak.size(); ++i)
    decreasing = decreasing && weak[i] < weak[i - 1];
  out.tables.push_back(std::move(t));
  if (!decreasing && weak_max > 1e-8) {
    out.contract_ok = false;
    out.contract_notes.push_back("fscurrent: weak distances not decreasing");
  }
  if (!ok_gap) {
    out.contract_ok = false;
    out.contract_notes.push_back("fscurrent: Lelong gap above 1/p");
  }
  if (!ok_mass) {
    out.contract_ok = false;
    out.contract_notes.push_back("fscurrent: mass conservation violated");
  }
  if (!ok_ident) {
    out.contract_ok = false;
    out.contract_notes.push_back("fscurrent: dd^c log P_p pairing identity off");
  }
}

void run_zeros_sphere(const config::ExperimentConfig& c, const Scenario& sc,
                      const std::string& cache_dir, report::ReportBundle& out) {
  const l2::GramSpec spec;
  const auto family = currents::standard_family();
  const auto gamma = currents::curvature_current(sc.weight);
  std::vector<l2::OrthoBasis> bases;
  for (int p : c.p_list)
    bases.push_back(l2::build_basis(p, sc.weight, sc.volume, spec, cache_dir));

  report::CsvTable t;
  t.name = "sequence_runs";
  t.header = {"seed", "p", "deviation", "verdict"};
  bool all_pass = true;
  report::SvgPlot plot;
  plot.name = "sequence_deviations";
  plot.title = "per-sequence pairing deviations vs p";
  for (int s = 0; s < 10; ++s) {
    const std::uint64_t seed = c.seed + (std::uint64_t)s;
    const auto table = random::sequence_run(bases, seed, family, gamma);
    all_pass = all_pass && table.verdict;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < table.p_list.size(); ++i) {
      t.row({std::to_string(seed), std::to_string(table.p_list[i]),
             format_double(table.deviation[i]), verdict_str(table.verdict)});
      pts.push_back({(double)table.p_list[i], table.deviation[i]});
    }
    plot.series.push_back({"seed " + std::to_string(seed), pts});
  }
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  if (!all_pass) {
    out.contract_ok = false;
    out.contract_notes.push_back("zeros: a sequence trend verdict failed");
  }

  report::CsvTable cd;
  cd.name = "cd_constant";
  cd.header = {"d", "mean", "std_error", "reference", "within_3sigma"};
  bool cd_ok = true;
  for (int d : {2, 3, 5, 8}) {
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(d);
    u(0) = 1.0;
    const auto est = random::cd_constant(d, u, 1000000, c.seed);
    const double ref = -0.5 * random::harmonic(d - 1);
    const bool ok = std::abs(est.mean - ref) <= 3.0 * est.std_error;
    cd_ok = cd_ok && ok;
    cd.row({std::to_string(d), format_double(est.mean),
            format_double(est.std_error), format_double(ref),
            verdict_str(ok)});
  }
  out.tables.push_back(std::move(cd));
  if (!cd_ok) {
    out.contract_ok = false;
    out.contract_notes.push_back("zeros: dimensional constant off by > 3 sigma");
  }

  if (!sc.weight.atoms.empty()) {
    report::CsvTable v;
    v.name = "vanishing_order";
    v.header = {"p", "k_min", "min_mult_at_atom", "draws"};
    bool order_ok = true;
    for (const auto& basis : bases) {
      if (basis.d() == 0) continue;
      const int kmin = basis.space.k_min();
      const random::SphereSampler sampler{basis.d(), c.seed, 0xA70ULL};
      int min_mult = basis.p() + 1;
      const int draws = 1000;
      for (int i = 0; i < draws; ++i) {
        const auto zs = random::zeros(basis, sampler.sample(i));
        min_mult = std::min(min_mult, zs.multiplicity_at(cplx(0.0, 0.0)));
      }
      order_ok = order_ok && min_mult == kmin;
      v.row({std::to_string(basis.p()), std::to_string(kmin),
             std::to_string(min_mult), std::to_string(draws)});
    }
    out.tables.push_back(std::move(v));
    if (!order_ok) {
      out.contract_ok = false;
      out.contract_notes.push_back("zeros: vanishing order law violated");
    }
  }
}

void run_zeros_product(const config::ExperimentConfig& c, const Scenario& sc,
                       report::ReportBundle& out) {
  const l2::GramSpec spec;
  report::CsvTable t;
  t.name = "bezout";
  t.header = {"p", "trials", "counts_ok", "positive_dimensional"};
  bool all_ok = true;
  for (int p : c.p_list) {
    const auto space = l2::product_filter(p, sc.tweight, sc.tvolume);
    const auto basis = l2::product_orthonormalize(space, spec);
    const int expected = 2 * p * p;
    int counts_ok = 0, posdim = 0;
    const int trials = 100;
    const random::SphereSampler sampler{basis.d(), c.seed, 0xBE20ULL};
    for (int i = 0; i < trials; ++i) {
      const auto a1 = sampler.sample(2 * i);
      const auto a2 = sampler.sample(2 * i + 1);
      try {
        const auto cz = random::common_zeros_pair(basis, a1, a2);
        if (cz.total_with_multiplicity() == expected) ++counts_ok;
      } catch (const PositiveDimensional&) {
        ++posdim;
      }
    }
    all_ok = all_ok && counts_ok == trials && posdim == 0;
    t.row({std::to_string(p), std::to_string(trials),
           std::to_string(counts_ok), std::to_string(posdim)});
  }
  out.tables.push_back(std::move(t));
  if (!all_ok) {
    out.contract_ok = false;
    out.contract_notes.push_back("zeros: Bezout count check failed");
  }
}

void run_expectation(const config::ExperimentConfig& c, const Scenario& sc,
                     const std::string& cache_dir, report::ReportBundle& out) {
  if (sc.model != geom::ModelKind::Sphere)
    throw ConfigError("expectation experiment needs a sphere scenario");
  const l2::GramSpec spec;
  const auto family = currents::standard_family();
  report::CsvTable t;
  t.name = "expectation";
  t.header = {"p",         "chi",           "mean",
              "std_error", "reference",     "within_3sigma",
              "degenerate_draws"};
  bool all_ok = true;
  for (int p : c.p_list) {
    const auto basis = l2::build_basis(p, sc.weight, sc.volume, spec, cache_dir);
    const auto res =
        random::expectation_estimate(basis, c.samples, family, c.seed);
    for (std::size_t f = 0; f < res.rows.size(); ++f) {
      const auto& r = res.rows[f];
      all_ok = all_ok && r.within_3sigma;
      t.row({std::to_string(p), std::to_string(f), format_double(r.mean),
             format_double(r.std_error), format_double(r.reference),
             verdict_str(r.within_3sigma),
             std::to_string(res.degenerate_draws)});
    }
  }
  out.tables.push_back(std::move(t));
  if (!all_ok) {
    out.contract_ok = false;
    out.contract_notes.push_back("expectation: mean outside 3 sigma band");
  }
}

// Closed-form oracle for product profiles g1(s) + g2(t): the gradient image
// of a box is a rectangle.
struct ProductOracle {
  double nu1 = 0.0, nu2 = 0.0;
  double dg(double s, double nu) const {
    return nu + (1.0 - nu) / (1.0 + std::exp(-2.0 * s));
  }
  double mass(const currents::Box& b) const {
    return 2.0 * (dg(b.s1, nu1) - dg(b.s0, nu1)) *
           (dg(b.t1, nu2) - dg(b.t0, nu2));
  }
};

void run_ma2(const config::ExperimentConfig& c, const Scenario& sc,
             report::ReportBundle& out) {
  if (sc.model != geom::ModelKind::ProductSphere)
    throw ConfigError("ma2 experiment needs a product scenario");
  const l2::GramSpec spec;

  currents::Box domain{-6.0, 6.0, -6.0, 6.0};
  std::vector<currents::Box> regions;
  if (!c.region_boxes.empty()) {
    for (const auto& b : c.region_boxes)
      regions.push_back({b[0], b[1], b[2], b[3]});
  } else {
    regions = {{-6.0, 0.0, -6.0, 0.0},
               {0.0, 6.0, -6.0, 0.0},
               {-6.0, 0.0, 0.0, 6.0},
               {0.0, 6.0, 0.0, 6.0}};
  }

  ProductOracle oracle;
  oracle.nu1 = sc.tweight.factor1.total_nu();
  oracle.nu2 = sc.tweight.factor2.total_nu();

  const auto cells_for = [](int p) {
    return std::clamp(32 * p, 128, 640);
  };

  report::CsvTable t;
  t.name = "ma2";
  t.header = {"p", "region", "mass", "oracle", "abs_error", "trend_verdict"};
  std::vector<std::vector<double>> errors(regions.size());
  double last_total = 0.0;
  for (int p : c.p_list) {
    const auto space = l2::product_filter(p, sc.tweight, sc.tvolume);
    const auto basis = l2::product_orthonormalize(space, spec);
    const auto res =
        currents::toric_fs_square(basis, regions, domain, cells_for(p));
    for (std::size_t r = 0; r < regions.size(); ++r)
      errors[r].push_back(std::abs(res.region_mass[r] - oracle.mass(regions[r])));
    last_total = res.interior_total + res.boundary_correction;
    for (std::size_t r = 0; r < regions.size(); ++r)
      t.row({std::to_string(p), std::to_string(r),
             format_double(res.region_mass[r]),
             format_double(oracle.mass(regions[r])),
             format_double(errors[r].back()), ""});
  }
  bool trend_ok = true;
  for (std::size_t r = 0; r < regions.size(); ++r)
    trend_ok = trend_ok && trend_pass(errors[r], 0.6, 1e-6);
  if (!t.rows.empty()) t.rows.back().back() = verdict_str(trend_ok);
  out.tables.push_back(std::move(t));
  (void)last_total;
  if (!trend_ok) {
    out.contract_ok = false;
    out.contract_notes.push_back("ma2: region masses not converging");
  }

  // Monge-Ampère harness presets: LSE smoothings of the corner and cross
  // profiles, and the trivial family.
  struct Preset {
    std::string name;
    std::function<std::function<double(double, double)>(int)> v_p;
    std::function<double(double, double)> v;
  };
  const auto corner = [](double s, double t) {
    return std::max({s, t, 0.0});
  };
  const auto cross = [](double s, double t) {
    return std::abs(s) + std::abs(t);
  };
  const auto fsprod = [](double s, double t) {
    return 0.5 * std::log1p(std::exp(2.0 * s)) +
           0.5 * std::log1p(std::exp(2.0 * t));
  };
  std::vector<Preset> presets = {
      {"corner",
       [](int p) {
         return [p](double s, double t) {
           const double m = std::max({s, t, 0.0});
           return m + std::log(std::exp(2.0 * p * (s - m)) +
                               std::exp(2.0 * p * (t - m)) +
                               std::exp(2.0 * p * (0.0 - m))) /
                          (2.0 * p);
         };
       },
       corner},
      {"cross",
       [](int p) {
         return [p](double s, double t) {
           const auto sm = [p](double x) {
             const double m = std::abs(x);
             return m + std::log(std::exp(2.0 * p * (x - m)) +
                                 std::exp(2.0 * p * (-x - m))) /
                            (2.0 * p);
           };
           return sm(s) + sm(t);
         };
       },
       cross},
      {"trivial", [fsprod](int) { return fsprod; }, fsprod},
  };
  const std::vector<currents::Box> hregions = {
      {-1.5, 1.5, -1.5, 1.5},   // straddles the singular set
      {-0.5, 2.5, -2.5, 0.5},   // off-center straddle
      {2.0, 5.0, -5.0, -2.0},   // smooth region away from the kinks
  };
  bool harness_ok = true;
  for (const auto& preset : presets) {
    const auto table = currents::ma_convergence_harness(
        preset.v_p, preset.v, hregions, c.p_list, domain, cells_for);
    report::CsvTable h;
    h.name = "ma_harness_" + preset.name;
    h.header = {"region", "p", "abs_error", "trend_verdict"};
    for (std::size_t r = 0; r < hregions.size(); ++r)
      for (std::size_t i = 0; i < table.p_list.size(); ++i)
        h.row({std::to_string(r), std::to_string(table.p_list[i]),
               format_double(table.errors[r][i]),
               verdict_str(table.verdicts[r])});
    out.tables.push_back(std::move(h));
    for (const bool v : table.verdicts) harness_ok = harness_ok && v;
  }
  if (!harness_ok) {
    out.contract_ok = false;
    out.contract_notes.push_back("ma2: harness errors not converging");
  }
}

}  // namespace

report::ReportBundle run(const config::ExperimentConfig& c,
                         const std::string& cache_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = resolve_scenario(c);
  report::ReportBundle out;

  const auto dispatch = [&](const std::string& kind) {
    if (kind == "dim") {
      run_dim(c, sc, out);
    } else if (kind == "bergman") {
      run_bergman(c, sc, cache_dir, out);
    } else if (kind == "fscurrent") {
      run_fscurrent(c, sc, cache_dir, out);
    } else if (kind == "zeros") {
      if (sc.model == geom::ModelKind::Sphere)
        run_zeros_sphere(c, sc, cache_dir, out);
      else
        run_zeros_product(c, sc, out);
    } else if (kind == "expectation") {
      run_expectation(c, sc, cache_dir, out);
    } else if (kind == "ma2") {
      run_ma2(c, sc, out);
    } else {
      throw ConfigError("unknown experiment kind: " + kind);
    }
  };

  if (c.kind == "report-all") {
    if (sc.model == geom::ModelKind::Sphere) {
      for (const char* k : {"dim", "bergman", "fscurrent", "zeros",
                            "expectation"})
        dispatch(k);
    } else {
      for (const char* k : {"dim", "ma2", "zeros"}) dispatch(k);
    }
  } else {
    dispatch(c.kind);
  }

  const auto t1 = std::chrono::steady_clock::now();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  out.manifest = {
      {"config_hash", std::to_string(config::config_hash(c))},
      {"version", "lab 0.1.0"},
      {"scenario", c.scenario},
      {"kind", c.kind},
      {"seed", std::to_string(c.seed)},
      {"contract", out.contract_ok ? "pass" : "fail"},
      {"wall_ms", std::to_string(ms)},  // excluded from determinism checks
  };
  const std::string dir =
      (fs::path(c.out_dir) / (c.scenario + "-" + c.kind)).string();
  out.write(dir, c.svg);
  return out;
}

GcReport cache_gc(const std::string& dir, std::uint64_t max_bytes) {
  if (!fs::exists(dir)) throw IoFailure("cache_gc: no such directory " + dir);
  struct Entry {
    fs::path path;
    std::uint64_t bytes;
    fs::file_time_type used;
  };
  std::vector<Entry> entries;
  std::uint64_t total = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".obc") continue;
    const std::uint64_t b = e.file_size();
    entries.push_back({e.path(), b, e.last_write_time()});
    total += b;
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.used < b.used; });
  GcReport rep;
  std::size_t i = 0;
  while (total > max_bytes && i < entries.size()) {
    std::error_code ec;
    fs::remove(entries[i].path, ec);
    if (!ec) {
      total -= entries[i].bytes;
      rep.evicted_bytes += entries[i].bytes;
      ++rep.evicted;
    }
    ++i;
  }
  rep.remaining_bytes = total;
  std::ofstream manifest(fs::path(dir) / "manifest.txt",
                         std::ios::trunc | std::ios::binary);
  for (std::size_t j = i; j < entries.size(); ++j)
    manifest << entries[j].path.filename().string() << " "
             << entries[j].bytes << "\n";
  return rep;
}

}  // namespace lab::runner
