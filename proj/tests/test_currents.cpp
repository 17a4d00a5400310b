#include <doctest.h>

#include <cmath>

#include "lab/currents.hpp"

using namespace lab;
using namespace lab::currents;

namespace {

l2::OrthoBasis make_basis(int p, const geom::SingularWeight& w,
                          const geom::VolumeDensity& vol = geom::fs_volume()) {
  l2::GramSpec spec;
  auto space = l2::integrability_filter(p, w, vol);
  return l2::orthonormalize(space, l2::gram_matrix(space, spec), spec);
}

}  // namespace

TEST_CASE("test functions: compact support, plateau, zero-mean Laplacian") {
  const TestFunction chi{cplx(0.3, -0.2), 1.1, 2.0, 0.4};
  CHECK(chi(chi.center) == doctest::Approx(2.0));
  CHECK(chi(chi.center + cplx(0.3, 0.0)) == doctest::Approx(2.0));  // plateau
  CHECK(chi(chi.center + cplx(1.2, 0.0)) == 0.0);

  // Laplacian integrates to zero over the plane
  const double total = disk_integral(
      [&](cplx z) { return chi.laplacian(z); }, chi.center, chi.radius, {},
      {1e-11, 1e-10, 52});
  CHECK(std::abs(total) < 1e-9);

  // Laplacian matches a stencil of the function itself
  for (const cplx z : {cplx(0.9, -0.2), cplx(0.45, 0.3), cplx(-0.1, -0.6)}) {
    const double h = 1e-5;
    const double sten = (chi(z + cplx(h, 0)) + chi(z - cplx(h, 0)) +
                         chi(z + cplx(0, h)) + chi(z - cplx(0, h)) -
                         4.0 * chi(z)) /
                        (h * h);
    CHECK(chi.laplacian(z) == doctest::Approx(sten).epsilon(1e-4));
  }
}

TEST_CASE("FS current of the FS basis is p times the FS form") {
  const int p = 5;
  const auto basis = make_basis(p, geom::fs_weight());
  const auto gp = fs_current(basis);
  CHECK(gp.atoms.empty());
  CHECK(gp.atom_at_infinity == 0.0);
  CHECK(gp.declared_mass == doctest::Approx(p));
  for (const cplx z : {cplx(0.0, 0.0), cplx(0.7, -0.3), cplx(1.4, 0.9)}) {
    const double fs = 1.0 / (kPi * std::pow(1.0 + std::norm(z), 2));
    CHECK(gp.density0(z) == doctest::Approx(p * fs).epsilon(1e-10));
  }
  // pairing equality holds for every p by symmetry
  const auto gamma = curvature_current(geom::fs_weight());
  for (const auto& chi : standard_family()) {
    const double a = pair_current(gp, chi) / p;
    const double b = pair_current(gamma, chi);
    CHECK(a == doctest::Approx(b).epsilon(1e-7));
  }
}

TEST_CASE("FS current of an atom space: base atom plus AC part") {
  const auto basis = make_basis(4, geom::atom_weight(0.5));
  const auto gp = fs_current(basis);
  REQUIRE(gp.atoms.size() == 1);
  CHECK(std::abs(gp.atoms[0].first) == 0.0);
  CHECK(gp.atoms[0].second == doctest::Approx(2.0));  // forced order at p=4
  CHECK(gp.atom_at_infinity == 0.0);
  const double mass = total_mass_quadrature(gp);
  CHECK(std::abs(mass - 4.0) < 1e-4 * 4.0);

  // single-section space: pure atom, vanishing AC density
  const auto b1 = make_basis(3, geom::atom_weight(1.0));
  const auto g1 = fs_current(b1);
  REQUIRE(g1.atoms.size() == 1);
  CHECK(g1.atoms[0].second == doctest::Approx(3.0));
  for (const cplx z : {cplx(0.4, 0.2), cplx(1.2, -0.5)})
    CHECK(std::abs(g1.density0(z)) < 1e-12);
}

TEST_CASE("curvature currents split mass between atoms and density") {
  const auto fs = curvature_current(geom::fs_weight());
  CHECK(fs.atoms.empty());
  CHECK(fs.declared_mass == doctest::Approx(1.0));
  CHECK(fs.density0(cplx(0.0, 0.0)) == doctest::Approx(1.0 / kPi));
  CHECK(total_mass_quadrature(fs) == doctest::Approx(1.0).epsilon(1e-6));

  const auto ga = curvature_current(geom::atom_weight(0.5));
  REQUIRE(ga.atoms.size() == 1);
  CHECK(ga.atoms[0].second == doctest::Approx(0.5));
  CHECK(total_mass_quadrature(ga) == doctest::Approx(1.0).epsilon(1e-6));

  // perturbation keeps the atoms; the density changes only near punctures
  geom::SingularWeight w = geom::atom_weight(0.5);
  w.punctures = {cplx(0.0, 0.0)};
  const auto wp = geom::apply_poincare_perturbation(w, 0.1);
  const auto gp = curvature_current(wp);
  REQUIRE(gp.atoms.size() == 1);
  CHECK(gp.atoms[0].second == doctest::Approx(0.5));
  CHECK(gp.density0(cplx(4.0, 0.0)) ==
        doctest::Approx(ga.density0(cplx(4.0, 0.0))).epsilon(1e-6));
  CHECK(std::abs(gp.density0(cplx(0.05, 0.0)) -
                 ga.density0(cplx(0.05, 0.0))) > 1e-4);
  CHECK(total_mass_quadrature(gp) == doctest::Approx(1.0).epsilon(2e-4));
}

TEST_CASE("pairing: plateau capture, atom avoidance, weak distance") {
  // synthetic current: two atoms, no density
  CurrentMeasure c;
  c.atoms = {{cplx(0.2, 0.0), 0.7}, {cplx(-0.3, 0.1), 0.3}};
  c.density0 = [](cplx) { return 0.0; };
  c.densityinf = [](cplx) { return 0.0; };
  c.declared_mass = 1.0;

  TestFunction plateau{cplx(0.0, 0.0), 1.5, 1.0, 0.5};  // == 1 on r <= 0.75
  CHECK(pair_current(c, plateau) == doctest::Approx(1.0).epsilon(1e-12));

  TestFunction away{cplx(5.0, 5.0), 1.0, 1.0, 0.0};
  CHECK(pair_current(c, away) == doctest::Approx(0.0));

  CHECK(weak_distance(c, c, standard_family()) == doctest::Approx(0.0));

  // translating one atom shifts pairings by mass * (chi(a) - chi(a'))
  CurrentMeasure shifted = c;
  shifted.atoms[0].first += cplx(0.1, 0.0);
  const TestFunction chi{cplx(0.2, 0.0), 0.8, 1.0, 0.0};
  const double expect =
      c.atoms[0].second *
      std::abs(chi(c.atoms[0].first) - chi(shifted.atoms[0].first));
  CHECK(std::abs(pair_current(c, chi) - pair_current(shifted, chi)) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("Siu split: stored atoms, AC remainder, order/p gap") {
  const auto b4 = make_basis(4, geom::atom_weight(0.5));
  const auto s4 = siu_decompose(fs_current(b4));
  REQUIRE(s4.atoms.size() == 1);
  CHECK(s4.atoms[0].second / 4.0 == doctest::Approx(0.5));  // exactly nu

  const auto b3 = make_basis(4, geom::atom_weight(1.0 / 3.0));
  const auto s3 = siu_decompose(fs_current(b3));
  REQUIRE(s3.atoms.size() == 1);
  CHECK(s3.atoms[0].second == doctest::Approx(1.0));  // k_min = 1
  CHECK(std::abs(s3.atoms[0].second / 4.0 - 1.0 / 3.0) <= 1.0 / 4.0);

  const auto sfs = siu_decompose(fs_current(make_basis(3, geom::fs_weight())));
  CHECK(sfs.atoms.empty());
}

TEST_CASE("Lelong masses of gamma_p/p converge at rate 1/p") {
  for (const double nu : {1.0 / 3.0, 0.5}) {
    for (const int p : {4, 8, 16}) {
      const auto basis = make_basis(p, geom::atom_weight(nu));
      const auto gp = fs_current(basis);
      REQUIRE(gp.atoms.size() == 1);
      CHECK(std::abs(gp.atoms[0].second / p - nu) <= 1.0 / p + 1e-12);
    }
  }
}

TEST_CASE("weak distances of gamma_p/p against gamma shrink with p") {
  const auto family = standard_family();
  const auto scaled_fs = [](const l2::OrthoBasis& basis) {
    const int p = basis.p();
    CurrentMeasure gp = fs_current(basis);
    for (auto& [pt, m] : gp.atoms) m /= p;
    auto d0 = gp.density0;
    auto di = gp.densityinf;
    gp.density0 = [d0, p](cplx z) { return d0(z) / p; };
    gp.densityinf = [di, p](cplx z) { return di(z) / p; };
    return gp;
  };

  // nu = 1/3: p*nu is never an integer along the sweep, so the convergence
  // is genuinely gradual and strictly monotone
  const auto w3 = geom::atom_weight(1.0 / 3.0);
  const auto gamma3 = curvature_current(w3);
  std::vector<double> dist;
  for (const int p : {4, 8, 16})
    dist.push_back(
        weak_distance(scaled_fs(make_basis(p, w3)), gamma3, family));
  CHECK(dist[0] > 1e-3);
  CHECK(dist[1] < dist[0]);
  CHECK(dist[2] < dist[1]);

  // nu = 1/2 at even p: the shifted Gram is binomial and gamma_p/p equals
  // gamma exactly; distances sit at quadrature level
  const auto w2 = geom::atom_weight(0.5);
  const auto gamma2 = curvature_current(w2);
  for (const int p : {4, 8}) {
    CHECK(weak_distance(scaled_fs(make_basis(p, w2)), gamma2, family) < 1e-10);
  }
}

TEST_CASE("dd^c log P_p pairing identity against 2 gamma_p - 2p gamma") {
  const auto w = geom::atom_weight(0.5);
  const int p = 4;
  const auto basis = make_basis(p, w);
  const auto gp = fs_current(basis);
  const auto gamma = curvature_current(w);
  for (const auto& chi : standard_family()) {
    const double lhs = pair_ddc_log_bergman(basis, chi);
    const double rhs =
        2.0 * (pair_current(gp, chi) - p * pair_current(gamma, chi));
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-2});
    CHECK(std::abs(lhs - rhs) / scale < 1e-4);
  }
}

TEST_CASE("AC densities stay nonnegative at probe points") {
  const auto basis = make_basis(6, geom::atom_weight(0.5));
  const auto gp = fs_current(basis);
  RngStream rng(31, 4, 1);
  for (int i = 0; i < 200; ++i) {
    const cplx z = 2.0 * rng.cgaussian();
    if (std::abs(z) < 1e-6) continue;
    CHECK(gp.density0(z) >= -1e-8);
  }
}
