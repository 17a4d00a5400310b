#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lab/core.hpp"
#include "lab/l2.hpp"

namespace lab::currents {

// ---------------------------------------------------------------------------
// Closed positive (1,1)-currents on the sphere model, kept as an atom list
// plus an absolutely continuous density per chart. Convention
// d^c = (1/2pi i)(d - dbar), so dd^c log|z| is the unit Dirac and divisor
// atoms carry integer masses.
// ---------------------------------------------------------------------------

struct CurrentMeasure {
  std::vector<std::pair<cplx, double>> atoms;  // chart-0 points and masses
  double atom_at_infinity = 0.0;
  std::function<double(cplx)> density0;    // chart-0 density w.r.t. Lebesgue
  std::function<double(cplx)> densityinf;  // chart-infinity density
  double declared_mass = 0.0;

  // hints for the quadrature: density singularities and whether the origin
  // carries a (t log t)^{-2}-type Poincaré singularity
  std::vector<cplx> singular_points;
  bool origin_poincare = false;
  // When set, returns the exact density mass of B(0, r0); used instead of
  // quadrature where the density exceeds double range near the origin.
  std::function<double(double)> origin_head;
};

// gamma_p: density (1/pi)(sum|s'|^2 Q - |sum s' conj(s)|^2)/Q^2 with
// Q = sum |s_j|^2, atoms at base points with the forced vanishing orders,
// and the degree deficit at infinity. Declared mass p.
CurrentMeasure fs_current(const l2::OrthoBasis& basis);

// gamma = dd^c phi: the weight's atoms plus the curvature density.
// Declared mass 1 for degree-1 normalized weights.
CurrentMeasure curvature_current(const geom::SingularWeight& w);

// ---------------------------------------------------------------------------
// Pairing probes: radial plateau bumps, C^2 with compact support and a
// closed-form Laplacian (which integrates to zero). Value `height` inside
// r <= plateau*radius, quintic smoothstep down to 0 at r = radius.
// ---------------------------------------------------------------------------

struct TestFunction {
  cplx center;
  double radius = 1.0;
  double height = 1.0;
  double plateau = 0.0;  // fraction of the radius held at full height

  double operator()(cplx z) const {
    const double r = std::abs(z - center);
    if (r >= radius) return 0.0;
    const double r1 = plateau * radius;
    if (r <= r1) return height;
    const double x = (r - r1) / (radius - r1);
    return height * (1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x));
  }
  double laplacian(cplx z) const {
    const double r = std::abs(z - center);
    const double r1 = plateau * radius;
    if (r >= radius || r <= r1) return 0.0;
    const double w = radius - r1;
    const double x = (r - r1) / w;
    const double h1 = -30.0 * x * x * (1.0 - x) * (1.0 - x);
    const double h2 = -60.0 * x * (1.0 - 3.0 * x + 2.0 * x * x);
    return height * (h2 / (w * w) + h1 / (w * r));
  }
};

using TestFunctionFamily = std::vector<TestFunction>;
TestFunctionFamily standard_family();

// ∫_{B(center,R)} f dLebesgue in polar coordinates around `center`; radial
// panels are split (log-refined) at the listed radii.
double disk_integral(const std::function<double(cplx)>& f, cplx center,
                     double R, const std::vector<double>& split_radii,
                     const quad::Tol& tol, int nang = 192);

// <current, chi> = sum_atoms chi(a) m_a + ∫ chi * density.
double pair_current(const CurrentMeasure& c, const TestFunction& chi,
                    const quad::Tol& tol = {1e-9, 1e-8, 52});

// max_chi |<c1,chi> - <c2,chi>| over the family.
double weak_distance(const CurrentMeasure& c1, const CurrentMeasure& c2,
                     const TestFunctionFamily& family,
                     const quad::Tol& tol = {1e-9, 1e-8, 52});

// Stored atom/absolutely-continuous split.
struct SiuSplit {
  std::vector<std::pair<cplx, double>> atoms;
  double atom_at_infinity;
  std::function<double(cplx)> density;
};
SiuSplit siu_decompose(const CurrentMeasure& c);

// Atoms + both chart density integrals; compare against declared_mass.
double total_mass_quadrature(const CurrentMeasure& c,
                             const quad::Tol& tol = {1e-9, 1e-8, 52});

// <dd^c log P_p, chi> = ∫ log P_p (Lap chi)/(2pi); pairs with the identity
// dd^c log P_p = 2 gamma_p - 2 p gamma.
double pair_ddc_log_bergman(const l2::OrthoBasis& basis,
                            const TestFunction& chi,
                            const quad::Tol& tol = {1e-9, 1e-8, 52});

// ---------------------------------------------------------------------------
// Toric real Monge-Ampère engine. A convex profile g(s,t) is held as a
// piecewise-affine interpolant on a triangulated box; its Monge-Ampère
// measure sits on vertices with mass = area of the subdifferential
// (convex hull of the incident cell gradients), and
// (dd^c g(log|z1|,log|z2|))^2 over Log^{-1}(B) = 2 * that area.
// ---------------------------------------------------------------------------

struct Box {
  double s0 = 0, s1 = 0, t0 = 0, t1 = 0;
  bool contains(double s, double t) const {
    return s >= s0 && s < s1 && t >= t0 && t < t1;
  }
};

struct ConvexProfile {
  Box domain;
  int ns = 0, nt = 0;           // cells per axis
  std::vector<double> values;   // (ns+1)*(nt+1), index i + j*(ns+1)
  std::array<double, 4> gradient_box{0, 1, 0, 1};  // declared polytope

  double at(int i, int j) const { return values[i + j * (ns + 1)]; }
  double hs() const { return (domain.s1 - domain.s0) / ns; }
  double ht() const { return (domain.t1 - domain.t0) / nt; }

  static ConvexProfile sample(const std::function<double(double, double)>& g,
                              Box domain, int ns, int nt);
  // Midpoint convexity along rows, columns and both diagonals.
  bool midpoint_convex(double tol = 1e-9) const;
};

// Mass of (dd^c u)^2 over Log^{-1}(B), u = g o Log: 2 * Lebesgue area of the
// subdifferential image over the interior vertices in B.
// Throws NonConvexProfile.
double real_ma_measure(const ConvexProfile& g, const Box& B);

// One-dimensional anchor: mass over {s1 < log|z| < s2} is g'(s2) - g'(s1).
double real_ma_measure_1d(const std::function<double(double)>& g, double s1,
                          double s2, double h = 1e-6);

struct MaErrorTable {
  std::vector<Box> regions;
  std::vector<int> p_list;
  // errors[r][i] = |MA(v_p)(B_r) - MA(v)(B_r)| at p = p_list[i]
  std::vector<std::vector<double>> errors;
  std::vector<bool> verdicts;  // per region trend gate
};

// Compares the Monge-Ampère masses of a convex family v_p against its limit
// v region by region; profiles are sampled on `domain` with `cells_for(p)`
// cells per axis.
MaErrorTable ma_convergence_harness(
    const std::function<std::function<double(double, double)>(int)>& v_p,
    const std::function<double(double, double)>& v,
    const std::vector<Box>& regions, const std::vector<int>& p_list,
    Box domain, const std::function<int(int)>& cells_for);

// ---------------------------------------------------------------------------
// k = 2 pipeline: gamma_p^2/p^2 region masses through the toric potential
// u_p(s,t) = (1/2p) log sum exp(2(a s + b t) + 2 log|c_ab|).
// ---------------------------------------------------------------------------

struct ToricSquareResult {
  std::vector<double> region_mass;
  double interior_total = 0.0;      // mass captured by the sampled box
  double boundary_correction = 0.0; // 2 - interior_total
};

ToricSquareResult toric_fs_square(const l2::ProductBasis& basis,
                                  const std::vector<Box>& regions, Box domain,
                                  int cells);

// The toric potential itself (log-sum-exp, convex); exposed for oracles.
std::function<double(double, double)> toric_potential(
    const l2::ProductBasis& basis);

}  // namespace lab::currents
