#pragma once

#include <optional>
#include <vector>

#include "lab/core.hpp"

namespace lab::geom {

// ---------------------------------------------------------------------------
// Model spaces. The Riemann sphere carries two affine charts z and w = 1/z
// with the O(1) cocycle; the product model is handled through its torus chart
// (z1, z2) and per-factor sphere data, bundle convention O(1,1).
// ---------------------------------------------------------------------------

enum class ModelKind { Sphere, ProductSphere };
enum class ChartId { Zero, Infinity };

inline cplx chart_transition(cplx z) { return 1.0 / z; }

struct Atom {
  cplx point;
  double nu = 0.0;  // Lelong coefficient, >= 0
  bool operator==(const Atom&) const = default;
};

// Smooth weight part c_fs * (1/2)log(1+|z|^2) + c_quad*|z|^2 + c0.
// The Fubini-Study coefficient c_fs is the absolutely continuous share of the
// curvature mass; degree-1 normalized weights keep c_fs + sum(nu) = 1.
struct SmoothPart {
  double fs_coeff = 1.0;
  double quad_coeff = 0.0;
  double constant = 0.0;
  bool has_closed_form = true;  // false forces the finite-difference path

  double operator()(cplx z) const {
    return 0.5 * fs_coeff * std::log1p(std::norm(z)) +
           quad_coeff * std::norm(z) + constant;
  }
  // Density of dd^c of the smooth part w.r.t. Lebesgue, convention
  // dd^c log|z| = unit Dirac, i.e. (1/2pi) * Laplacian.
  double curvature(cplx z) const {
    const double s = 1.0 + std::norm(z);
    return fs_coeff / (kPi * s * s) + 2.0 * quad_coeff / kPi;
  }
};

// Distance proxy |sigma|: identity below 1/8, then a C^2 monotone cap with
// asymptote 1/2, so |sigma| < 1 holds everywhere.
double sigma_proxy(double r);

// F = -(1/2) sum_j log(-log |sigma_j|), the Poincaré potential of the
// puncture set. Points are taken in chart-0 coordinates.
double poincare_F(const std::vector<cplx>& punctures, cplx x);

struct SingularWeight {
  ModelKind model = ModelKind::Sphere;
  ChartId chart = ChartId::Zero;
  SmoothPart smooth;
  std::vector<Atom> atoms;
  double eps = 0.0;                // Poincaré perturbation strength
  std::vector<cplx> punctures;     // chart-0 anchors of the |sigma_j| proxies

  double total_nu() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.nu;
    return s;
  }
  bool radial() const;  // rotation invariant about the chart origin
};

// Shipped weight constructions. Degree-1 normalization: the smooth part is
// scaled to carry mass 1 - sum(nu).
SingularWeight fs_weight();
SingularWeight atom_weight(double nu);                     // atom at 0
SingularWeight atom_weight_at(cplx a, double nu);          // off-origin atom
SingularWeight multi_atom_weight(const std::vector<Atom>& atoms);

// phi(x); -inf exactly at atoms with nu > 0.
double eval_weight(const SingularWeight& w, cplx x);

// Curvature density off atoms; closed form when available, otherwise a
// 5-point Laplacian stencil with step h_fd = 1e-4*(1+|x|).
double curvature_density(const SingularWeight& w, cplx x);
double curvature_density_fd(const SingularWeight& w, cplx x);

// dd^c density of eps * F alone. Inside the proxy knee the closed form
// eps / (4 pi t^2 log^2 t) applies; outside, each puncture term is
// stenciled on its own (no atom standoff needed there).
double poincare_curvature(const SingularWeight& w, cplx x);

double lelong_number(const SingularWeight& w, cplx a);

// Adds the term eps*F to the weight after validating that the perturbed
// curvature density stays >= -1e-6 on the validation grid.
SingularWeight apply_poincare_perturbation(const SingularWeight& w, double eps);

// Weight in the other sphere chart, satisfying
// phi_inf(w) = phi_0(1/w) + log|w|. Atoms map through z -> 1/z.
SingularWeight transition_weight(const SingularWeight& w);

// Fixed 64x64 polar validation grid (radii log-spaced in [0.05,4]); points
// closer than 0.02 to an atom are skipped.
std::vector<cplx> validation_grid(const SingularWeight& w);
bool semipositive_on_grid(const SingularWeight& w, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Volume forms. Densities are w.r.t. Lebesgue measure in the chart; the
// Fubini-Study form is normalized to total mass 1, so monomials of degree
// <= p stay globally square integrable without a second chart integral.
// ---------------------------------------------------------------------------

struct VolumeDensity {
  enum class Kind { FubiniStudy, Poincare };
  Kind kind = Kind::FubiniStudy;
  std::vector<cplx> punctures;  // Poincare only

  double operator()(cplx z) const;
  double log_density(cplx z) const;  // safe where the density under/overflows
  bool radial() const;
};

inline VolumeDensity fs_volume() { return {}; }
VolumeDensity poincare_volume(const std::vector<cplx>& punctures);

// Toric data for the product model: everything factors.
struct ToricWeight {
  SingularWeight factor1 = fs_weight();
  SingularWeight factor2 = fs_weight();
};
struct ToricVolume {
  VolumeDensity factor1 = fs_volume();
  VolumeDensity factor2 = fs_volume();
};

}  // namespace lab::geom
