#include "lab/geom.hpp"

#include <cmath>
#include <limits>

namespace lab::geom {

namespace {
constexpr double kAtomMatchTol = 1e-12;
constexpr double kCapKnee = 0.125;  // proxy is exactly r below this radius

double min_atom_distance(const SingularWeight& w, cplx x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& a : w.atoms) d = std::min(d, std::abs(x - a.point));
  return d;
}

// Point in chart-0 coordinates; infinity maps to a proxy value of 1/2.
double sigma_at(cplx puncture, cplx x_chart0, bool at_infinity) {
  if (at_infinity) return 0.5;
  return sigma_proxy(std::abs(x_chart0 - puncture));
}

double poincare_term(const SingularWeight& w, cplx x) {
  if (w.eps <= 0.0 || w.punctures.empty()) return 0.0;
  cplx x0 = x;
  bool at_inf = false;
  if (w.chart == ChartId::Infinity) {
    if (x == cplx(0.0, 0.0)) {
      at_inf = true;
    } else {
      x0 = chart_transition(x);
    }
  }
  double f = 0.0;
  for (const auto& q : w.punctures) {
    const double s = sigma_at(q, x0, at_inf);
    f += -0.5 * std::log(-std::log(s));
  }
  return w.eps * f;
}
}  // namespace

double sigma_proxy(double r) {
  if (!(r >= 0.0)) return 0.5;  // NaN/inf guard, saturated value
  if (r <= kCapKnee) return r;
  if (std::isinf(r)) return 0.5;
  const double u = r - kCapKnee;
  // C^2 junction: value 1/8, slope 1, curvature 0 at the knee.
  const double g = (8.0 / 3.0) * u + (32.0 / 9.0) * u * u;
  return 0.5 - 0.375 * std::exp(-g);
}

double poincare_F(const std::vector<cplx>& punctures, cplx x) {
  double f = 0.0;
  for (const auto& q : punctures) {
    const double s = sigma_proxy(std::abs(x - q));
    if (s >= 1.0) throw OutOfDomain("poincare_F: |sigma| >= 1");
    f += -0.5 * std::log(-std::log(s));
  }
  return f;
}

bool SingularWeight::radial() const {
  for (const auto& a : atoms)
    if (std::abs(a.point) > kAtomMatchTol) return false;
  for (const auto& q : punctures)
    if (std::abs(q) > kAtomMatchTol) return false;
  return chart == ChartId::Zero;
}

SingularWeight fs_weight() { return {}; }

SingularWeight atom_weight(double nu) { return atom_weight_at(0.0, nu); }

SingularWeight atom_weight_at(cplx a, double nu) {
  return multi_atom_weight({{a, nu}});
}

SingularWeight multi_atom_weight(const std::vector<Atom>& atoms) {
  SingularWeight w;
  w.atoms = atoms;
  w.smooth.fs_coeff = 1.0 - w.total_nu();
  return w;
}

double eval_weight(const SingularWeight& w, cplx x) {
  double v = w.smooth(x);
  for (const auto& a : w.atoms) {
    const double r = std::abs(x - a.point);
    if (r == 0.0 && a.nu > 0.0)
      return -std::numeric_limits<double>::infinity();
    v += a.nu * std::log(r);
  }
  return v + poincare_term(w, x);
}

double curvature_density_fd(const SingularWeight& w, cplx x) {
  const double h = 1e-4 * (1.0 + std::abs(x));
  if (min_atom_distance(w, x) < 2.0 * h)
    throw DegenerateStencil("curvature stencil too close to an atom");
  // Atom logs are harmonic off their pole and are removed exactly; the
  // stencil only ever sees the smooth + Poincaré parts.
  const auto probe = [&](cplx z) {
    double v = w.smooth(z);
    return v + poincare_term(w, z);
  };
  const double lap =
      (probe(x + cplx(h, 0)) + probe(x - cplx(h, 0)) + probe(x + cplx(0, h)) +
       probe(x - cplx(0, h)) - 4.0 * probe(x)) /
      (h * h);
  return lap / (2.0 * kPi);
}

double poincare_curvature(const SingularWeight& w, cplx x) {
  if (w.eps <= 0.0 || w.punctures.empty()) return 0.0;
  if (w.chart == ChartId::Infinity) {
    // punctures are anchored in chart-0 coordinates; pull the density back
    // through z = 1/w (F is flat at the chart origin, w = 0)
    if (x == cplx(0.0, 0.0)) return 0.0;
    SingularWeight w0 = w;
    w0.chart = ChartId::Zero;
    const double jac = std::pow(std::abs(x), 4);
    return poincare_curvature(w0, 1.0 / x) / jac;
  }
  double total = 0.0;
  for (const auto& q : w.punctures) {
    const double t = std::abs(x - q);
    if (t < 0.1) {  // sigma == t here (knee at 1/8)
      if (t == 0.0) return std::numeric_limits<double>::infinity();
      const double l = std::log(t);
      total += 1.0 / (4.0 * kPi * t * t * l * l);
    } else {
      const double h = 1e-4 * (1.0 + std::abs(x));
      const auto f = [&](cplx z) {
        return -0.5 * std::log(-std::log(sigma_proxy(std::abs(z - q))));
      };
      total += (f(x + cplx(h, 0)) + f(x - cplx(h, 0)) + f(x + cplx(0, h)) +
                f(x - cplx(0, h)) - 4.0 * f(x)) /
               (h * h) / (2.0 * kPi);
    }
  }
  return w.eps * total;
}

double curvature_density(const SingularWeight& w, cplx x) {
  double smooth_part;
  if (w.smooth.has_closed_form) {
    smooth_part = w.smooth.curvature(x);
  } else {
    SingularWeight s_only = w;
    s_only.eps = 0.0;
    smooth_part = curvature_density_fd(s_only, x);
  }
  return smooth_part + poincare_curvature(w, x);
}

double lelong_number(const SingularWeight& w, cplx a) {
  double nu = 0.0;
  for (const auto& at : w.atoms)
    if (std::abs(a - at.point) <= kAtomMatchTol) nu += at.nu;
  return nu;
}

std::vector<cplx> validation_grid(const SingularWeight& w) {
  std::vector<cplx> pts;
  pts.reserve(64 * 64);
  const double r0 = 0.05, r1 = 4.0;
  for (int i = 0; i < 64; ++i) {
    const double r = r0 * std::pow(r1 / r0, i / 63.0);
    for (int j = 0; j < 64; ++j) {
      const double th = 2.0 * kPi * j / 64.0;
      const cplx z = std::polar(r, th);
      if (min_atom_distance(w, z) < 0.02) continue;
      pts.push_back(z);
    }
  }
  return pts;
}

bool semipositive_on_grid(const SingularWeight& w, double tol) {
  for (const cplx z : validation_grid(w))
    if (curvature_density(w, z) < -tol) return false;
  return true;
}

SingularWeight apply_poincare_perturbation(const SingularWeight& w,
                                           double eps) {
  if (eps < 0.0) throw InvalidEpsilon("epsilon must be nonnegative");
  SingularWeight out = w;
  out.eps = eps;
  if (out.punctures.empty()) {
    for (const auto& a : out.atoms) out.punctures.push_back(a.point);
  }
  if (eps == 0.0) return out;
  if (!semipositive_on_grid(out, 1e-6))
    throw InvalidEpsilon(
        "perturbed curvature density negative on the validation grid");
  return out;
}

SingularWeight transition_weight(const SingularWeight& w) {
  if (w.model != ModelKind::Sphere)
    throw Error("transition_weight: sphere model only");
  if (w.smooth.quad_coeff != 0.0)
    throw Error("transition_weight: quadratic smooth part has no chart image");
  SingularWeight out;
  out.model = w.model;
  out.chart =
      (w.chart == ChartId::Zero) ? ChartId::Infinity : ChartId::Zero;
  out.smooth = w.smooth;
  out.eps = w.eps;
  out.punctures = w.punctures;  // anchored in chart-0 coordinates throughout
  // phi(1/w) + log|w| regroups into the same functional form: atoms at 1/a
  // with the constant picking up nu*log|a|, and any degree deficit
  // 1 - c_fs - sum(nu) shows up as an atom at the new chart origin.
  double origin_nu = 1.0 - w.smooth.fs_coeff;
  for (const auto& a : w.atoms) {
    origin_nu -= a.nu;
    if (std::abs(a.point) > kAtomMatchTol) {
      out.atoms.push_back({1.0 / a.point, a.nu});
      out.smooth.constant += a.nu * std::log(std::abs(a.point));
    }
  }
  if (std::abs(origin_nu) > kAtomMatchTol)
    out.atoms.push_back({0.0, origin_nu});
  return out;
}

VolumeDensity poincare_volume(const std::vector<cplx>& punctures) {
  VolumeDensity v;
  v.kind = VolumeDensity::Kind::Poincare;
  v.punctures = punctures;
  return v;
}

double VolumeDensity::operator()(cplx z) const {
  const double s = 1.0 + std::norm(z);
  double d = 1.0 / (kPi * s * s);
  if (kind == Kind::Poincare) {
    for (const auto& q : punctures) {
      const double sg = sigma_proxy(std::abs(z - q));
      const double l = std::log(sg);
      d /= (sg * l) * (sg * l);
    }
  }
  return d;
}

double VolumeDensity::log_density(cplx z) const {
  double ld = -std::log(kPi) - 2.0 * std::log1p(std::norm(z));
  if (kind == Kind::Poincare) {
    for (const auto& q : punctures) {
      const double sg = sigma_proxy(std::abs(z - q));
      const double l = std::log(sg);
      ld -= 2.0 * (l + std::log(-l));
    }
  }
  return ld;
}

bool VolumeDensity::radial() const {
  for (const auto& q : punctures)
    if (std::abs(q) > kAtomMatchTol) return false;
  return true;
}

}  // namespace lab::geom
