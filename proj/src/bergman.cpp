#include "lab/bergman.hpp"

#include <algorithm>
#include <cmath>

namespace lab::bergman {

namespace {

double poly_abs2_sum(const std::vector<std::vector<cplx>>& polys, cplx x) {
  double q = 0.0;
  for (const auto& c : polys) {
    cplx v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    q += std::norm(v);
  }
  return q;
}

}  // namespace

double log_bergman_eval(const l2::OrthoBasis& basis, cplx x) {
  if (basis.d() == 0)
    throw UndefinedSpace("bergman_eval: empty section space");
  const int p = basis.p();
  if (std::abs(x) <= 1.0 || !basis.has_inf) {
    const double q = poly_abs2_sum(basis.poly0, x);
    return std::log(q) - 2.0 * p * geom::eval_weight(basis.space.weight, x);
  }
  const cplx w = geom::chart_transition(x);
  const double q = poly_abs2_sum(basis.polyinf, w);
  return std::log(q) - 2.0 * p * geom::eval_weight(basis.weight_inf, w);
}

double bergman_eval(const l2::OrthoBasis& basis, cplx x) {
  return std::exp(log_bergman_eval(basis, x));
}

double extremal_check(const l2::OrthoBasis& basis, cplx x, int trials,
                      RngStream& rng, bool include_extremal) {
  if (basis.d() == 0)
    throw UndefinedSpace("extremal_check: empty section space");
  const int d = basis.d();
  const int p = basis.p();
  const double e2pphi =
      std::exp(-2.0 * p * geom::eval_weight(basis.space.weight, x));
  std::vector<cplx> vals;
  l2::eval_sections(basis, x, &vals);

  double best = -1.0;
  const auto value_of = [&](const Eigen::VectorXcd& a) {
    cplx s = 0.0;
    for (int j = 0; j < d; ++j) s += a(j) * vals[j];
    return std::norm(s) * e2pphi;
  };
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd a(d);
    for (int j = 0; j < d; ++j) a(j) = rng.cgaussian();
    a /= a.norm();
    best = std::max(best, value_of(a));
  }
  if (include_extremal) {
    Eigen::VectorXcd a(d);
    for (int j = 0; j < d; ++j) a(j) = std::conj(vals[j]);
    const double n = a.norm();
    if (n > 0.0) {
      a /= n;
      best = std::max(best, value_of(a));
    }
  }
  return best;
}

double normalization_check(const l2::OrthoBasis& basis, const quad::Tol& tol) {
  if (basis.d() == 0) return 0.0;
  const auto& space = basis.space;
  const auto& vol = space.volume;
  const int p = space.p;

  if (space.radial) {
    const double nu0 = space.weight.total_nu();
    const int kmin = space.k_min();
    const bool poi0 = vol.kind == geom::VolumeDensity::Kind::Poincare &&
                      !vol.punctures.empty();
    // Q(t) = t^{2 kmin} * Qd(t): pull the forced vanishing order out so the
    // kernel evaluates through lt near the origin. Beyond t = 1 the
    // chart-infinity form takes over.
    std::vector<std::vector<cplx>> deflated;
    for (const auto& c : basis.poly0)
      deflated.emplace_back(c.begin() + kmin, c.end());
    const auto logf_lt = [&](double lt) {
      const double t = std::exp(lt);
      double logP;
      if (lt <= 0.0) {
        double qd = 0.0;
        for (const auto& c : deflated) {
          cplx v = 0.0;
          for (std::size_t i = c.size(); i-- > 0;) v = v * t + c[i];
          qd += std::norm(v);
        }
        logP = 2.0 * kmin * lt + std::log(qd) -
               2.0 * p * l2::radial_weight_log(space.weight, t, lt);
      } else {
        logP = log_bergman_eval(basis, cplx(t, 0.0));
      }
      return logP + l2::radial_vol_log(vol, t, lt) + std::log(2.0 * kPi) + lt;
    };
    const double alpha0 = 2.0 * (kmin - p * nu0) + 1.0;
    return l2::radial_integral_lt(logf_lt, alpha0, poi0, tol);
  }

  // General path: angular trapezoid, adaptive radius, tail via t = 1/u.
  const int nang = std::max(64, 4 * p + 8);
  const auto ring = [&](double t) {
    double acc = 0.0;
    for (int i = 0; i < nang; ++i) {
      const cplx z = std::polar(t, 2.0 * kPi * i / nang);
      acc += bergman_eval(basis, z) * vol(z);
    }
    return acc * (2.0 * kPi / nang) * t;
  };
  std::vector<double> br = quad::log_refined_breaks(0.0, 1.0, 10, 0.2);
  for (const auto& a : space.weight.atoms) {
    const double r = std::abs(a.point);
    if (r > 1e-9 && r < 1.0) br.push_back(r);
  }
  std::sort(br.begin(), br.end());
  quad::Tol part = tol;
  part.abs = tol.abs / 2.0;
  double s = quad::adaptive_panels(ring, br, part);
  s += quad::adaptive(
      [&](double u) { return u <= 0.0 ? 0.0 : ring(1.0 / u) / (u * u); }, 0.0,
      1.0, part);
  return s;
}

std::vector<cplx> RegionGrid::points(
    const std::vector<geom::Atom>& atoms) const {
  std::vector<cplx> pts;
  for (int i = 0; i < nr; ++i) {
    const double r = r0 + (r1 - r0) * (nr == 1 ? 0.0 : (double)i / (nr - 1));
    for (int j = 0; j < ntheta; ++j) {
      const cplx z = std::polar(r, 2.0 * kPi * j / ntheta);
      bool ok = true;
      for (const auto& a : atoms)
        if (std::abs(z - a.point) < delta) ok = false;
      if (ok) pts.push_back(z);
    }
  }
  return pts;
}

BergmanDiagnostics mainhyp_diagnostic(const geom::SingularWeight& w,
                                      const geom::VolumeDensity& vol,
                                      const std::vector<int>& p_list,
                                      const RegionGrid& region,
                                      const l2::GramSpec& spec,
                                      const std::string& cache_dir) {
  BergmanDiagnostics diag;
  diag.p_list = p_list;
  const std::vector<cplx> pts = region.points(w.atoms);
  diag.grid_points = (int)pts.size();
  for (const int p : p_list) {
    const l2::OrthoBasis basis = l2::build_basis(p, w, vol, spec, cache_dir);
    if (basis.d() == 0)
      throw UndefinedSpace("mainhyp_diagnostic: d_p = 0 at p=" +
                           std::to_string(p));
    double sup = 0.0;
    for (const cplx z : pts)
      sup = std::max(sup, std::abs(log_bergman_eval(basis, z)) / p);
    diag.sup_abs.push_back(sup);
  }
  if (diag.sup_abs.size() >= 2) {
    diag.has_verdict = true;
    diag.verdict = trend_pass(diag.sup_abs, 0.6);
  }
  return diag;
}

std::pair<double, double> bke_upper_check(const l2::OrthoBasis& basis, cplx z,
                                          double r) {
  if (!(r > 0.0)) throw Error("bke_upper_check: radius must be positive");
  const auto& w = basis.space.weight;
  for (const auto& a : w.atoms)
    if (std::abs(z - a.point) <= r)
      throw BallTouchesAtom("bke_upper_check: ball touches an atom");

  const int p = basis.p();
  const double lhs = log_bergman_eval(basis, z) / p;

  // Sample the closed ball, boundary included, for max phi and the Lebesgue
  // vs f*Omega density bound.
  double max_phi = geom::eval_weight(w, z);
  double vmax = 1.0 / basis.space.volume(z);
  const int nr = 24, nth = 48;
  for (int i = 1; i <= nr; ++i) {
    const double rho = r * i / nr;
    for (int j = 0; j < nth; ++j) {
      const cplx y = z + std::polar(rho, 2.0 * kPi * j / nth);
      max_phi = std::max(max_phi, geom::eval_weight(w, y));
      vmax = std::max(vmax, 1.0 / basis.space.volume(y));
    }
  }
  const double C = vmax / kPi;
  const double rhs = std::log(C / (r * r)) / p +
                     2.0 * (max_phi - geom::eval_weight(w, z));
  return {lhs, rhs};
}

}  // namespace lab::bergman
