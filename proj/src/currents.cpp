#include "lab/currents.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "lab/bergman.hpp"

namespace lab::currents {

namespace {

// Q, sum|s'|^2 and sum s' conj(s) in one Horner sweep.
struct QData {
  double q = 0.0;
  double dsum = 0.0;
  cplx mixed = 0.0;
};

QData qdata(const std::vector<std::vector<cplx>>& polys, cplx z) {
  QData out;
  for (const auto& c : polys) {
    cplx v = 0.0, dv = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
      dv = dv * z + v;
      v = v * z + c[i];
    }
    out.q += std::norm(v);
    out.dsum += std::norm(dv);
    out.mixed += dv * std::conj(v);
  }
  return out;
}

double fs_density_from(const std::vector<std::vector<cplx>>& polys, cplx z) {
  const QData d = qdata(polys, z);
  if (d.q <= 0.0) return 0.0;
  return (d.dsum * d.q - std::norm(d.mixed)) / (d.q * d.q) / kPi;
}

std::vector<double> radial_breaks(double R, const std::vector<double>& splits) {
  std::vector<double> br;
  for (double w = R; w > R * 1e-9; w *= 0.25) br.push_back(w);
  br.push_back(0.0);
  br.push_back(R);
  for (double d : splits) {
    if (d <= 0.0 || d >= R) continue;
    br.push_back(d);
    for (int l = 1; l <= 10; ++l) {
      const double off = d * std::pow(0.25, l);
      br.push_back(d - off);
      if (d + off < R) br.push_back(d + off);
    }
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

}  // namespace

CurrentMeasure fs_current(const l2::OrthoBasis& basis) {
  if (basis.d() == 0)
    throw UndefinedSpace("fs_current: empty section space");
  auto shared = std::make_shared<l2::OrthoBasis>(basis);
  CurrentMeasure c;
  const auto& space = basis.space;
  for (std::size_t i = 0; i < space.weight.atoms.size(); ++i) {
    const int ord = space.atom_orders.empty() ? 0 : space.atom_orders[i];
    if (ord > 0) {
      c.atoms.push_back({space.weight.atoms[i].point, (double)ord});
      c.singular_points.push_back(space.weight.atoms[i].point);
    }
  }
  c.atom_at_infinity = space.exponents.empty()
                           ? 0.0
                           : (double)(space.p - space.exponents.back());
  // Near a base point of order m, Q = |z|^{2m} Qd with the monomial factor
  // harmonic off the atom: evaluating the density on the deflated
  // coefficients is exact and avoids Q^2 underflow at high order.
  const int m0 = space.vanishing_order_at_origin();
  auto deflated = std::make_shared<std::vector<std::vector<cplx>>>();
  if (m0 > 0) {
    for (const auto& cf : shared->poly0)
      deflated->emplace_back(cf.begin() + m0, cf.end());
  }
  c.density0 = [shared, deflated, m0](cplx z) {
    if (m0 > 0 && std::abs(z) < 0.25) return fs_density_from(*deflated, z);
    return fs_density_from(shared->poly0, z);
  };
  c.densityinf = [shared](cplx w) {
    return fs_density_from(shared->polyinf, w);
  };
  c.declared_mass = space.p;
  return c;
}

CurrentMeasure curvature_current(const geom::SingularWeight& w) {
  CurrentMeasure c;
  for (const auto& a : w.atoms)
    if (a.nu != 0.0) c.atoms.push_back({a.point, a.nu});
  auto w0 = std::make_shared<geom::SingularWeight>(w);
  auto winf = std::make_shared<geom::SingularWeight>(geom::transition_weight(w));
  c.density0 = [w0](cplx z) { return geom::curvature_density(*w0, z); };
  c.densityinf = [winf](cplx z) { return geom::curvature_density(*winf, z); };
  c.declared_mass = w.smooth.fs_coeff + w.total_nu();
  c.singular_points = w.punctures;
  if (w.eps > 0.0) {
    for (const auto& q : w.punctures)
      if (std::abs(q) < 1e-12) c.origin_poincare = true;
  }
  if (c.origin_poincare) {
    // The F-term of the origin puncture integrates in closed form,
    // eps/(2 |log r0|); the remainder is bounded on the small disk.
    geom::SingularWeight rest = w;
    rest.punctures.clear();
    for (const auto& q : w.punctures)
      if (std::abs(q) >= 1e-12) rest.punctures.push_back(q);
    c.origin_head = [rest, eps = w.eps](double r0) {
      double head = eps / (2.0 * (-std::log(r0)));
      head += quad::adaptive(
          [&](double r) {
            double reg = 0.0;
            const int nang = 64;
            for (int i = 0; i < nang; ++i) {
              const cplx z = std::polar(r, 2.0 * kPi * i / nang);
              reg += rest.smooth.curvature(z) +
                     geom::poincare_curvature(rest, z);
            }
            return 2.0 * kPi * r * reg / nang;
          },
          0.0, r0, {1e-11, 1e-9, 52});
      return head;
    };
  }
  return c;
}

TestFunctionFamily standard_family() {
  return {
      {cplx(0.0, 0.0), 0.7, 1.0},
      {cplx(0.8, 0.0), 0.9, 1.0},
      {cplx(-0.6, 0.5), 0.8, 1.0},
      {cplx(0.0, 1.5), 1.1, 1.0},
      {cplx(-1.2, -0.9), 1.0, 1.0},
  };
}

double disk_integral(const std::function<double(cplx)>& f, cplx center,
                     double R, const std::vector<double>& split_radii,
                     const quad::Tol& tol, int nang) {
  const auto ring = [&](double r) {
    double acc = 0.0;
    for (int i = 0; i < nang; ++i)
      acc += f(center + std::polar(r, 2.0 * kPi * i / nang));
    return acc * (2.0 * kPi / nang) * r;
  };
  return quad::adaptive_panels(ring, radial_breaks(R, split_radii), tol);
}

double pair_current(const CurrentMeasure& c, const TestFunction& chi,
                    const quad::Tol& tol) {
  double s = 0.0;
  for (const auto& [pt, m] : c.atoms) s += chi(pt) * m;
  // chi has compact support in the chart, so the infinity atom never pairs.
  std::vector<double> splits;
  for (const auto& [pt, m] : c.atoms) splits.push_back(std::abs(pt - chi.center));
  for (const auto& q : c.singular_points) splits.push_back(std::abs(q - chi.center));
  s += disk_integral([&](cplx z) { return chi(z) * c.density0(z); }, chi.center,
                     chi.radius, splits, tol);
  return s;
}

double weak_distance(const CurrentMeasure& c1, const CurrentMeasure& c2,
                     const TestFunctionFamily& family, const quad::Tol& tol) {
  double d = 0.0;
  for (const auto& chi : family)
    d = std::max(d, std::abs(pair_current(c1, chi, tol) -
                             pair_current(c2, chi, tol)));
  return d;
}

SiuSplit siu_decompose(const CurrentMeasure& c) {
  return {c.atoms, c.atom_at_infinity, c.density0};
}

namespace {

double mass_disk(const std::function<double(cplx)>& density,
                 const std::vector<double>& splits,
                 const std::function<double(double)>& origin_head,
                 const quad::Tol& tol, int nang = 192) {
  const auto ring = [&](double r) {
    double acc = 0.0;
    for (int i = 0; i < nang; ++i)
      acc += density(std::polar(r, 2.0 * kPi * i / nang));
    return acc * (2.0 * kPi / nang) * r;
  };
  double s = 0.0;
  if (origin_head) {
    // analytic mass of the small disk; quadrature can't represent the
    // density there
    s += origin_head(0.05);
    std::vector<double> br;
    br.push_back(0.05);
    for (double d : splits)
      if (d > 0.05 && d < 1.0) br.push_back(d);
    br.push_back(1.0);
    std::sort(br.begin(), br.end());
    s += quad::adaptive_panels(ring, br, tol);
  } else {
    s += quad::adaptive_panels(ring, radial_breaks(1.0, splits), tol);
  }
  return s;
}

}  // namespace

double total_mass_quadrature(const CurrentMeasure& c, const quad::Tol& tol) {
  double m = c.atom_at_infinity;
  for (const auto& [pt, mass] : c.atoms) m += mass;

  std::vector<double> splits0;
  for (const auto& [pt, mass] : c.atoms) splits0.push_back(std::abs(pt));
  for (const auto& q : c.singular_points) splits0.push_back(std::abs(q));
  m += mass_disk(c.density0, splits0, c.origin_head, tol);

  std::vector<double> splitsinf;
  for (const auto& [pt, mass] : c.atoms)
    if (std::abs(pt) > 1e-12) splitsinf.push_back(1.0 / std::abs(pt));
  for (const auto& q : c.singular_points)
    if (std::abs(q) > 1e-12) splitsinf.push_back(1.0 / std::abs(q));
  m += mass_disk(c.densityinf, splitsinf, nullptr, tol);
  return m;
}

double pair_ddc_log_bergman(const l2::OrthoBasis& basis,
                            const TestFunction& chi, const quad::Tol& tol) {
  std::vector<double> splits;
  for (const auto& a : basis.space.weight.atoms)
    splits.push_back(std::abs(a.point - chi.center));
  return disk_integral(
      [&](cplx z) {
        const double lap = chi.laplacian(z);
        if (lap == 0.0) return 0.0;
        return bergman::log_bergman_eval(basis, z) * lap / (2.0 * kPi);
      },
      chi.center, chi.radius, splits, tol);
}

// ---------------------------------------------------------------------------
// Monge-Ampère engine.
// ---------------------------------------------------------------------------

ConvexProfile ConvexProfile::sample(
    const std::function<double(double, double)>& g, Box domain, int ns,
    int nt) {
  ConvexProfile p;
  p.domain = domain;
  p.ns = ns;
  p.nt = nt;
  p.values.resize((ns + 1) * (nt + 1));
  for (int j = 0; j <= nt; ++j)
    for (int i = 0; i <= ns; ++i)
      p.values[i + j * (ns + 1)] =
          g(domain.s0 + (domain.s1 - domain.s0) * i / ns,
            domain.t0 + (domain.t1 - domain.t0) * j / nt);
  return p;
}

bool ConvexProfile::midpoint_convex(double tol) const {
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double eps = tol * scale;
  const auto v = [&](int i, int j) { return at(i, j); };
  for (int j = 0; j <= nt; ++j)
    for (int i = 1; i < ns; ++i)
      if (v(i - 1, j) + v(i + 1, j) < 2.0 * v(i, j) - eps) return false;
  for (int j = 1; j < nt; ++j)
    for (int i = 0; i <= ns; ++i)
      if (v(i, j - 1) + v(i, j + 1) < 2.0 * v(i, j) - eps) return false;
  for (int j = 1; j < nt; ++j)
    for (int i = 1; i < ns; ++i) {
      if (v(i - 1, j - 1) + v(i + 1, j + 1) < 2.0 * v(i, j) - eps) return false;
      if (v(i - 1, j + 1) + v(i + 1, j - 1) < 2.0 * v(i, j) - eps) return false;
    }
  return true;
}

namespace {

struct Pt {
  double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Area of the convex hull of a small point set (monotone chain + shoelace).
double hull_area(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const int n = (int)pts.size();
  if (n < 3) return 0.0;
  std::vector<Pt> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double a = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Pt& p = hull[i];
    const Pt& q = hull[(i + 1) % hull.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(a);
}

}  // namespace

double real_ma_measure(const ConvexProfile& g, const Box& B) {
  if (!g.midpoint_convex())
    throw NonConvexProfile("real_ma_measure: profile fails midpoint convexity");
  const double hs = g.hs(), ht = g.ht();
  const auto v = [&](int i, int j) { return g.at(i, j); };
  // triangle gradients of cell (ci,cj): lower T0 and upper T1
  const auto grad0 = [&](int ci, int cj) -> Pt {
    return {(v(ci + 1, cj) - v(ci, cj)) / hs,
            (v(ci + 1, cj + 1) - v(ci + 1, cj)) / ht};
  };
  const auto grad1 = [&](int ci, int cj) -> Pt {
    return {(v(ci + 1, cj + 1) - v(ci, cj + 1)) / hs,
            (v(ci, cj + 1) - v(ci, cj)) / ht};
  };
  double area = 0.0;
  for (int j = 1; j < g.nt; ++j) {
    const double t = g.domain.t0 + ht * j;
    for (int i = 1; i < g.ns; ++i) {
      const double s = g.domain.s0 + hs * i;
      if (!B.contains(s, t)) continue;
      const std::vector<Pt> star = {grad0(i - 1, j - 1), grad1(i - 1, j - 1),
                                    grad1(i, j - 1),     grad0(i - 1, j),
                                    grad0(i, j),         grad1(i, j)};
      area += hull_area(star);
    }
  }
  return 2.0 * area;
}

double real_ma_measure_1d(const std::function<double(double)>& g, double s1,
                          double s2, double h) {
  const auto d = [&](double s) { return (g(s + h) - g(s - h)) / (2.0 * h); };
  return d(s2) - d(s1);
}

MaErrorTable ma_convergence_harness(
    const std::function<std::function<double(double, double)>(int)>& v_p,
    const std::function<double(double, double)>& v,
    const std::vector<Box>& regions, const std::vector<int>& p_list,
    Box domain, const std::function<int(int)>& cells_for) {
  MaErrorTable table;
  table.regions = regions;
  table.p_list = p_list;
  table.errors.assign(regions.size(), {});

  const int limit_cells = cells_for(p_list.empty() ? 8 : p_list.back());
  const ConvexProfile limit =
      ConvexProfile::sample(v, domain, limit_cells, limit_cells);
  std::vector<double> ref;
  for (const auto& B : regions) ref.push_back(real_ma_measure(limit, B));

  for (const int p : p_list) {
    const int cells = cells_for(p);
    const ConvexProfile prof =
        ConvexProfile::sample(v_p(p), domain, cells, cells);
    for (std::size_t r = 0; r < regions.size(); ++r)
      table.errors[r].push_back(
          std::abs(real_ma_measure(prof, regions[r]) - ref[r]));
  }
  for (std::size_t r = 0; r < regions.size(); ++r)
    table.verdicts.push_back(trend_pass(table.errors[r], 0.6, 1e-8));
  return table;
}

std::function<double(double, double)> toric_potential(
    const l2::ProductBasis& basis) {
  struct Term {
    double a, b, w;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  const auto extract = [](const l2::OrthoBasis& fb, int j, double* k,
                          double* logc) {
    const auto& poly = fb.poly0[j];
    int found = -1;
    double cmax = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
      cmax = std::max(cmax, std::abs(poly[i]));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (std::abs(poly[i]) > 1e-10 * cmax) {
        if (found >= 0)
          throw NotToric("toric_potential: basis is not monomial");
        found = (int)i;
      }
    }
    *k = found;
    *logc = std::log(std::abs(poly[found]));
  };
  const int p = basis.p();
  for (int j1 = 0; j1 < basis.b1.d(); ++j1)
    for (int j2 = 0; j2 < basis.b2.d(); ++j2) {
      double a, b, l1, l2;
      extract(basis.b1, j1, &a, &l1);
      extract(basis.b2, j2, &b, &l2);
      terms->push_back({a, b, 2.0 * (l1 + l2)});
    }
  return [terms, p](double s, double t) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& u : *terms)
      m = std::max(m, 2.0 * (u.a * s + u.b * t) + u.w);
    double acc = 0.0;
    for (const auto& u : *terms)
      acc += std::exp(2.0 * (u.a * s + u.b * t) + u.w - m);
    return (std::log(acc) + m) / (2.0 * p);
  };
}

ToricSquareResult toric_fs_square(const l2::ProductBasis& basis,
                                  const std::vector<Box>& regions, Box domain,
                                  int cells) {
  if (basis.b1.d() == 0 || basis.b2.d() == 0)
    throw UndefinedSpace("toric_fs_square: empty factor space");
  if (basis.b1.gram_offdiag_max > 1e-9 || basis.b2.gram_offdiag_max > 1e-9)
    throw NotToric("toric_fs_square: factor Gram is not diagonal");
  const auto u_p = toric_potential(basis);
  ConvexProfile prof = ConvexProfile::sample(u_p, domain, cells, cells);
  const int p = basis.p();
  prof.gradient_box = {basis.b1.space.exponents.front() / (double)p,
                       basis.b1.space.exponents.back() / (double)p,
                       basis.b2.space.exponents.front() / (double)p,
                       basis.b2.space.exponents.back() / (double)p};
  ToricSquareResult out;
  for (const auto& B : regions) out.region_mass.push_back(real_ma_measure(prof, B));
  out.interior_total = real_ma_measure(prof, domain);
  out.boundary_correction = 2.0 - out.interior_total;
  return out;
}

}  // namespace lab::currents
