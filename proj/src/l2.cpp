#include "lab/l2.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace lab::l2 {

namespace fs = std::filesystem;

int SectionSpace::vanishing_order_at_origin() const {
  if (exponents.empty()) return 0;
  if (radial) return exponents.front();
  int ord = 0;
  for (const auto& c : base_factor) {
    if (std::abs(c) > 1e-14) break;
    ++ord;
  }
  return ord;
}

int min_exponent(int p, double nu, bool poincare_volume_at_atom) {
  if (nu <= 0.0) return 0;
  const double t = poincare_volume_at_atom ? p * nu : p * nu - 1.0;
  const double r = std::round(t);
  int k;
  if (std::abs(t - r) < 1e-9) {
    k = poincare_volume_at_atom ? (int)r : (int)r + 1;
  } else {
    k = poincare_volume_at_atom ? (int)std::ceil(t) : (int)std::floor(t) + 1;
  }
  return std::max(0, k);
}

namespace {

std::vector<cplx> poly_mul(const std::vector<cplx>& a,
                           const std::vector<cplx>& b) {
  std::vector<cplx> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

cplx poly_eval(const std::vector<cplx>& c, cplx z) {
  cplx v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * z + c[i];
  return v;
}

}  // namespace

SectionSpace integrability_filter(int p, const geom::SingularWeight& w,
                                  const geom::VolumeDensity& vol) {
  if (p < 0) throw Error("integrability_filter: p must be nonnegative");
  if (p > 64)
    throw Error("integrability_filter: p > 64 exceeds double-precision budget");
  SectionSpace s;
  s.model = w.model;
  s.p = p;
  s.weight = w;
  s.volume = vol;

  int total = 0;
  s.base_factor = {1.0};
  for (const auto& a : w.atoms) {
    bool poi = false;
    if (vol.kind == geom::VolumeDensity::Kind::Poincare) {
      for (const auto& q : vol.punctures)
        if (std::abs(q - a.point) < 1e-12) poi = true;
    }
    const int k = min_exponent(p, a.nu, poi);
    s.atom_orders.push_back(k);
    total += k;
    for (int i = 0; i < k; ++i) s.base_factor = poly_mul(s.base_factor, {-a.point, 1.0});
  }
  s.radial = w.radial() && vol.radial();
  if (total > p) {
    s.exponents.clear();  // d_p = 0: valid degenerate state, not a failure
    s.base_factor = {1.0};
    return s;
  }
  for (int k = total; k <= p; ++k) s.exponents.push_back(k);
  return s;
}

double prescale_factor(int p, int k) {
  return std::sqrt((p + 1) * binom(p, k));
}

namespace {

constexpr double kProxyKnee = 0.125;

}  // namespace

// phi(t) on the positive axis for a radial weight, with the atom part
// expressed through lt = log t so nothing underflows near the origin.
double radial_weight_log(const geom::SingularWeight& w, double t, double lt) {
  const double l1p = (t > 1e150) ? 2.0 * lt : std::log1p(t * t);
  double v = 0.5 * w.smooth.fs_coeff * l1p + w.smooth.quad_coeff * t * t +
             w.smooth.constant + w.total_nu() * lt;
  if (w.eps > 0.0 && !w.punctures.empty()) {
    double f = 0.0;
    for (std::size_t i = 0; i < w.punctures.size(); ++i) {
      const double lsig =
          (t <= kProxyKnee) ? lt : std::log(geom::sigma_proxy(t));
      f += -0.5 * std::log(-lsig);
    }
    v += w.eps * f;
  }
  return v;
}

// log of the radial volume density through lt = log t.
double radial_vol_log(const geom::VolumeDensity& vol, double t, double lt) {
  const double l1p = (t > 1e150) ? 2.0 * lt : std::log1p(t * t);
  double ld = -std::log(kPi) - 2.0 * l1p;
  if (vol.kind == geom::VolumeDensity::Kind::Poincare) {
    for (std::size_t i = 0; i < vol.punctures.size(); ++i) {
      const double lsig =
          (t <= kProxyKnee) ? lt : std::log(geom::sigma_proxy(t));
      ld -= 2.0 * (lsig + std::log(-lsig));
    }
  }
  return ld;
}

// Radial integral ∫_0^inf exp(logf_lt(log t)) dt. alpha0 is the power-law
// exponent of the integrand at t -> 0; poincare_at_zero switches the head
// substitution to y = -1/log t, which flattens (t log t)^{-2}-type factors.
// The integrand callable receives lt = log t and must be evaluable for
// arbitrarily negative lt.
double radial_integral_lt(const std::function<double(double)>& logf_lt,
                          double alpha0, bool poincare_at_zero,
                          const quad::Tol& tol) {
  const double t_head = 0.05;
  quad::Tol part = tol;
  part.abs = tol.abs / 3.0;

  double head;
  if (poincare_at_zero) {
    const double y1 = -1.0 / std::log(t_head);
    head = quad::adaptive(
        [&](double y) {
          if (y <= 0.0) return 0.0;
          return std::exp(logf_lt(-1.0 / y) - 1.0 / y - 2.0 * std::log(y));
        },
        0.0, y1, part);
  } else {
    const int m =
        alpha0 < 0.0 ? std::max(1, (int)std::ceil(2.0 / (1.0 + alpha0))) : 1;
    const double u1 = std::pow(t_head, 1.0 / m);
    head = quad::adaptive(
        [&](double u) {
          if (u <= 0.0) return 0.0;
          const double lu = std::log(u);
          return std::exp(logf_lt(m * lu) + std::log((double)m) +
                          (m - 1) * lu);
        },
        0.0, u1, part);
  }
  const double mid = quad::adaptive(
      [&](double t) { return std::exp(logf_lt(std::log(t))); }, t_head, 1.0,
      part);
  const double tail = quad::adaptive(
      [&](double u) {
        if (u <= 0.0) return 0.0;
        const double lu = std::log(u);
        return std::exp(logf_lt(-lu) - 2.0 * lu);
      },
      0.0, 1.0, part);
  return head + mid + tail;
}

Eigen::MatrixXcd gram_matrix(const SectionSpace& space, const GramSpec& spec) {
  const int d = space.d();
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(d, d);
  if (d == 0) return G;
  const int p = space.p;
  const auto& w = space.weight;
  const auto& vol = space.volume;

  if (space.radial) {
    const double nu0 = w.total_nu();
    const bool poi0 = vol.kind == geom::VolumeDensity::Kind::Poincare &&
                      !vol.punctures.empty();
    for (int j = 0; j < d; ++j) {
      const int k = space.exponents[j];
      const double pre = spec.prescale ? prescale_factor(p, k) : 1.0;
      const auto logf_lt = [&](double lt) {
        const double t = std::exp(lt);  // underflow harmless below
        return (2.0 * k + 1.0) * lt -
               2.0 * p * radial_weight_log(w, t, lt) +
               radial_vol_log(vol, t, lt) + 2.0 * std::log(pre) +
               std::log(2.0 * kPi);
      };
      const double alpha0 = 2.0 * (k - p * nu0) + 1.0;
      G(j, j) = radial_integral_lt(logf_lt, alpha0, poi0, spec.radial_tol);
      if (!(G(j, j).real() > 0.0) || !std::isfinite(G(j, j).real()))
        throw NotPD("gram_matrix: nonpositive radial norm");
    }
    return G;
  }

  // General path: angular trapezoid (spectrally exact for the trigonometric
  // polynomials a radial weight produces) times adaptive radial quadrature
  // with panels split at the atom radii.
  const int nang = spec.angular_nodes > 0 ? spec.angular_nodes : 4 * p + 8;
  if (nang < 4 * p + 4)
    throw Error("gram_matrix: angular node count below Nyquist");
  const int base_deg = (int)space.base_factor.size() - 1;

  const auto scaled_section = [&](int j, cplx z, double pphi) -> cplx {
    // B_j(z) e^{-p phi} computed through logs: B_j = prod(z-a_i)^{k_i} z^m.
    double lmod = -pphi;
    double arg = 0.0;
    for (const auto& a : w.atoms) {
      // recover multiplicity from the filter
      bool poi = false;
      if (vol.kind == geom::VolumeDensity::Kind::Poincare)
        for (const auto& q : vol.punctures)
          if (std::abs(q - a.point) < 1e-12) poi = true;
      const int ki = min_exponent(p, a.nu, poi);
      if (ki == 0) continue;
      const cplx dzm = z - a.point;
      lmod += ki * std::log(std::abs(dzm));
      arg += ki * std::arg(dzm);
    }
    const int m = space.exponents[j] - base_deg;
    if (m > 0) {
      lmod += m * std::log(std::abs(z));
      arg += m * std::arg(z);
    }
    return std::polar(std::exp(lmod), arg);
  };

  auto entry = [&](int j, int k) -> cplx {
    const double pre_j = spec.prescale ? prescale_factor(p, space.exponents[j]) : 1.0;
    const double pre_k = spec.prescale ? prescale_factor(p, space.exponents[k]) : 1.0;
    const auto fring = [&](double t) -> cplx {
      cplx acc = 0.0;
      for (int i = 0; i < nang; ++i) {
        const cplx z = std::polar(t, 2.0 * kPi * i / nang);
        const double pphi = p * geom::eval_weight(w, z);
        const cplx vj = scaled_section(j, z, pphi);
        const cplx vk = scaled_section(k, z, pphi);
        acc += vj * std::conj(vk) * vol(z);
      }
      return acc * (2.0 * kPi / nang) * t;
    };
    // breakpoints: log refinement toward 0 and the atom radii
    std::vector<double> br = quad::log_refined_breaks(0.0, 1.0, 10, 0.2);
    for (const auto& a : w.atoms) {
      const double r = std::abs(a.point);
      if (r > 1e-9 && r < 1.0) {
        for (int l = 1; l <= 8; ++l) {
          br.push_back(r * (1.0 - std::pow(0.25, l)));
          br.push_back(std::min(1.0, r * (1.0 + std::pow(0.25, l))));
        }
        br.push_back(r);
      }
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    quad::Tol tol = spec.radial_tol;
    tol.abs *= 0.5;
    double re = quad::adaptive_panels(
        [&](double t) { return fring(t).real(); }, br, tol);
    double im = quad::adaptive_panels(
        [&](double t) { return fring(t).imag(); }, br, tol);
    // tail via t = 1/u
    re += quad::adaptive(
        [&](double u) { return u <= 0.0 ? 0.0 : fring(1.0 / u).real() / (u * u); },
        0.0, 1.0, tol);
    im += quad::adaptive(
        [&](double u) { return u <= 0.0 ? 0.0 : fring(1.0 / u).imag() / (u * u); },
        0.0, 1.0, tol);
    return pre_j * pre_k * cplx(re, im);
  };

  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      G(j, k) = entry(j, k);
      if (k != j) G(k, j) = std::conj(G(j, k));
    }
  return G;
}

OrthoBasis orthonormalize(const SectionSpace& space, const Eigen::MatrixXcd& G,
                          const GramSpec& spec) {
  OrthoBasis b;
  b.space = space;
  b.spec = spec;
  b.provenance_hash = content_hash(space, spec);
  const int d = space.d();
  b.coeff = Eigen::MatrixXcd::Identity(d, d);
  if (d > 0) {
    Eigen::MatrixXcd H = 0.5 * (G + G.adjoint());
    double offmax = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (j != k) offmax = std::max(offmax, std::abs(H(j, k)));
    b.gram_offdiag_max = offmax;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0) throw NotPD("orthonormalize: Gram not positive definite");
    b.gram_condition = lmax / lmin;
    if (b.gram_condition > 1e12)
      throw IllConditioned("orthonormalize: Gram condition exceeds 1e12");

    Eigen::LLT<Eigen::MatrixXcd> llt(H);
    if (llt.info() != Eigen::Success)
      throw NotPD("orthonormalize: Cholesky failed");
    b.coeff = llt.matrixL().solve(Eigen::MatrixXcd::Identity(d, d));
  }
  return with_coefficients(b, b.coeff);
}

OrthoBasis with_coefficients(const OrthoBasis& basis,
                             const Eigen::MatrixXcd& coeff) {
  OrthoBasis b = basis;
  b.coeff = coeff;
  const SectionSpace& s = b.space;
  const int d = s.d();
  const int p = s.p;
  const int base_deg = (int)s.base_factor.size() - 1;
  b.poly0.assign(d, std::vector<cplx>(p + 1, 0.0));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const cplx c =
          coeff(j, k) * (b.spec.prescale
                             ? prescale_factor(p, s.exponents[k])
                             : 1.0);
      if (c == cplx(0.0, 0.0)) continue;
      if (s.radial) {
        b.poly0[j][s.exponents[k]] += c;
      } else {
        const int shift = s.exponents[k] - base_deg;
        for (std::size_t i = 0; i < s.base_factor.size(); ++i)
          b.poly0[j][i + shift] += c * s.base_factor[i];
      }
    }
  }
  b.polyinf.assign(d, std::vector<cplx>(p + 1, 0.0));
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= p; ++i) b.polyinf[j][i] = b.poly0[j][p - i];
  try {
    b.weight_inf = geom::transition_weight(s.weight);
    b.has_inf = true;
  } catch (const Error&) {
    b.has_inf = false;
  }
  return b;
}

cplx section_eval(const OrthoBasis& basis, const Eigen::VectorXcd& a, cplx x) {
  if (basis.d() == 0) return 0.0;
  std::vector<cplx> combined(basis.p() + 1, 0.0);
  for (int j = 0; j < basis.d(); ++j)
    for (int i = 0; i <= basis.p(); ++i) combined[i] += a(j) * basis.poly0[j][i];
  return poly_eval(combined, x);
}

void eval_sections(const OrthoBasis& basis, cplx x, std::vector<cplx>* values,
                   std::vector<cplx>* derivs) {
  const int d = basis.d();
  if (values) values->assign(d, 0.0);
  if (derivs) derivs->assign(d, 0.0);
  for (int j = 0; j < d; ++j) {
    const auto& c = basis.poly0[j];
    cplx v = 0.0, dv = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
      dv = dv * x + v;
      v = v * x + c[i];
    }
    if (values) (*values)[j] = v;
    if (derivs) (*derivs)[j] = dv;
  }
}

ProductSectionSpace product_filter(int p, const geom::ToricWeight& w,
                                   const geom::ToricVolume& vol) {
  ProductSectionSpace s;
  s.p = p;
  s.s1 = integrability_filter(p, w.factor1, vol.factor1);
  s.s2 = integrability_filter(p, w.factor2, vol.factor2);
  s.s1.model = geom::ModelKind::ProductSphere;
  s.s2.model = geom::ModelKind::ProductSphere;
  return s;
}

ProductBasis product_orthonormalize(const ProductSectionSpace& space,
                                    const GramSpec& spec) {
  ProductBasis b;
  b.b1 = orthonormalize(space.s1, gram_matrix(space.s1, spec), spec);
  b.b2 = orthonormalize(space.s2, gram_matrix(space.s2, spec), spec);
  return b;
}

// ---------------------------------------------------------------------------
// Cache.
// ---------------------------------------------------------------------------

namespace {
struct HashBuf {
  std::string bytes;
  void u64(std::uint64_t v) { bytes.append((const char*)&v, 8); }
  void f64(double v) { bytes.append((const char*)&v, 8); }
  void c128(cplx v) {
    f64(v.real());
    f64(v.imag());
  }
};
}  // namespace

std::uint64_t content_hash(const SectionSpace& space, const GramSpec& spec) {
  HashBuf h;
  h.u64((std::uint64_t)space.model);
  h.u64((std::uint64_t)space.p);
  const auto& w = space.weight;
  h.f64(w.smooth.fs_coeff);
  h.f64(w.smooth.quad_coeff);
  h.f64(w.smooth.constant);
  h.u64(w.smooth.has_closed_form);
  for (const auto& a : w.atoms) {
    h.c128(a.point);
    h.f64(a.nu);
  }
  h.f64(w.eps);
  for (const auto& q : w.punctures) h.c128(q);
  h.u64((std::uint64_t)space.volume.kind);
  for (const auto& q : space.volume.punctures) h.c128(q);
  h.f64(spec.radial_tol.abs);
  h.f64(spec.radial_tol.rel);
  h.u64((std::uint64_t)spec.angular_nodes);
  h.u64((std::uint64_t)spec.prescale);
  return fnv1a(h.bytes);
}

static std::string cache_path(const std::string& dir, std::uint64_t key) {
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.obc",
                (unsigned long long)key);
  return (fs::path(dir) / name).string();
}

std::optional<Eigen::MatrixXcd> cache_load(const std::string& dir,
                                           std::uint64_t key, int expected_d,
                                           bool* corrupt) {
  if (corrupt) *corrupt = false;
  const std::string path = cache_path(dir, key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint64_t magic = 0, version = 0, dp = 0;
  in.read((char*)&magic, 8);
  in.read((char*)&version, 8);
  in.read((char*)&dp, 8);
  if (!in || magic != kCacheMagic || version != kCacheVersion ||
      dp != (std::uint64_t)expected_d) {
    if (corrupt) *corrupt = true;
    return std::nullopt;
  }
  Eigen::MatrixXcd C(expected_d, expected_d);
  for (int j = 0; j < expected_d; ++j)
    for (int k = 0; k < expected_d; ++k) {
      double re = 0, im = 0;
      in.read((char*)&re, 8);
      in.read((char*)&im, 8);
      C(j, k) = cplx(re, im);
    }
  if (!in) {
    if (corrupt) *corrupt = true;
    return std::nullopt;
  }
  return C;
}

void cache_store(const std::string& dir, std::uint64_t key,
                 const Eigen::MatrixXcd& coeff) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string path = cache_path(dir, key);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cache_store: cannot open " + tmp);
    const std::uint64_t magic = kCacheMagic, version = kCacheVersion,
                        dp = (std::uint64_t)coeff.rows();
    out.write((const char*)&magic, 8);
    out.write((const char*)&version, 8);
    out.write((const char*)&dp, 8);
    for (int j = 0; j < coeff.rows(); ++j)
      for (int k = 0; k < coeff.cols(); ++k) {
        const double re = coeff(j, k).real(), im = coeff(j, k).imag();
        out.write((const char*)&re, 8);
        out.write((const char*)&im, 8);
      }
    if (!out) throw IoFailure("cache_store: write failed for " + tmp);
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoFailure("cache_store: rename failed for " + path);
}

OrthoBasis build_basis(int p, const geom::SingularWeight& w,
                       const geom::VolumeDensity& vol, const GramSpec& spec,
                       const std::string& cache_dir) {
  const SectionSpace space = integrability_filter(p, w, vol);
  if (!cache_dir.empty()) {
    const std::uint64_t key = content_hash(space, spec);
    bool corrupt = false;
    if (auto C = cache_load(cache_dir, key, space.d(), &corrupt)) {
      OrthoBasis b;
      b.space = space;
      b.spec = spec;
      b.provenance_hash = key;
      b.coeff = *C;
      // condition re-derived from the cached factor
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(*C);
      const double smin = svd.singularValues().minCoeff();
      const double smax = svd.singularValues().maxCoeff();
      b.gram_condition = (smin > 0.0) ? (smax / smin) * (smax / smin) : 0.0;
      return with_coefficients(b, *C);
    }
    OrthoBasis b = orthonormalize(space, gram_matrix(space, spec), spec);
    cache_store(cache_dir, key, b.coeff);
    return b;
  }
  return orthonormalize(space, gram_matrix(space, spec), spec);
}

}  // namespace lab::l2
