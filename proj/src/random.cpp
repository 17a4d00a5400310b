#include "lab/random.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace lab::random {

Eigen::VectorXcd SphereSampler::sample(std::uint64_t index) const {
  RngStream rng(master_seed, experiment_id, index);
  Eigen::VectorXcd a(dim);
  for (int j = 0; j < dim; ++j) a(j) = rng.cgaussian();
  const double n = a.norm();
  if (n == 0.0) return sample(index + 0x9e3779b9ULL);  // measure-zero retry
  return a / n;
}

namespace {

cplx poly_eval(const std::vector<cplx>& c, cplx z) {
  cplx v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * z + c[i];
  return v;
}

cplx poly_deriv_eval(const std::vector<cplx>& c, cplx z) {
  cplx dv = 0.0, v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) {
    dv = dv * z + v;
    v = v * z + c[i];
  }
  return dv;
}

// Roots of the full coefficient vector (no trailing/leading trimming):
// balanced companion matrix plus two Newton steps.
std::vector<cplx> dense_roots(const std::vector<cplx>& coeffs) {
  const int deg = (int)coeffs.size() - 1;
  if (deg <= 0) return {};
  if (deg == 1) return {-coeffs[0] / coeffs[1]};
  // variable scaling y = z / r equalizes the extreme coefficients
  double r = std::pow(std::abs(coeffs[0] / coeffs[deg]), 1.0 / deg);
  if (!(r > 0.0) || !std::isfinite(r)) r = 1.0;
  std::vector<cplx> monic(deg);
  double rp = 1.0;
  std::vector<double> rpow(deg + 1);
  for (int k = 0; k <= deg; ++k) {
    rpow[k] = rp;
    rp *= r;
  }
  for (int k = 0; k < deg; ++k)
    monic[k] = coeffs[k] * rpow[k] / (coeffs[deg] * rpow[deg]);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -monic[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> roots;
  for (int i = 0; i < deg; ++i) {
    cplx z = es.eigenvalues()(i) * r;
    for (int it = 0; it < 2; ++it) {
      const cplx d = poly_deriv_eval(coeffs, z);
      if (std::abs(d) == 0.0) break;
      z -= poly_eval(coeffs, z) / d;
    }
    roots.push_back(z);
  }
  return roots;
}

std::vector<std::pair<cplx, int>> cluster_roots(std::vector<cplx> roots,
                                                double tol) {
  std::vector<std::pair<cplx, int>> out;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    cplx sum = roots[i];
    int m = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(roots[j] - roots[i]) <= tol * (1.0 + std::abs(roots[i]))) {
        sum += roots[j];
        ++m;
        used[j] = true;
      }
    }
    out.push_back({sum / (double)m, m});
  }
  return out;
}

std::uint64_t hash_vector(const Eigen::VectorXcd& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < a.size(); ++i) {
    const double re = a(i).real(), im = a(i).imag();
    h = fnv1a(&re, 8, h);
    h = fnv1a(&im, 8, h);
  }
  return h;
}

}  // namespace

ZeroSet zeros(const l2::OrthoBasis& basis, const Eigen::VectorXcd& a,
              const RootTols& tols) {
  if (basis.d() == 0) throw UndefinedSpace("zeros: empty section space");
  if (a.norm() == 0.0) throw Error("zeros: zero coefficient vector");
  const int p = basis.p();
  std::vector<cplx> c(p + 1, 0.0);
  for (int j = 0; j < basis.d(); ++j)
    for (int k = 0; k <= p; ++k) c[k] += a(j) * basis.poly0[j][k];

  double cmax = 0.0;
  for (const auto& ck : c) cmax = std::max(cmax, std::abs(ck));
  const double cut = tols.lead * cmax;
  int k_top = 0, k_bot = p;
  for (int k = 0; k <= p; ++k)
    if (std::abs(c[k]) > cut) {
      k_top = std::max(k_top, k);
      k_bot = std::min(k_bot, k);
    }

  ZeroSet zs;
  zs.p = p;
  zs.coeff_hash = hash_vector(a);
  zs.at_infinity = p - k_top;
  if (k_bot > 0) zs.roots.push_back({cplx(0.0, 0.0), k_bot});
  if (k_top == k_bot) return zs;

  std::vector<cplx> deflated(c.begin() + k_bot, c.begin() + k_top + 1);
  const std::vector<cplx> raw = dense_roots(deflated);
  // residual gate relative to the coefficient magnitudes at the root
  for (const cplx z : raw) {
    double scale = 0.0, zp = 1.0;
    for (const auto& dk : deflated) {
      scale += std::abs(dk) * zp;
      zp *= std::abs(z);
    }
    if (std::abs(poly_eval(deflated, z)) > tols.res * std::max(scale, 1e-300))
      throw NumericallyDegenerate("zeros: root residual above tolerance");
  }
  for (const auto& [z, m] : cluster_roots(raw, tols.cluster))
    zs.roots.push_back({z, m});
  return zs;
}

EmpiricalZeroMeasure normalize(const ZeroSet& zs) {
  EmpiricalZeroMeasure mu;
  for (const auto& [z, m] : zs.roots)
    mu.atoms.push_back({z, (double)m / zs.p});
  mu.mass_at_infinity = (double)zs.at_infinity / zs.p;
  return mu;
}

double pair_empirical(const EmpiricalZeroMeasure& mu,
                      const currents::TestFunction& chi) {
  double s = 0.0;
  for (const auto& [z, m] : mu.atoms) s += chi(z) * m;
  return s;  // compactly supported chi vanishes at infinity
}

ExpectationResult expectation_estimate(const l2::OrthoBasis& basis, int N,
                                       const currents::TestFunctionFamily& fam,
                                       std::uint64_t seed,
                                       std::uint64_t experiment_id) {
  if (N < 2) throw Error("expectation_estimate: N >= 2 required");
  const SphereSampler sampler{basis.d(), seed, experiment_id};
  const currents::CurrentMeasure gp = currents::fs_current(basis);
  const int p = basis.p();

  std::vector<std::vector<double>> samples(fam.size());
  int degenerate = 0;
  for (int i = 0; i < N; ++i) {
    const Eigen::VectorXcd a = sampler.sample(i);
    ZeroSet zs;
    try {
      zs = zeros(basis, a);
    } catch (const NumericallyDegenerate&) {
      ++degenerate;
      continue;
    }
    const EmpiricalZeroMeasure mu = normalize(zs);
    for (std::size_t f = 0; f < fam.size(); ++f)
      samples[f].push_back(pair_empirical(mu, fam[f]));
  }

  ExpectationResult out;
  out.degenerate_draws = degenerate;
  for (std::size_t f = 0; f < fam.size(); ++f) {
    ExpectationRow row;
    const auto& xs = samples[f];
    const double n = (double)xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (n - 1.0);
    row.mean = mean;
    row.std_error = std::sqrt(var / n);
    row.reference = currents::pair_current(gp, fam[f]) / p;
    row.within_3sigma =
        std::abs(row.mean - row.reference) <= 3.0 * row.std_error + 1e-8;
    out.rows.push_back(row);
  }
  return out;
}

SequenceTable sequence_run(const std::vector<l2::OrthoBasis>& bases,
                           std::uint64_t seed,
                           const currents::TestFunctionFamily& fam,
                           const currents::CurrentMeasure& gamma) {
  SequenceTable table;
  std::vector<double> gamma_ref;
  for (const auto& chi : fam)
    gamma_ref.push_back(currents::pair_current(gamma, chi));
  for (const auto& basis : bases) {
    const int p = basis.p();
    table.p_list.push_back(p);
    const SphereSampler sampler{basis.d(), seed, 0x5eedULL + (std::uint64_t)p};
    const EmpiricalZeroMeasure mu = normalize(zeros(basis, sampler.sample(0)));
    double dev = 0.0;
    for (std::size_t f = 0; f < fam.size(); ++f)
      dev = std::max(dev, std::abs(pair_empirical(mu, fam[f]) - gamma_ref[f]));
    table.deviation.push_back(dev);
  }
  // Random deviations wiggle; the gate is the overall decay envelope, not
  // per-step monotonicity.
  table.verdict = table.deviation.size() >= 2 &&
                  table.deviation.back() <=
                      0.7 * table.deviation.front() + 1e-9;
  return table;
}

CdEstimate cd_constant(int d, const Eigen::VectorXcd& u, long N,
                       std::uint64_t seed) {
  if (std::abs(u.norm() - 1.0) > 1e-10)
    throw Error("cd_constant: u must be a unit vector");
  double sum = 0.0, sumsq = 0.0;
  constexpr long kChunk = 4096;
  long done = 0;
  std::uint64_t chunk_id = 0;
  while (done < N) {
    RngStream rng(seed, 0xCDULL, chunk_id++);
    const long m = std::min(kChunk, N - done);
    for (long i = 0; i < m; ++i) {
      cplx dot = 0.0;
      double norm2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const cplx g = rng.cgaussian();
        norm2 += std::norm(g);
        dot += g * std::conj(u(j));
      }
      const double x = std::log(std::abs(dot) / std::sqrt(norm2));
      sum += x;
      sumsq += x * x;
    }
    done += m;
  }
  CdEstimate est;
  est.mean = sum / N;
  const double var = (sumsq - N * est.mean * est.mean) / (N - 1.0);
  est.std_error = std::sqrt(std::max(0.0, var) / N);
  return est;
}

// ---------------------------------------------------------------------------
// Common zeros on the product model.
// ---------------------------------------------------------------------------

Eigen::MatrixXcd bivariate_coefficients(const l2::ProductBasis& basis,
                                        const Eigen::VectorXcd& a) {
  const int p = basis.p();
  const int d1 = basis.b1.d(), d2 = basis.b2.d();
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(p + 1, p + 1);
  for (int j1 = 0; j1 < d1; ++j1)
    for (int j2 = 0; j2 < d2; ++j2) {
      const cplx c = a(j1 * d2 + j2);
      if (c == cplx(0.0, 0.0)) continue;
      for (int k1 = 0; k1 <= p; ++k1) {
        const cplx c1 = basis.b1.poly0[j1][k1];
        if (c1 == cplx(0.0, 0.0)) continue;
        for (int k2 = 0; k2 <= p; ++k2)
          F(k1, k2) += c * c1 * basis.b2.poly0[j2][k2];
      }
    }
  return F;
}

namespace {

// Sylvester matrix in z2 of two bidegree-(p,p) grids, evaluated at z1.
Eigen::MatrixXcd sylvester_at(const Eigen::MatrixXcd& F1,
                              const Eigen::MatrixXcd& F2, cplx z1) {
  const int p = (int)F1.rows() - 1;
  const int n = 2 * p;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
  // coefficient of z2^i as a polynomial in z1, evaluated
  std::vector<cplx> A(p + 1), B(p + 1);
  for (int i = 0; i <= p; ++i) {
    cplx va = 0.0, vb = 0.0;
    for (int k1 = p; k1 >= 0; --k1) {
      va = va * z1 + F1(k1, i);
      vb = vb * z1 + F2(k1, i);
    }
    A[i] = va;
    B[i] = vb;
  }
  for (int r = 0; r < p; ++r)
    for (int i = 0; i <= p; ++i) {
      S(r, r + p - i) = A[i];
      S(p + r, r + p - i) = B[i];
    }
  return S;
}

double hadamard_scale(const Eigen::MatrixXcd& S) {
  double s = 1.0;
  for (int r = 0; r < S.rows(); ++r) s *= std::max(S.row(r).norm(), 1e-30);
  return s;
}

std::vector<cplx> univariate_slice_roots(const Eigen::MatrixXcd& F, cplx z1,
                                         double lead_tol, bool* identically_zero,
                                         bool* leading_collapse) {
  const int p = (int)F.rows() - 1;
  std::vector<cplx> c(p + 1);
  double cmax = 0.0, fmax = 0.0;
  for (int i = 0; i <= p; ++i) {
    cplx v = 0.0;
    for (int k1 = p; k1 >= 0; --k1) v = v * z1 + F(k1, i);
    c[i] = v;
    cmax = std::max(cmax, std::abs(v));
    for (int k1 = 0; k1 <= p; ++k1) fmax = std::max(fmax, std::abs(F(k1, i)));
  }
  const double zscale = std::max(1.0, std::pow(std::abs(z1), p));
  *identically_zero = cmax <= 1e-10 * fmax * zscale;
  int top = 0;
  const double cut = lead_tol * cmax;
  for (int i = 0; i <= p; ++i)
    if (std::abs(c[i]) > cut) top = i;
  *leading_collapse = top < p;
  if (*identically_zero) return {};
  std::vector<cplx> trimmed(c.begin(), c.begin() + top + 1);
  return dense_roots(trimmed);
}

}  // namespace

CommonZeros common_zeros_pair(const l2::ProductBasis& basis,
                              const Eigen::VectorXcd& a1,
                              const Eigen::VectorXcd& a2,
                              const RootTols& tols) {
  const int p = basis.p();
  const Eigen::MatrixXcd F1 = bivariate_coefficients(basis, a1);
  const Eigen::MatrixXcd F2 = bivariate_coefficients(basis, a2);

  // Positive-dimensional pre-check: the resultant vanishes identically iff
  // the divisors share a component; probe det Sylvester at random z1.
  {
    RngStream rng(0xB0B, 0xB0B, 0xB0B);
    bool all_zero = true;
    for (int t = 0; t < 5; ++t) {
      const cplx z1 = std::polar(0.6 + 0.2 * rng.uniform01(),
                                 2.0 * kPi * rng.uniform01());
      const Eigen::MatrixXcd S = sylvester_at(F1, F2, z1);
      const double scale = hadamard_scale(S);
      const cplx det = Eigen::FullPivLU<Eigen::MatrixXcd>(S).determinant();
      if (std::abs(det) > 1e-10 * scale) {
        all_zero = false;
        break;
      }
    }
    if (all_zero)
      throw PositiveDimensional(
          "common_zeros_pair: resultant vanishes identically");
  }

  // Möbius shift z1 = sigma + 1/t makes the leading block S(sigma)
  // invertible; block companion eigenvalues then cover all 2p^2
  // intersections, with t ~ 0 the ones at z1 = infinity.
  const int n = 2 * p;
  std::vector<Eigen::MatrixXcd> Sk(p + 1, Eigen::MatrixXcd::Zero(n, n));
  for (int r = 0; r < p; ++r)
    for (int i = 0; i <= p; ++i)
      for (int k = 0; k <= p; ++k) {
        Sk[k](r, r + p - i) = F1(k, i);
        Sk[k](p + r, r + p - i) = F2(k, i);
      }

  RngStream rng(0x51, 0x6d, 0xa);
  cplx sigma;
  Eigen::MatrixXcd lead(n, n);
  double lead_scale = 0.0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    sigma = std::polar(0.8 + 0.3 * rng.uniform01(), 2.0 * kPi * rng.uniform01());
    lead = sylvester_at(F1, F2, sigma);
    const double scale = hadamard_scale(lead);
    const cplx det = Eigen::FullPivLU<Eigen::MatrixXcd>(lead).determinant();
    if (std::abs(det) > 1e-8 * scale) {
      lead_scale = scale;
      break;
    }
    if (attempt == 15)
      throw NumericallyDegenerate(
          "common_zeros_pair: could not find an invertible shift");
  }
  (void)lead_scale;

  // hat S_j = sum_{k >= p-j} binom(k, p-j) sigma^{k-(p-j)} S_k
  std::vector<Eigen::MatrixXcd> Shat(p + 1, Eigen::MatrixXcd::Zero(n, n));
  for (int j = 0; j <= p; ++j) {
    const int m = p - j;
    for (int k = m; k <= p; ++k)
      Shat[j] += binom(k, m) * std::pow(sigma, k - m) * Sk[k];
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Shat[p]);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n * p, n * p);
  for (int b = 0; b + 1 < p; ++b)
    M.block(b * n, (b + 1) * n, n, n) = Eigen::MatrixXcd::Identity(n, n);
  for (int b = 0; b < p; ++b)
    M.block((p - 1) * n, b * n, n, n) = -lu.solve(Shat[b]);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  if (es.info() != Eigen::Success)
    throw NumericallyDegenerate("common_zeros_pair: eigensolver failed");

  CommonZeros out;
  std::vector<cplx> finite_z1;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx t = es.eigenvalues()(i);
    if (std::abs(t) < 1e-8) {
      ++out.boundary;  // z1 = infinity face
      continue;
    }
    finite_z1.push_back(sigma + 1.0 / t);
  }

  for (const auto& [z1, mult] : cluster_roots(finite_z1, tols.cluster)) {
    bool zero1 = false, zero2 = false, drop1 = false, drop2 = false;
    const std::vector<cplx> r1 =
        univariate_slice_roots(F1, z1, tols.lead, &zero1, &drop1);
    const std::vector<cplx> r2 =
        univariate_slice_roots(F2, z1, tols.lead, &zero2, &drop2);
    if (zero1 && zero2)
      throw PositiveDimensional(
          "common_zeros_pair: common vertical line component");
    std::vector<cplx> matches;
    if (zero1) {
      matches = r2;
    } else if (zero2) {
      matches = r1;
    } else {
      for (const cplx x : r1)
        for (const cplx y : r2)
          if (std::abs(x - y) <= 1e-6 * (1.0 + std::abs(x)))
            matches.push_back(0.5 * (x + y));
      matches = [] (std::vector<std::pair<cplx,int>> cl) {
        std::vector<cplx> v;
        for (auto& [z, m] : cl) v.push_back(z);
        return v;
      }(cluster_roots(matches, 1e-6));
    }
    if (matches.empty()) {
      // no affine partner: both leading z2-coefficients must collapse,
      // placing the intersection at z2 = infinity
      if (drop1 && drop2) {
        out.boundary += mult;
        continue;
      }
      throw NumericallyDegenerate(
          "common_zeros_pair: unmatched resultant root");
    }
    const int m0 = (int)matches.size();
    for (int i = 0; i < m0; ++i) {
      const int m = (i == 0) ? mult - (m0 - 1) : 1;
      if (m <= 0)
        throw NumericallyDegenerate(
            "common_zeros_pair: multiplicity bookkeeping failed");
      out.points.push_back({{z1, matches[i]}, m});
    }
  }
  return out;
}

}  // namespace lab::random
