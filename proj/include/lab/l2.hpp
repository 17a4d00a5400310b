#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lab/core.hpp"
#include "lab/geom.hpp"
#include "lab/quadrature.hpp"

namespace lab::l2 {

// ---------------------------------------------------------------------------
// The filtered monomial space underlying H^0_(2): exponent k survives an atom
// of coefficient nu iff |z|^{2k} e^{-2 p nu log|z|} is locally integrable
// against the volume, i.e. k > p*nu - 1 (k >= p*nu when the volume carries a
// Poincaré factor at the same point). Constraints of several atoms conjoin;
// the basis then picks up the factor prod (z-a_i)^{k_i}.
// ---------------------------------------------------------------------------

struct SectionSpace {
  geom::ModelKind model = geom::ModelKind::Sphere;
  int p = 0;
  geom::SingularWeight weight;
  geom::VolumeDensity volume;
  std::vector<int> exponents;     // degrees of the basis polynomials
  std::vector<cplx> base_factor;  // prod (z-a_i)^{k_i}; {1} when no atom acts
  std::vector<int> atom_orders;   // forced vanishing order k_i per atom
  bool radial = true;

  int d() const { return static_cast<int>(exponents.size()); }
  int k_min() const { return exponents.empty() ? 0 : exponents.front(); }
  // Forced vanishing order at the chart origin.
  int vanishing_order_at_origin() const;
};

// Smallest admissible exponent for one atom; exposed for the oracles.
int min_exponent(int p, double nu, bool poincare_volume_at_atom);

SectionSpace integrability_filter(int p, const geom::SingularWeight& w,
                                  const geom::VolumeDensity& vol);

struct GramSpec {
  quad::Tol radial_tol{1e-12, 1e-11, 52};
  int angular_nodes = 0;  // 0 = auto: 4p+8 (Nyquist needs >= 4p+4)
  bool prescale = true;   // Fubini-Study norm prescaling of monomials
};

// sqrt((p+1) binom(p,k)), the inverse Fubini-Study norm of z^k.
double prescale_factor(int p, int k);

// Radial helpers shared with the kernel integrals: evaluate through
// lt = log t so atom powers and Poincaré factors never underflow.
double radial_weight_log(const geom::SingularWeight& w, double t, double lt);
double radial_vol_log(const geom::VolumeDensity& vol, double t, double lt);
double radial_integral_lt(const std::function<double(double)>& logf_lt,
                          double alpha0, bool poincare_at_zero,
                          const quad::Tol& tol);

// Hermitian positive definite Gram matrix of the prescaled basis in the
// inner product  (S,S') = ∫ S conj(S') e^{-2 p phi} f dLebesgue  over the
// full chart (the FS-compactified volume makes the second chart redundant).
Eigen::MatrixXcd gram_matrix(const SectionSpace& space, const GramSpec& spec);

struct OrthoBasis {
  SectionSpace space;
  GramSpec spec;
  Eigen::MatrixXcd coeff;  // rows = orthonormal sections in prescaled basis
  double gram_condition = 1.0;
  double gram_offdiag_max = 0.0;  // largest |off-diagonal| of the Gram
  std::uint64_t provenance_hash = 0;

  // Chart-0 polynomial coefficients of each orthonormal section (length p+1)
  // and the chart-infinity form s~_j(w) = w^p s_j(1/w) (reversed).
  std::vector<std::vector<cplx>> poly0, polyinf;
  geom::SingularWeight weight_inf;  // transitioned weight, for |x| > 1
  bool has_inf = false;

  int d() const { return space.d(); }
  int p() const { return space.p; }
};

OrthoBasis orthonormalize(const SectionSpace& space, const Eigen::MatrixXcd& G,
                          const GramSpec& spec);

// Value of sum_j a_j s_j at x in the chart-0 trivialization.
cplx section_eval(const OrthoBasis& basis, const Eigen::VectorXcd& a, cplx x);

// Values (and optionally z-derivatives) of every orthonormal section at x,
// chart-0 trivialization. Callers needing |x| >> 1 should switch charts.
void eval_sections(const OrthoBasis& basis, cplx x, std::vector<cplx>* values,
                   std::vector<cplx>* derivs = nullptr);

// Rebuilds an OrthoBasis around an externally produced coefficient matrix
// (e.g. a unitary remix in the basis-independence checks).
OrthoBasis with_coefficients(const OrthoBasis& basis,
                             const Eigen::MatrixXcd& coeff);

// ---------------------------------------------------------------------------
// Product model: toric spaces factor into two sphere spaces, and the Gram is
// the Kronecker product of the factors.
// ---------------------------------------------------------------------------

struct ProductSectionSpace {
  SectionSpace s1, s2;
  int p = 0;
};
struct ProductBasis {
  OrthoBasis b1, b2;
  int p() const { return b1.p(); }
  int d() const { return b1.d() * b2.d(); }
};

ProductSectionSpace product_filter(int p, const geom::ToricWeight& w,
                                   const geom::ToricVolume& vol);
ProductBasis product_orthonormalize(const ProductSectionSpace& space,
                                    const GramSpec& spec);

// ---------------------------------------------------------------------------
// Disk cache for orthonormal coefficient matrices. Record layout:
// little-endian u64 header {magic, version, d_p}, then d_p*d_p complex
// doubles, row-major.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kCacheMagic = 0x31304342424F4C41ULL;  // "ALOBBC01"
inline constexpr std::uint64_t kCacheVersion = 1;

std::uint64_t content_hash(const SectionSpace& space, const GramSpec& spec);

// nullopt on miss; *corrupt flags a malformed record (caller overwrites).
std::optional<Eigen::MatrixXcd> cache_load(const std::string& dir,
                                           std::uint64_t key, int expected_d,
                                           bool* corrupt = nullptr);
void cache_store(const std::string& dir, std::uint64_t key,
                 const Eigen::MatrixXcd& coeff);

// Convenience: filter + gram + orthonormalize, consulting the cache when a
// directory is given.
OrthoBasis build_basis(int p, const geom::SingularWeight& w,
                       const geom::VolumeDensity& vol, const GramSpec& spec,
                       const std::string& cache_dir = "");

}  // namespace lab::l2
