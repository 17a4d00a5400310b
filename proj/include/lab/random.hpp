#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "lab/core.hpp"
#include "lab/currents.hpp"
#include "lab/l2.hpp"

namespace lab::random {

// ---------------------------------------------------------------------------
// Uniform draws from the unit sphere of H^0_(2): normalized standard complex
// Gaussian vectors, one deterministic stream per (seed, experiment, index).
// ---------------------------------------------------------------------------

struct SphereSampler {
  int dim = 1;
  std::uint64_t master_seed = 1;
  std::uint64_t experiment_id = 0;

  Eigen::VectorXcd sample(std::uint64_t index) const;
};

// Roots of one section on the sphere, multiplicities included; the infinity
// mass records the degree drop. Total mass is always p.
struct ZeroSet {
  std::vector<std::pair<cplx, int>> roots;
  int at_infinity = 0;
  int p = 0;
  std::uint64_t coeff_hash = 0;

  int total() const {
    int t = at_infinity;
    for (const auto& [z, m] : roots) t += m;
    return t;
  }
  int multiplicity_at(cplx a, double tol = 1e-9) const {
    int m = 0;
    for (const auto& [z, k] : roots)
      if (std::abs(z - a) <= tol) m += k;
    return m;
  }
};

struct RootTols {
  double lead = 1e-12;     // leading/trailing coefficient collapse
  double cluster = 1e-6;   // multiplicity clustering radius
  double res = 1e-8;       // post-refinement residual gate
};

// Companion-matrix roots (balanced, two Newton polish steps). Structural
// zeros at the chart origin come from the exact trailing-coefficient count.
ZeroSet zeros(const l2::OrthoBasis& basis, const Eigen::VectorXcd& a,
              const RootTols& tols = {});

// Normalized root masses (mass = multiplicity / p); total mass 1.
struct EmpiricalZeroMeasure {
  std::vector<std::pair<cplx, double>> atoms;
  double mass_at_infinity = 0.0;
  int samples = 1;
};
EmpiricalZeroMeasure normalize(const ZeroSet& zs);
double pair_empirical(const EmpiricalZeroMeasure& mu,
                      const currents::TestFunction& chi);

// ---------------------------------------------------------------------------
// Monte Carlo experiments.
// ---------------------------------------------------------------------------

struct ExpectationRow {
  double mean = 0.0;
  double std_error = 0.0;
  double reference = 0.0;  // <gamma_p / p, chi>
  bool within_3sigma = false;
};

struct ExpectationResult {
  std::vector<ExpectationRow> rows;  // one per test function
  int degenerate_draws = 0;          // skipped samples, counted and reported
};

ExpectationResult expectation_estimate(const l2::OrthoBasis& basis, int N,
                                       const currents::TestFunctionFamily& fam,
                                       std::uint64_t seed,
                                       std::uint64_t experiment_id = 17);

struct SequenceTable {
  std::vector<int> p_list;
  std::vector<double> deviation;  // max over family per p
  bool verdict = false;           // trend gate at factor 0.7
};

// One sampled section per p; deviations against <gamma, chi>.
SequenceTable sequence_run(const std::vector<l2::OrthoBasis>& bases,
                           std::uint64_t seed,
                           const currents::TestFunctionFamily& fam,
                           const currents::CurrentMeasure& gamma);

// Monte Carlo mean of log|a.u| over the unit sphere in C^d; the closed form
// is -(1/2) H_{d-1} via |a.u|^2 ~ Beta(1, d-1).
struct CdEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
CdEstimate cd_constant(int d, const Eigen::VectorXcd& u, long N,
                       std::uint64_t seed);

inline double harmonic(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

// ---------------------------------------------------------------------------
// k = 2: common zeros of a pair of sections on the product model, solved by
// a hidden-variable resultant (block companion of the Sylvester matrix in
// z2, Möbius-shifted so the leading block is invertible). Total count with
// multiplicity, boundary intersections included, is 2 p^2.
// ---------------------------------------------------------------------------

struct CommonZeros {
  std::vector<std::pair<std::array<cplx, 2>, int>> points;  // affine, mult
  int boundary = 0;  // intersections on the toric boundary divisors

  int total_with_multiplicity() const {
    int t = boundary;
    for (const auto& [pt, m] : points) t += m;
    return t;
  }
};

CommonZeros common_zeros_pair(const l2::ProductBasis& basis,
                              const Eigen::VectorXcd& a1,
                              const Eigen::VectorXcd& a2,
                              const RootTols& tols = {});

// Coefficient grid F[k1][k2] of the section sum a_(j1,j2) s1_j1 s2_j2 in the
// torus chart monomials; flat index j1 * d2 + j2.
Eigen::MatrixXcd bivariate_coefficients(const l2::ProductBasis& basis,
                                        const Eigen::VectorXcd& a);

}  // namespace lab::random
