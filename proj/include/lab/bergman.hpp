#pragma once

#include <utility>
#include <vector>

#include "lab/core.hpp"
#include "lab/l2.hpp"

namespace lab::bergman {

// P_p(x) = sum_j |s_j(x)|^2 e^{-2 p phi(x)}; basis independent. Evaluation
// switches to the w = 1/z chart for |x| > 1 so high powers never overflow.
// Throws UndefinedSpace when d_p = 0.
double bergman_eval(const l2::OrthoBasis& basis, cplx x);

// log P_p(x), stable for values of P_p beyond double range.
double log_bergman_eval(const l2::OrthoBasis& basis, cplx x);

// Max of |S_a(x)|^2_{h_p} over `trials` random unit coefficient vectors,
// optionally including the explicit maximizer a_j ~ conj(s_j(x)), which
// attains P_p(x) exactly.
double extremal_check(const l2::OrthoBasis& basis, cplx x, int trials,
                      RngStream& rng, bool include_extremal = true);

// ∫ P_p f Omega over the whole model by independent quadrature; equals d_p.
// Returns 0 by convention when d_p = 0.
double normalization_check(const l2::OrthoBasis& basis,
                           const quad::Tol& tol = {1e-10, 1e-9, 52});

// Annular probe grid at standoff delta from every atom.
struct RegionGrid {
  double r0 = 0.5, r1 = 2.0;
  int nr = 10, ntheta = 16;
  double delta = 0.1;
  std::vector<cplx> points(const std::vector<geom::Atom>& atoms) const;
};

struct BergmanDiagnostics {
  std::vector<int> p_list;
  std::vector<double> sup_abs;  // sup_K (1/p)|log P_p|
  int grid_points = 0;
  bool has_verdict = false;
  bool verdict = false;  // trend gate: monotone and last <= 0.6 * first
};

BergmanDiagnostics mainhyp_diagnostic(const geom::SingularWeight& w,
                                      const geom::VolumeDensity& vol,
                                      const std::vector<int>& p_list,
                                      const RegionGrid& region,
                                      const l2::GramSpec& spec,
                                      const std::string& cache_dir = "");

// Sub-mean-value upper bound for (1/p) log P_p(z) on the ball B(z,r):
//   lhs = (1/p) log P_p(z)
//   rhs = (1/p) log(C r^{-2}) + 2 (max_{B(z,r)} phi - phi(z)),  C = V_max/pi,
// where V_max bounds Lebesgue measure against the f Omega density on the
// ball. Contract: lhs <= rhs. Throws BallTouchesAtom.
std::pair<double, double> bke_upper_check(const l2::OrthoBasis& basis, cplx z,
                                          double r);

}  // namespace lab::bergman
