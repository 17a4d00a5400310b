#pragma once

#include <functional>
#include <vector>

#include "lab/core.hpp"

namespace lab::quad {

using Fn = std::function<double(double)>;

struct Tol {
  double abs = 1e-11;
  double rel = 1e-10;
  int max_depth = 52;
};

// One Gauss7/Kronrod15 panel on [a,b]; *err receives |K15 - G7|.
double gk15(const Fn& f, double a, double b, double* err);

// Adaptive bisection until the panel error estimate meets tol.
// Throws QuadratureFailure when max_depth halvings do not suffice.
double adaptive(const Fn& f, double a, double b, const Tol& tol);

// Adaptive integration over consecutive panels [breaks[i], breaks[i+1]].
double adaptive_panels(const Fn& f, const std::vector<double>& breaks,
                       const Tol& tol);

// Geometrically refined breakpoints from a down to a*ratio^n, appended
// toward the singular endpoint `a` (a < b required).
std::vector<double> log_refined_breaks(double a, double b, int levels = 12,
                                       double ratio = 0.1);

// ∫_0^∞ f(t) dt for f integrable with algebraic decay at infinity:
// computed as ∫_0^1 f + ∫_0^1 f(1/u)/u^2 du. Singular behavior t^alpha
// (alpha > -1) at t = 0 is flattened by the substitution t = u^m.
double radial_semi_infinite(const Fn& f, double alpha0, const Tol& tol);

// ∫_0^t1 f(t) dt where f ~ c * t^{-1} log(t)^{-2} near 0 (Poincaré-type
// volume mass). Substitution y = -1/log t makes the integrand smooth.
double radial_poincare_head(const Fn& f, double t1, const Tol& tol);

}  // namespace lab::quad
