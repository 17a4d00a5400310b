#include <doctest.h>

#include <cmath>

#include "lab/quadrature.hpp"

using namespace lab;

TEST_CASE("adaptive quadrature on smooth integrands") {
  quad::Tol tol;
  CHECK(quad::adaptive([](double x) { return x * x; }, 0.0, 1.0, tol) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(quad::adaptive([](double x) { return std::sin(x); }, 0.0, kPi, tol) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("endpoint log singularity via refined panels") {
  quad::Tol tol;
  const double v = quad::adaptive_panels(
      [](double x) { return x > 0.0 ? std::log(x) : 0.0; },
      quad::log_refined_breaks(0.0, 1.0, 14, 0.1), tol);
  CHECK(v == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("semi-infinite radial integral matches the FS mass") {
  // 2 t (1+t^2)^{-2} integrates to 1 on (0, inf)
  quad::Tol tol;
  const double v = quad::radial_semi_infinite(
      [](double t) { return 2.0 * t / std::pow(1.0 + t * t, 2); }, 1.0, tol);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Poincare head substitution handles (t log t)^-2 mass") {
  quad::Tol tol;
  const double v = quad::radial_poincare_head(
      [](double t) {
        const double l = std::log(t);
        return 1.0 / (t * l * l);
      },
      0.05, tol);
  CHECK(v == doctest::Approx(-1.0 / std::log(0.05)).epsilon(1e-10));
}

TEST_CASE("nonintegrable integrand raises QuadratureFailure") {
  quad::Tol tol;
  tol.abs = 1e-12;
  tol.rel = 1e-12;
  CHECK_THROWS_AS(
      quad::adaptive([](double x) { return x > 0.0 ? 1.0 / x : 0.0; }, 0.0,
                     1.0, tol),
      QuadratureFailure);
}
