#include <doctest.h>

#include <boost/rational.hpp>
#include <cmath>

#include "lab/currents.hpp"

using namespace lab;
using namespace lab::currents;

namespace {

double fs_profile_1d(double s) { return 0.5 * std::log1p(std::exp(2.0 * s)); }
double fs_slope(double s) { return 1.0 / (1.0 + std::exp(-2.0 * s)); }

// Exact Alexandrov masses for the rational fixtures, computed in exact
// rational arithmetic from the same vertex values the engine sees.
using Rat = boost::rational<long long>;

struct RPt {
  Rat x, y;
};

Rat rcross(const RPt& o, const RPt& a, const RPt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Rat rational_hull_area(std::vector<RPt> pts) {
  std::sort(pts.begin(), pts.end(), [](const RPt& a, const RPt& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const RPt& a, const RPt& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const int n = (int)pts.size();
  if (n < 3) return Rat(0);
  std::vector<RPt> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && rcross(hull[k - 2], hull[k - 1], pts[i]) <= Rat(0)) --k;
    hull[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && rcross(hull[k - 2], hull[k - 1], pts[i]) <= Rat(0))
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  Rat a(0);
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const RPt& p = hull[i];
    const RPt& q = hull[(i + 1) % hull.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return (a < Rat(0) ? -a : a) / 2;
}

// Piecewise-affine convex fixture with rational data: max of affine forms.
Rat fixture_value(Rat s, Rat t) {
  const Rat forms[4] = {Rat(0), s, t, Rat(3) * s / 2 + t / 2 - Rat(1, 4)};
  Rat m = forms[0];
  for (const Rat& f : forms) m = std::max(m, f);
  return m;
}

}  // namespace

TEST_CASE("one-dimensional anchor: mass is the slope difference") {
  const double m = real_ma_measure_1d(fs_profile_1d, -1.0, 2.0);
  CHECK(m == doctest::Approx(fs_slope(2.0) - fs_slope(-1.0)).epsilon(1e-6));
  // whole line recovers the degree
  const double total = real_ma_measure_1d(fs_profile_1d, -30.0, 30.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("product FS profile: total mass 2, rectangle region masses") {
  const auto g = [](double s, double t) {
    return fs_profile_1d(s) + fs_profile_1d(t);
  };
  const Box domain{-8.0, 8.0, -8.0, 8.0};
  const auto prof = ConvexProfile::sample(g, domain, 320, 320);
  const double total = real_ma_measure(prof, domain);
  CHECK(total == doctest::Approx(2.0).epsilon(0.02));

  const Box q{-8.0, 0.0, 0.0, 8.0};
  const double expect = 2.0 * (fs_slope(0.0) - fs_slope(-8.0)) *
                        (fs_slope(8.0) - fs_slope(0.0));
  CHECK(real_ma_measure(prof, q) == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("affine profiles carry no Monge-Ampere mass") {
  const auto g = [](double s, double t) { return 0.3 * s - 1.7 * t + 2.0; };
  const auto prof = ConvexProfile::sample(g, {-4, 4, -4, 4}, 64, 64);
  CHECK(real_ma_measure(prof, {-4, 4, -4, 4}) == doctest::Approx(0.0));
  CHECK(real_ma_measure(prof, {-1, 1, -1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("corner profile: the Alexandrov mass of max(0,s)+max(0,t)") {
  // subdifferential of the corner at the origin is [0,1]^2: mass 2
  const auto g = [](double s, double t) {
    return std::max(0.0, s) + std::max(0.0, t);
  };
  const auto prof = ConvexProfile::sample(g, {-3, 3, -3, 3}, 96, 96);
  CHECK(real_ma_measure(prof, {-3, 3, -3, 3}) == doctest::Approx(2.0));
  CHECK(real_ma_measure(prof, {-0.5, 0.5, -0.5, 0.5}) == doctest::Approx(2.0));
  CHECK(real_ma_measure(prof, {1.0, 3.0, 1.0, 3.0}) == doctest::Approx(0.0));

  // LSE smoothings approach the corner masses
  std::vector<double> err;
  for (const int p : {4, 8, 16}) {
    const auto gp = [p](double s, double t) {
      const double m = std::max({s, t, 0.0});
      return m + std::log(std::exp(2.0 * p * (s - m)) +
                          std::exp(2.0 * p * (t - m)) +
                          std::exp(-2.0 * p * m)) /
                     (2.0 * p);
    };
    // smoothing of max(s,t,0); restrict to the s,t >= 0 face pattern
    const auto profp = ConvexProfile::sample(gp, {-3, 3, -3, 3}, 32 * p, 32 * p);
    err.push_back(
        std::abs(real_ma_measure(profp, {-1, 1, -1, 1}) - 1.0));
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}

TEST_CASE("non-convex data is rejected") {
  auto prof = ConvexProfile::sample(
      [](double s, double t) { return s * s + t * t; }, {-2, 2, -2, 2}, 32,
      32);
  CHECK(prof.midpoint_convex());
  prof.values[16 + 16 * 33] -= 0.5;  // dent one interior vertex
  CHECK_FALSE(prof.midpoint_convex());
  CHECK_THROWS_AS(real_ma_measure(prof, Box{-2, 2, -2, 2}), NonConvexProfile);
}

TEST_CASE("piecewise-affine masses are exact: rational cross-check") {
  // 8x8 grid on [-1,1]^2 with quarter-step spacing: all data rational
  const int n = 8;
  const Rat h(1, 4);
  ConvexProfile prof;
  prof.domain = {-1.0, 1.0, -1.0, 1.0};
  prof.ns = n;
  prof.nt = n;
  prof.values.resize((n + 1) * (n + 1));
  std::vector<std::vector<Rat>> rv(n + 1, std::vector<Rat>(n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const Rat s = -1 + h * i, t = -1 + h * j;
      rv[i][j] = fixture_value(s, t);
      prof.values[i + j * (n + 1)] =
          boost::rational_cast<double>(rv[i][j]);
    }

  // rational vertex masses: hull of the six adjacent triangle gradients
  const auto rgrad0 = [&](int ci, int cj) -> RPt {
    return {(rv[ci + 1][cj] - rv[ci][cj]) / h,
            (rv[ci + 1][cj + 1] - rv[ci + 1][cj]) / h};
  };
  const auto rgrad1 = [&](int ci, int cj) -> RPt {
    return {(rv[ci + 1][cj + 1] - rv[ci][cj + 1]) / h,
            (rv[ci][cj + 1] - rv[ci][cj]) / h};
  };
  Rat total(0);
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) {
      total += rational_hull_area({rgrad0(i - 1, j - 1), rgrad1(i - 1, j - 1),
                                   rgrad1(i, j - 1), rgrad0(i - 1, j),
                                   rgrad0(i, j), rgrad1(i, j)});
    }
  const double exact = 2.0 * boost::rational_cast<double>(total);
  const double engine = real_ma_measure(prof, Box{-1.0, 1.0, -1.0, 1.0});
  CHECK(engine == doctest::Approx(exact).epsilon(1e-12));
  CHECK(exact > 0.0);
}

TEST_CASE("convergence harness: trivial family, corner family, far region") {
  const auto corner = [](double s, double t) { return std::max({s, t, 0.0}); };
  const auto corner_p = [](int p) {
    return [p](double s, double t) {
      const double m = std::max({s, t, 0.0});
      return m + std::log(std::exp(2.0 * p * (s - m)) +
                          std::exp(2.0 * p * (t - m)) + std::exp(-2.0 * p * m)) /
                     (2.0 * p);
    };
  };
  const std::vector<Box> regions = {{-1.5, 1.5, -1.5, 1.5},
                                    {2.0, 5.0, -5.0, -2.0}};
  const auto cells = [](int p) { return std::clamp(32 * p, 128, 640); };

  const auto fixed = ma_convergence_harness(
      [&](int) {
        return std::function<double(double, double)>(corner);
      },
      corner, regions, {4, 8, 16}, {-6, 6, -6, 6}, cells);
  for (const auto& col : fixed.errors)
    for (const double e : col) CHECK(e == doctest::Approx(0.0));

  const auto table = ma_convergence_harness(
      [&](int p) { return std::function<double(double, double)>(corner_p(p)); },
      corner, regions, {4, 8, 16}, {-6, 6, -6, 6}, cells);
  CHECK(table.verdicts[0]);
  // smooth region far from the kinks: errors negligible already at p = 4
  CHECK(table.errors[1][0] < 1e-6);
}
