#include "lab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace lab::quad {

namespace {

// QUADPACK Gauss7/Kronrod15 nodes and weights on [-1,1].
constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b, val, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace

double gk15(const Fn& f, double a, double b, double* err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * xgk[j];
    const double fsum = f(c - x) + f(c + x);
    resk += wgk[j] * fsum;
    if (j % 2 == 1) resg += wg[j / 2] * fsum;
  }
  if (err) *err = std::abs((resk - resg) * h);
  return resk * h;
}

double adaptive(const Fn& f, double a, double b, const Tol& tol) {
  if (a == b) return 0.0;
  std::priority_queue<Panel> heap;
  double e0 = 0.0;
  const double v0 = gk15(f, a, b, &e0);
  heap.push({a, b, v0, e0});
  double total = v0, toterr = e0;
  int splits = 0;
  const int max_splits = 1 << 14;
  while (toterr > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (!std::isfinite(total) || !std::isfinite(toterr))
      throw QuadratureFailure("adaptive quadrature: non-finite integrand");
    if (heap.empty() || splits++ > max_splits)
      throw QuadratureFailure("adaptive quadrature: tolerance not met");
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b)
      throw QuadratureFailure("adaptive quadrature: panel underflow");
    double e1 = 0.0, e2 = 0.0;
    const double v1 = gk15(f, p.a, m, &e1);
    const double v2 = gk15(f, m, p.b, &e2);
    total += v1 + v2 - p.val;
    toterr += e1 + e2 - p.err;
    heap.push({p.a, m, v1, e1});
    heap.push({m, p.b, v2, e2});
  }
  if (!std::isfinite(total))
    throw QuadratureFailure("adaptive quadrature: non-finite integrand");
  return total;
}

double adaptive_panels(const Fn& f, const std::vector<double>& breaks,
                       const Tol& tol) {
  double sum = 0.0;
  Tol per = tol;
  per.abs = tol.abs / std::max<std::size_t>(1, breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    sum += adaptive(f, breaks[i], breaks[i + 1], per);
  return sum;
}

std::vector<double> log_refined_breaks(double a, double b, int levels,
                                       double ratio) {
  std::vector<double> br;
  br.push_back(a);
  double w = (b - a);
  for (int l = 0; l < levels; ++l) w *= ratio;
  for (int l = levels; l >= 1; --l) {
    br.push_back(a + w);
    w /= ratio;
  }
  br.push_back(b);
  return br;
}

double radial_semi_infinite(const Fn& f, double alpha0, const Tol& tol) {
  // Head [0,1]: substitute t = u^m so the integrand becomes u^{m(1+alpha)-1}.
  int m = 1;
  if (alpha0 < 0.0) m = std::max(1, (int)std::ceil(2.0 / (1.0 + alpha0)));
  const Fn head = [&](double u) {
    const double t = std::pow(u, m);
    return m * std::pow(u, m - 1) * f(t);
  };
  // Tail [1,inf): t = 1/u.
  const Fn tail = [&](double u) { return f(1.0 / u) / (u * u); };
  Tol half = tol;
  half.abs = 0.5 * tol.abs;
  double s = adaptive_panels(head, log_refined_breaks(0.0, 1.0, 10, 0.2), half);
  s += adaptive(tail, 0.0, 1.0, half);
  return s;
}

double radial_poincare_head(const Fn& f, double t1, const Tol& tol) {
  // y = -1/log t, t = exp(-1/y), dt = exp(-1/y)/y^2 dy.
  const double y1 = -1.0 / std::log(t1);
  const Fn g = [&](double y) {
    if (y <= 0.0) return 0.0;
    const double t = std::exp(-1.0 / y);
    if (t <= 0.0) return 0.0;
    return f(t) * t / (y * y);
  };
  return adaptive(g, 0.0, y1, tol);
}

}  // namespace lab::quad
