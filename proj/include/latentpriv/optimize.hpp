#ifndef LATENTPRIV_OPTIMIZE_HPP
#define LATENTPRIV_OPTIMIZE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace latentpriv {

struct ScalarMin {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section minimization of a unimodal function on [lo, hi].
inline ScalarMin golden_section_min(const std::function<double(double)>& f,
                                    double lo, double hi, double tol = 1e-12,
                                    int max_iter = 200) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_min: bad bracket");
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

// Minimizes a convex function whose minimizer may sit outside the initial
// bracket: expands the bracket away from whichever endpoint currently wins,
// then runs golden section.
inline ScalarMin minimize_convex_1d(const std::function<double(double)>& f,
                                    double lo, double hi, double tol = 1e-12) {
  for (int grow = 0; grow < 64; ++grow) {
    const double w = hi - lo;
    const double probe = 1e-3 * w;
    if (f(lo) < f(lo + probe)) {
      lo -= w;
      continue;
    }
    if (f(hi) < f(hi - probe)) {
      hi += w;
      continue;
    }
    break;
  }
  return golden_section_min(f, lo, hi, tol);
}

// Bisection for a monotone root of g on [lo, hi] with g(lo), g(hi) of
// opposite signs.
inline double bisect_root(const std::function<double(double)>& g, double lo,
                          double hi, int iters = 200) {
  double glo = g(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm <= 0.0) == (glo <= 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace latentpriv

#endif  // LATENTPRIV_OPTIMIZE_HPP
