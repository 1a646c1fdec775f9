#ifndef LATENTPRIV_GRAD_CHECK_HPP
#define LATENTPRIV_GRAD_CHECK_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

#include "latentpriv/errors.hpp"
#include "latentpriv/linalg.hpp"

namespace latentpriv {

// Central finite differences: (f(x + h e_j) - f(x - h e_j)) / (2h) per
// coordinate. Every analytic gradient in this project is checked against it.
inline Vec finite_diff_gradient(const std::function<double(const Vec&)>& f,
                                Vec x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be > 0");
  Vec g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double orig = x[j];
    x[j] = orig + h;
    const double fp = f(x);
    x[j] = orig - h;
    const double fm = f(x);
    x[j] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericalError("finite_diff_gradient: non-finite value at probe point");
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace latentpriv

#endif  // LATENTPRIV_GRAD_CHECK_HPP
