#include "latentpriv/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace latentpriv {

FilterParameters::FilterParameters(int d_in, int k_y_in) : d(d_in), k_y(k_y_in) {
  if (d < 1 || k_y < 1)
    throw std::invalid_argument("FilterParameters: d and k_y must be >= 1");
  a = Matrix(d, d + k_y);
}

FilterParameters FilterParameters::init(int d, int k_y, Rng& rng, double scale) {
  FilterParameters f(d, k_y);
  for (auto& v : f.a.data) v = scale * rng.normal();
  return f;
}

Vec FilterParameters::mean_shift(int y) const {
  if (y < 0 || y >= k_y)
    throw std::invalid_argument("FilterParameters::mean_shift: label out of range");
  Vec s(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) s[j] = a_y(j, y);
  return s;
}

Vec FilterParameters::noise_variance_diag() const {
  Vec v(static_cast<std::size_t>(d), 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) v[j] += a_eps(j, k) * a_eps(j, k);
  return v;
}

Vec apply_filter(const FilterParameters& f, const Vec& z, int y, Rng& rng) {
  if (static_cast<int>(z.size()) != f.d)
    throw std::invalid_argument("apply_filter: dimension mismatch");
  if (y < 0 || y >= f.k_y)
    throw std::invalid_argument("apply_filter: label out of range");
  Vec eps(static_cast<std::size_t>(f.d));
  for (auto& e : eps) e = rng.normal();
  Vec out = z;
  for (int j = 0; j < f.d; ++j) {
    double acc = f.a_y(j, y);
    for (int k = 0; k < f.d; ++k) acc += f.a_eps(j, k) * eps[k];
    out[j] += acc;
  }
  return out;
}

double distortion_estimate(const FilterParameters& f,
                           const std::vector<Vec>& zs,
                           const std::vector<int>& ys,
                           const Vec& base_variance) {
  if (zs.empty() || zs.size() != ys.size())
    throw std::invalid_argument("distortion_estimate: empty or ragged batch");
  if (static_cast<int>(base_variance.size()) != f.d)
    throw std::invalid_argument("distortion_estimate: base variance dimension mismatch");
  for (const auto& z : zs)
    if (static_cast<int>(z.size()) != f.d)
      throw std::invalid_argument("distortion_estimate: point dimension mismatch");
  for (double v : base_variance)
    if (!(v > 0.0))
      throw std::invalid_argument("distortion_estimate: base variance must be > 0");

  double mean_term = 0.0;
  for (int y : ys) {
    if (y < 0 || y >= f.k_y)
      throw std::invalid_argument("distortion_estimate: label out of range");
    double q = 0.0;
    for (int j = 0; j < f.d; ++j) {
      const double s = f.a_y(j, y);
      q += s * s / base_variance[j];
    }
    mean_term += 0.5 * q;
  }
  mean_term /= static_cast<double>(ys.size());

  double noise_term = 0.0;
  const Vec v = f.noise_variance_diag();
  for (int j = 0; j < f.d; ++j) {
    const double r = v[j] / base_variance[j];
    noise_term += 0.5 * (r - std::log1p(r));
  }
  return mean_term + noise_term;
}

Matrix distortion_gradient(const FilterParameters& f,
                           const std::vector<int>& ys,
                           const Vec& base_variance) {
  Matrix g(f.d, f.d + f.k_y);
  // mean term: d/dA_y[j,c] = (count_c / m) * A_y[j,c] / sigma_j^2
  Vec class_freq(static_cast<std::size_t>(f.k_y), 0.0);
  for (int y : ys) class_freq[y] += 1.0;
  for (auto& c : class_freq) c /= static_cast<double>(ys.size());
  for (int j = 0; j < f.d; ++j)
    for (int c = 0; c < f.k_y; ++c)
      g(j, f.d + c) = class_freq[c] * f.a_y(j, c) / base_variance[j];

  // noise term: d/dA_eps[j,k] = A_eps[j,k] * v_j / (sigma_j^2 (sigma_j^2 + v_j))
  const Vec v = f.noise_variance_diag();
  for (int j = 0; j < f.d; ++j) {
    const double s2 = base_variance[j];
    const double coef = v[j] / (s2 * (s2 + v[j]));
    for (int k = 0; k < f.d; ++k) g(j, k) = f.a_eps(j, k) * coef;
  }
  return g;
}

}  // namespace latentpriv
