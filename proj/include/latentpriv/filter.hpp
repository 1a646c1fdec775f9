#ifndef LATENTPRIV_FILTER_HPP
#define LATENTPRIV_FILTER_HPP

#include <vector>

#include "latentpriv/linalg.hpp"
#include "latentpriv/rng.hpp"

namespace latentpriv {

// Generative linear filter z~ = z + A [eps; onehot(y)] with eps ~ N(0, I_d).
// A is d x (d + k_y), partitioned [A_eps | A_y].
struct FilterParameters {
  Matrix a;
  int d = 0;
  int k_y = 0;

  FilterParameters(int d, int k_y);
  static FilterParameters init(int d, int k_y, Rng& rng, double scale = 0.01);

  double a_eps(int row, int col) const { return a(row, col); }
  double a_y(int row, int cls) const { return a(row, d + cls); }
  double& a_eps(int row, int col) { return a(row, col); }
  double& a_y(int row, int cls) { return a(row, d + cls); }

  // Column of A_y for class y: the deterministic mean shift.
  Vec mean_shift(int y) const;

  // v_j = (A_eps A_eps^T)_{jj} = sum_k A_eps[j,k]^2, the per-coordinate
  // variance the noise block injects.
  Vec noise_variance_diag() const;
};

Vec apply_filter(const FilterParameters& f, const Vec& z, int y, Rng& rng);

// KL-style distortion surrogate between the filtered and raw latent
// distributions: batch-averaged same-covariance mean-shift term plus the
// exact additive-noise term, both against the base per-coordinate variances:
//   (1/m) sum_i 1/2 ||A_y onehot(y_i)||^2_{Sigma^-1}
//   + 1/2 sum_j [ v_j / sigma_j^2 - log(1 + v_j / sigma_j^2) ]
// Always >= 0; zero exactly for the identity filter.
double distortion_estimate(const FilterParameters& f,
                           const std::vector<Vec>& zs,
                           const std::vector<int>& ys,
                           const Vec& base_variance);

// Gradient of distortion_estimate with respect to A (same shape as f.a).
Matrix distortion_gradient(const FilterParameters& f,
                           const std::vector<int>& ys,
                           const Vec& base_variance);

}  // namespace latentpriv

#endif  // LATENTPRIV_FILTER_HPP
