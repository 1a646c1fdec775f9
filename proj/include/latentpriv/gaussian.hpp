#ifndef LATENTPRIV_GAUSSIAN_HPP
#define LATENTPRIV_GAUSSIAN_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "latentpriv/linalg.hpp"
#include "latentpriv/rng.hpp"

namespace latentpriv {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Gaussian with diagonal covariance, the latent-distribution workhorse.
// Variances must be strictly positive in every coordinate.
struct DiagonalGaussian {
  Vec mean;
  Vec variance;

  DiagonalGaussian(Vec mu, Vec var)
      : mean(std::move(mu)), variance(std::move(var)) {
    if (mean.empty() || mean.size() != variance.size())
      throw std::invalid_argument(
          "DiagonalGaussian: mean/variance must have equal length >= 1");
    for (double v : variance)
      if (!(v > 0.0))
        throw std::invalid_argument(
            "DiagonalGaussian: variance must be strictly positive");
  }

  int dim() const { return static_cast<int>(mean.size()); }

  static DiagonalGaussian standard(int d) {
    return DiagonalGaussian(Vec(d, 0.0), Vec(d, 1.0));
  }

  // log N(x; mean, diag(variance)) = -1/2 sum_j [log(2 pi v_j) + (x_j-m_j)^2/v_j]
  double log_density(const Vec& x) const {
    if (x.size() != mean.size())
      throw std::invalid_argument("log_density: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - mean[j];
      s += std::log(variance[j]) + kLog2Pi + d * d / variance[j];
    }
    return -0.5 * s;
  }

  Vec sample(Rng& rng) const {
    Vec x(mean.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      x[j] = mean[j] + std::sqrt(variance[j]) * rng.normal();
    return x;
  }

  std::vector<Vec> sample_n(Rng& rng, std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("sample_n: n must be >= 1");
    std::vector<Vec> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = sample(rng);
    return out;
  }

  // Differential entropy: 1/2 sum_j (1 + log(2 pi v_j)).
  double entropy() const {
    double s = 0.0;
    for (double v : variance) s += 1.0 + kLog2Pi + std::log(v);
    return 0.5 * s;
  }
};

// Finite mixture of diagonal Gaussians. Serves as the synthetic latent model
// and as the "true marginal" oracle handed to the MI bounds.
struct GaussianMixture {
  Vec weights;
  std::vector<DiagonalGaussian> components;

  GaussianMixture(Vec w, std::vector<DiagonalGaussian> comps)
      : weights(std::move(w)), components(std::move(comps)) {
    if (weights.empty() || weights.size() != components.size())
      throw std::invalid_argument("GaussianMixture: weights/components mismatch");
    double s = 0.0;
    for (double x : weights) {
      if (x < 0.0) throw std::invalid_argument("GaussianMixture: negative weight");
      s += x;
    }
    if (std::fabs(s - 1.0) > 1e-9)
      throw std::invalid_argument("GaussianMixture: weights must sum to 1");
    const int d = components.front().dim();
    for (const auto& c : components)
      if (c.dim() != d)
        throw std::invalid_argument("GaussianMixture: dimension mismatch");
  }

  int dim() const { return components.front().dim(); }

  double log_density(const Vec& x) const {
    Vec terms(components.size());
    for (std::size_t k = 0; k < components.size(); ++k)
      terms[k] = weights[k] > 0.0
                     ? std::log(weights[k]) + components[k].log_density(x)
                     : -std::numeric_limits<double>::infinity();
    return logsumexp(terms);
  }

  std::pair<int, Vec> sample_with_component(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    int k = static_cast<int>(components.size()) - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) {
        k = static_cast<int>(i);
        break;
      }
    }
    return {k, components[static_cast<std::size_t>(k)].sample(rng)};
  }

  Vec sample(Rng& rng) const { return sample_with_component(rng).second; }
};

}  // namespace latentpriv

#endif  // LATENTPRIV_GAUSSIAN_HPP
