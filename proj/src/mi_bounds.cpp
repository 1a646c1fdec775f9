#include "latentpriv/mi_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latentpriv {

namespace {

constexpr double kVarianceFloor = 1e-6;

struct RunningMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    double var =
        (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / static_cast<double>(n));
  }
};

// KL( N(m, v) || N(mq, vq) ) for diagonal Gaussians given as raw vectors.
double diag_kl(const Vec& m, const Vec& v, const Vec& mq, const Vec& vq) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double dm = m[j] - mq[j];
    s += std::log(vq[j] / v[j]) - 1.0 + v[j] / vq[j] + dm * dm / vq[j];
  }
  return 0.5 * s;
}

}  // namespace

ClassConditionalModel fit_class_conditionals(const LatentDataset& data) {
  data.validate();
  const int k = data.num_private_classes;
  const int d = data.dim();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  std::vector<Vec> sums(static_cast<std::size_t>(k), Vec(d, 0.0));
  std::vector<Vec> sq_sums(static_cast<std::size_t>(k), Vec(d, 0.0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int y = data.private_labels[i];
    ++counts[y];
    for (int j = 0; j < d; ++j) {
      sums[y][j] += data.points[i][j];
      sq_sums[y][j] += data.points[i][j] * data.points[i][j];
    }
  }
  ClassConditionalModel model;
  model.class_weights.resize(static_cast<std::size_t>(k));
  for (int y = 0; y < k; ++y) {
    if (counts[y] < 2)
      throw std::invalid_argument(
          "fit_class_conditionals: every class needs >= 2 samples");
    const double n = static_cast<double>(counts[y]);
    model.class_weights[y] = n / static_cast<double>(data.size());
    Vec mean(d), var(d);
    for (int j = 0; j < d; ++j) {
      mean[j] = sums[y][j] / n;
      var[j] = std::max(kVarianceFloor, sq_sums[y][j] / n - mean[j] * mean[j]);
    }
    model.conditionals.emplace_back(std::move(mean), std::move(var));
  }
  return model;
}

DiagonalGaussian fit_moments(const std::vector<Vec>& points) {
  if (points.empty()) throw std::invalid_argument("fit_moments: empty sample");
  const int d = static_cast<int>(points.front().size());
  Vec mean(d, 0.0), var(d, 0.0);
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != d)
      throw std::invalid_argument("fit_moments: ragged points");
    for (int j = 0; j < d; ++j) mean[j] += p[j];
  }
  const double n = static_cast<double>(points.size());
  for (int j = 0; j < d; ++j) mean[j] /= n;
  for (const auto& p : points)
    for (int j = 0; j < d; ++j) {
      const double dd = p[j] - mean[j];
      var[j] += dd * dd;
    }
  for (int j = 0; j < d; ++j)
    var[j] = std::max(kVarianceFloor, var[j] / n);
  return DiagonalGaussian(std::move(mean), std::move(var));
}

double label_entropy(const std::vector<int>& labels, int num_classes) {
  if (labels.empty()) throw std::invalid_argument("label_entropy: empty labels");
  Vec freq(static_cast<std::size_t>(num_classes), 0.0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes)
      throw std::invalid_argument("label_entropy: label out of range");
    freq[y] += 1.0;
  }
  double h = 0.0;
  for (double f : freq) {
    const double p = f / static_cast<double>(labels.size());
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

MIEstimate mi_lower_bound(const LatentDataset& data,
                          const ClassConditionalModel& model,
                          const GaussianMixture* true_marginal) {
  data.validate();
  if (model.dim() != data.dim())
    throw std::invalid_argument("mi_lower_bound: dimension mismatch");
  if (data.num_private_classes > model.num_classes())
    throw std::invalid_argument("mi_lower_bound: model missing classes");
  if (true_marginal != nullptr && true_marginal->dim() != data.dim())
    throw std::invalid_argument("mi_lower_bound: marginal dimension mismatch");

  MIEstimate est;
  est.n_samples = static_cast<std::int64_t>(data.size());

  const bool quad = true_marginal != nullptr && data.dim() <= 2;
  RunningMoments acc;
  if (quad) {
    for (std::size_t i = 0; i < data.size(); ++i)
      acc.add(model.conditionals[data.private_labels[i]].log_density(
          data.points[i]));
    const double hz = data.dim() == 1 ? mixture_entropy_quad_1d(*true_marginal)
                                      : mixture_entropy_quad_2d(*true_marginal);
    est.value = acc.mean() + hz;
    est.hz_method = EntropyMethod::Quadrature;
    est.fitted_marginal = false;
  } else {
    const GaussianMixture fitted =
        true_marginal == nullptr ? model.marginal() : *true_marginal;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double lp = model.conditionals[data.private_labels[i]].log_density(
          data.points[i]);
      acc.add(lp - fitted.log_density(data.points[i]));
    }
    est.value = acc.mean();
    est.hz_method = EntropyMethod::McPlugin;
    est.fitted_marginal = true_marginal == nullptr;
  }
  est.std_error = acc.std_error();
  return est;
}

MIEstimate mi_upper_bound_privatized(const LatentDataset& data,
                                     const FilterParameters& filter,
                                     const DiagonalGaussian& marginal_model) {
  data.validate();
  if (filter.d != data.dim() || marginal_model.dim() != data.dim())
    throw std::invalid_argument("mi_upper_bound_privatized: dimension mismatch");
  if (filter.k_y < data.num_private_classes)
    throw std::invalid_argument("mi_upper_bound_privatized: filter missing classes");

  Vec cond_var = filter.noise_variance_diag();
  for (auto& v : cond_var) {
    v += kConditionalJitter;
    if (!(v > 0.0))
      throw std::invalid_argument("mi_upper_bound_privatized: degenerate noise block");
  }

  std::vector<Vec> shifts;
  shifts.reserve(static_cast<std::size_t>(filter.k_y));
  for (int y = 0; y < filter.k_y; ++y) shifts.push_back(filter.mean_shift(y));

  RunningMoments acc;
  Vec mean(static_cast<std::size_t>(data.dim()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vec& shift = shifts[data.private_labels[i]];
    for (int j = 0; j < data.dim(); ++j) mean[j] = data.points[i][j] + shift[j];
    acc.add(diag_kl(mean, cond_var, marginal_model.mean, marginal_model.variance));
  }
  MIEstimate est;
  est.value = acc.mean();
  est.std_error = acc.std_error();
  est.n_samples = static_cast<std::int64_t>(data.size());
  est.hz_method = EntropyMethod::McPlugin;
  est.fitted_marginal = true;
  return est;
}

double mi_cross_entropy_plugin(const LatentDataset& data,
                               const MlpClassifier& classifier) {
  data.validate();
  if (classifier.num_classes() != data.num_private_classes)
    throw std::invalid_argument("mi_cross_entropy_plugin: class count mismatch");
  if (classifier.input_dim() != data.dim())
    throw std::invalid_argument("mi_cross_entropy_plugin: dimension mismatch");
  double ce = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    ce += cross_entropy_single(classifier, data.points[i], data.private_labels[i]);
  ce /= static_cast<double>(data.size());
  return label_entropy(data.private_labels, data.num_private_classes) - ce;
}

namespace {

// Integration window covering every component to +-12 sigma.
void quad_range(const GaussianMixture& mix, int axis, double* lo, double* hi) {
  *lo = std::numeric_limits<double>::infinity();
  *hi = -std::numeric_limits<double>::infinity();
  for (const auto& c : mix.components) {
    const double s = std::sqrt(c.variance[axis]);
    *lo = std::min(*lo, c.mean[axis] - 12.0 * s);
    *hi = std::max(*hi, c.mean[axis] + 12.0 * s);
  }
}

double neg_plogp(const GaussianMixture& mix, const Vec& x) {
  const double lq = mix.log_density(x);
  if (lq < -700.0) return 0.0;
  return -std::exp(lq) * lq;
}

}  // namespace

double mixture_entropy_quad_1d(const GaussianMixture& mix) {
  if (mix.dim() != 1)
    throw std::invalid_argument("mixture_entropy_quad_1d: dimension must be 1");
  double lo, hi;
  quad_range(mix, 0, &lo, &hi);
  const int n = 8192;  // even, composite Simpson
  const double h = (hi - lo) / n;
  double s = 0.0;
  Vec x(1);
  for (int i = 0; i <= n; ++i) {
    x[0] = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * neg_plogp(mix, x);
  }
  return s * h / 3.0;
}

double mixture_entropy_quad_2d(const GaussianMixture& mix) {
  if (mix.dim() != 2)
    throw std::invalid_argument("mixture_entropy_quad_2d: dimension must be 2");
  double lo0, hi0, lo1, hi1;
  quad_range(mix, 0, &lo0, &hi0);
  quad_range(mix, 1, &lo1, &hi1);
  const int n = 720;  // even
  const double h0 = (hi0 - lo0) / n;
  const double h1 = (hi1 - lo1) / n;
  double s = 0.0;
  Vec x(2);
  for (int i = 0; i <= n; ++i) {
    x[0] = lo0 + i * h0;
    const double wi = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    double row = 0.0;
    for (int j = 0; j <= n; ++j) {
      x[1] = lo1 + j * h1;
      const double wj = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      row += wj * neg_plogp(mix, x);
    }
    s += wi * row;
  }
  return s * h0 * h1 / 9.0;
}

}  // namespace latentpriv
