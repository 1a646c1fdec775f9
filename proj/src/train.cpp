#include "latentpriv/train.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "latentpriv/errors.hpp"

namespace latentpriv {

void TrainConfig::validate() const {
  if (beta < 0.0) throw std::invalid_argument("TrainConfig: beta must be >= 0");
  if (!(budget_b > 0.0)) throw std::invalid_argument("TrainConfig: budget_b must be > 0");
  if (!(penalty_kappa > 0.0)) throw std::invalid_argument("TrainConfig: kappa must be > 0");
  if (!(lr_filter > 0.0 && lr_adv > 0.0 && lr_util > 0.0))
    throw std::invalid_argument("TrainConfig: learning rates must be > 0");
  if (steps_adv < 0 || steps_util < 0 || steps_filter < 0)
    throw std::invalid_argument("TrainConfig: negative step counts");
  if (rounds < 1) throw std::invalid_argument("TrainConfig: rounds must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (hidden < 1) throw std::invalid_argument("TrainConfig: hidden must be >= 1");
}

Vec dataset_variance(const LatentDataset& data) {
  const int d = data.dim();
  Vec mean(d, 0.0), var(d, 0.0);
  for (const auto& p : data.points)
    for (int j = 0; j < d; ++j) mean[j] += p[j];
  const double n = static_cast<double>(data.size());
  for (int j = 0; j < d; ++j) mean[j] /= n;
  for (const auto& p : data.points)
    for (int j = 0; j < d; ++j) {
      const double dd = p[j] - mean[j];
      var[j] += dd * dd;
    }
  for (int j = 0; j < d; ++j) var[j] = std::max(1e-12, var[j] / n);
  return var;
}

LatentDataset privatize_dataset(const LatentDataset& data,
                                const FilterParameters& filter, Rng& rng) {
  LatentDataset out = data;
  for (std::size_t i = 0; i < data.size(); ++i)
    out.points[i] =
        apply_filter(filter, data.points[i], data.private_labels[i], rng);
  return out;
}

namespace {

struct Batch {
  std::vector<Vec> z;         // raw points
  std::vector<Vec> z_tilde;   // privatized points
  std::vector<Vec> eps;       // the noise draws used
  std::vector<int> y;
  std::vector<int> u;
};

void draw_batch(const LatentDataset& data, const FilterParameters& filter,
                int batch_size, Rng& rng, Batch* batch) {
  const std::size_t m = data.size();
  batch->z.resize(batch_size);
  batch->z_tilde.resize(batch_size);
  batch->eps.resize(batch_size);
  batch->y.resize(batch_size);
  batch->u.resize(batch_size);
  const int d = filter.d;
  for (int b = 0; b < batch_size; ++b) {
    std::size_t idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(m));
    if (idx >= m) idx = m - 1;
    batch->z[b] = data.points[idx];
    batch->y[b] = data.private_labels[idx];
    batch->u[b] = data.utility_labels[idx];
    Vec eps(static_cast<std::size_t>(d));
    for (auto& e : eps) e = rng.normal();
    Vec zt = batch->z[b];
    for (int j = 0; j < d; ++j) {
      double acc = filter.a_y(j, batch->y[b]);
      for (int k = 0; k < d; ++k) acc += filter.a_eps(j, k) * eps[k];
      zt[j] += acc;
    }
    batch->eps[b] = std::move(eps);
    batch->z_tilde[b] = std::move(zt);
  }
}

// Accumulates d(loss)/dA from per-sample input gradients: for sample i,
// d z~_i[j] / d A_eps[j,k] = eps_i[k] and d z~_i[j] / d A_y[j,c] = [y_i = c].
void accumulate_filter_gradient(const Batch& batch,
                                const std::vector<Vec>& input_grads,
                                double weight, int d, Matrix* grad) {
  for (std::size_t i = 0; i < input_grads.size(); ++i) {
    const Vec& g = input_grads[i];
    const Vec& eps = batch.eps[i];
    const int y = batch.y[i];
    for (int j = 0; j < d; ++j) {
      const double gj = weight * g[j];
      if (gj == 0.0) continue;
      double* row = grad->data.data() + static_cast<std::size_t>(j) * grad->cols;
      for (int k = 0; k < d; ++k) row[k] += gj * eps[k];
      row[d + y] += gj;
    }
  }
}

}  // namespace

TrainResult train_privatizer(const LatentDataset& data, const TrainConfig& cfg) {
  data.validate();
  cfg.validate();
  const int d = data.dim();
  const int k_y = data.num_private_classes;
  const int k_u = data.num_utility_classes;
  const Vec base_var = dataset_variance(data);

  Rng rng(cfg.seed);
  FilterParameters filter = FilterParameters::init(d, k_y, rng);
  MlpClassifier adversary = MlpClassifier::init(d, cfg.hidden, k_y, rng);
  MlpClassifier utility = MlpClassifier::init(d, cfg.hidden, k_u, rng);

  TrainResult result{filter, adversary, utility, {}};
  result.trace.reserve(static_cast<std::size_t>(cfg.rounds));

  Batch batch;
  for (int round = 0; round < cfg.rounds; ++round) {
    TrainRecord rec;
    rec.round = round;

    for (int s = 0; s < cfg.steps_adv; ++s) {
      draw_batch(data, result.filter, cfg.batch_size, rng, &batch);
      const CeBatchResult r =
          cross_entropy_and_gradients(result.adversary, batch.z_tilde, batch.y);
      sgd_step(result.adversary, r.grads, cfg.lr_adv);
      rec.adv_ce = r.loss;
    }
    for (int s = 0; s < cfg.steps_util; ++s) {
      draw_batch(data, result.filter, cfg.batch_size, rng, &batch);
      const CeBatchResult r =
          cross_entropy_and_gradients(result.utility, batch.z_tilde, batch.u);
      sgd_step(result.utility, r.grads, cfg.lr_util);
      rec.util_ce = r.loss;
    }

    for (int s = 0; s < cfg.steps_filter; ++s) {
      draw_batch(data, result.filter, cfg.batch_size, rng, &batch);
      const CeBatchResult adv_r =
          cross_entropy_and_gradients(result.adversary, batch.z_tilde, batch.y);
      const CeBatchResult util_r =
          cross_entropy_and_gradients(result.utility, batch.z_tilde, batch.u);
      const double dist =
          distortion_estimate(result.filter, batch.z, batch.y, base_var);

      // ascend adv CE - beta util CE - kappa (D - b)_+^2
      Matrix ascent(d, d + k_y);
      accumulate_filter_gradient(batch, adv_r.input_grads, 1.0, d, &ascent);
      accumulate_filter_gradient(batch, util_r.input_grads, -cfg.beta, d, &ascent);
      const double hinge = std::max(0.0, dist - cfg.budget_b);
      if (hinge > 0.0) {
        const Matrix dist_grad =
            distortion_gradient(result.filter, batch.y, base_var);
        const double coef = 2.0 * cfg.penalty_kappa * hinge;
        for (std::size_t i = 0; i < ascent.data.size(); ++i)
          ascent.data[i] -= coef * dist_grad.data[i];
      }
      for (std::size_t i = 0; i < ascent.data.size(); ++i)
        result.filter.a.data[i] += cfg.lr_filter * ascent.data[i];

      rec.adv_ce = adv_r.loss;
      rec.util_ce = util_r.loss;
      rec.distortion = dist;
      rec.constraint_violated = dist > cfg.budget_b;
      rec.adv_acc = classifier_accuracy(result.adversary, batch.z_tilde, batch.y);
      rec.util_acc = classifier_accuracy(result.utility, batch.z_tilde, batch.u);
    }
    if (cfg.steps_filter == 0) {
      // still trace the distortion and batch accuracies
      draw_batch(data, result.filter, cfg.batch_size, rng, &batch);
      rec.distortion =
          distortion_estimate(result.filter, batch.z, batch.y, base_var);
      rec.constraint_violated = rec.distortion > cfg.budget_b;
      rec.adv_acc = classifier_accuracy(result.adversary, batch.z_tilde, batch.y);
      rec.util_acc = classifier_accuracy(result.utility, batch.z_tilde, batch.u);
    }

    if (!std::isfinite(rec.adv_ce) || !std::isfinite(rec.util_ce) ||
        !std::isfinite(rec.distortion) || !all_finite(result.filter.a.data))
      throw NumericalError("train_privatizer: non-finite loss at round " +
                           std::to_string(round));
    result.trace.push_back(rec);
  }
  return result;
}

}  // namespace latentpriv
