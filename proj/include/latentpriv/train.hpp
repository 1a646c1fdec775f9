#ifndef LATENTPRIV_TRAIN_HPP
#define LATENTPRIV_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "latentpriv/dataset.hpp"
#include "latentpriv/filter.hpp"
#include "latentpriv/mlp.hpp"

namespace latentpriv {

struct TrainConfig {
  double beta = 1.0;           // utility weight
  double budget_b = 1.0;       // distortion budget (nats)
  double penalty_kappa = 10.0; // hinge-squared weight on (D - b)_+
  double lr_filter = 0.02;
  double lr_adv = 0.05;
  double lr_util = 0.05;
  int steps_adv = 5;
  int steps_util = 5;
  int steps_filter = 1;
  int rounds = 2000;
  int batch_size = 128;
  int hidden = 15;
  std::uint64_t seed = 42;

  void validate() const;
};

struct TrainRecord {
  int round = 0;
  double adv_ce = 0.0;
  double util_ce = 0.0;
  double distortion = 0.0;  // estimated on the round's filter batch
  double adv_acc = 0.0;     // on the round's privatized batch
  double util_acc = 0.0;
  bool constraint_violated = false;
};

using TrainTrace = std::vector<TrainRecord>;

struct TrainResult {
  FilterParameters filter;
  MlpClassifier adversary;
  MlpClassifier utility;
  TrainTrace trace;
};

// Alternating min-max loop: per round, steps_adv SGD steps for the adversary
// and steps_util for the utility classifier on freshly privatized batches,
// then steps_filter gradient-ascent steps on the filter maximizing
//   adversary CE - beta * utility CE - kappa * (D - b)_+^2
// with gradients flowing through z~ = z + A_eps eps + A_y onehot(y) and eps
// resampled every step. Deterministic for a fixed config and seed. Throws
// NumericalError naming the round if a loss diverges.
TrainResult train_privatizer(const LatentDataset& data, const TrainConfig& cfg);

// Privatizes every point of a dataset with fresh noise from rng.
LatentDataset privatize_dataset(const LatentDataset& data,
                                const FilterParameters& filter, Rng& rng);

// Per-coordinate variance of the raw points; the Sigma of the distortion
// surrogate.
Vec dataset_variance(const LatentDataset& data);

}  // namespace latentpriv

#endif  // LATENTPRIV_TRAIN_HPP
