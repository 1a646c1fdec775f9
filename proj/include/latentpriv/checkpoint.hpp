#ifndef LATENTPRIV_CHECKPOINT_HPP
#define LATENTPRIV_CHECKPOINT_HPP

#include <string>

#include "latentpriv/train.hpp"

namespace latentpriv {

// JSON model checkpoint (format_version 1) bundling the filter, both
// classifiers, and the training config with its seed. Layout documented in
// the README and stable across releases.
struct Checkpoint {
  TrainConfig config;
  FilterParameters filter{1, 1};
  MlpClassifier adversary;
  MlpClassifier utility;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace latentpriv

#endif  // LATENTPRIV_CHECKPOINT_HPP
