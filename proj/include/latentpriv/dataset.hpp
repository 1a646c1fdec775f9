#ifndef LATENTPRIV_DATASET_HPP
#define LATENTPRIV_DATASET_HPP

#include <stdexcept>
#include <vector>

#include "latentpriv/linalg.hpp"

namespace latentpriv {

// Triples (z, y, u): latent point, private label, utility label.
struct LatentDataset {
  std::vector<Vec> points;
  std::vector<int> private_labels;
  std::vector<int> utility_labels;
  int num_private_classes = 0;
  int num_utility_classes = 0;

  void validate() const {
    if (points.empty() || points.size() != private_labels.size() ||
        points.size() != utility_labels.size())
      throw std::invalid_argument(
          "LatentDataset: points and labels must have equal length >= 1");
    const std::size_t d = points.front().size();
    if (d == 0) throw std::invalid_argument("LatentDataset: zero-dim points");
    for (const auto& p : points)
      if (p.size() != d)
        throw std::invalid_argument("LatentDataset: ragged point dimensions");
    for (int y : private_labels)
      if (y < 0 || y >= num_private_classes)
        throw std::invalid_argument("LatentDataset: private label out of range");
    for (int u : utility_labels)
      if (u < 0 || u >= num_utility_classes)
        throw std::invalid_argument("LatentDataset: utility label out of range");
  }

  std::size_t size() const { return points.size(); }
  int dim() const { return static_cast<int>(points.front().size()); }
};

}  // namespace latentpriv

#endif  // LATENTPRIV_DATASET_HPP
