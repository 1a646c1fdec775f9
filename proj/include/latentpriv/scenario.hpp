#ifndef LATENTPRIV_SCENARIO_HPP
#define LATENTPRIV_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "latentpriv/dataset.hpp"
#include "latentpriv/gaussian.hpp"

namespace latentpriv {

// Synthetic latent model: one diagonal-Gaussian component per (y, u) cell.
// Stands in for a pretrained encoder's latent distribution.
struct ScenarioSpec {
  std::string name;
  int d = 10;
  int k_y = 2;
  int k_u = 2;
  std::int64_t m = 8000;
  std::uint64_t seed = 42;
  std::vector<Vec> cell_means;      // k_y * k_u entries, index y * k_u + u
  std::vector<Vec> cell_variances;
  Vec cell_weights;

  void validate() const;
  int cell(int y, int u) const { return y * k_u + u; }

  // Built-in scenario S1: d=10, two private and two utility classes, private
  // label separated along axis 0 (means -2/+2), utility along axis 1, unit
  // variances, balanced cells. The axes are orthogonal, so privatization need
  // not destroy utility.
  static ScenarioSpec s1(std::int64_t m = 8000, std::uint64_t seed = 42);
};

LatentDataset generate_scenario(const ScenarioSpec& spec);

// The exact generating mixtures, for oracles and the MI bounds' true-marginal
// path.
GaussianMixture scenario_marginal(const ScenarioSpec& spec);
GaussianMixture scenario_class_conditional(const ScenarioSpec& spec, int y);

}  // namespace latentpriv

#endif  // LATENTPRIV_SCENARIO_HPP
