#include "latentpriv/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "latentpriv/rng.hpp"

namespace latentpriv {

void ScenarioSpec::validate() const {
  if (d < 1 || k_y < 1 || k_u < 1)
    throw std::invalid_argument("ScenarioSpec: bad dimensions");
  if (m < 1) throw std::invalid_argument("ScenarioSpec: m must be >= 1");
  const std::size_t cells = static_cast<std::size_t>(k_y) * k_u;
  if (cell_means.size() != cells || cell_variances.size() != cells ||
      cell_weights.size() != cells)
    throw std::invalid_argument("ScenarioSpec: cell table size mismatch");
  double s = 0.0;
  for (double w : cell_weights) {
    if (w < 0.0) throw std::invalid_argument("ScenarioSpec: negative weight");
    s += w;
  }
  if (std::fabs(s - 1.0) > 1e-9)
    throw std::invalid_argument("ScenarioSpec: weights must sum to 1");
  for (const auto& mu : cell_means)
    if (static_cast<int>(mu.size()) != d || !all_finite(mu))
      throw std::invalid_argument("ScenarioSpec: bad cell mean");
  for (const auto& v : cell_variances) {
    if (static_cast<int>(v.size()) != d)
      throw std::invalid_argument("ScenarioSpec: bad cell variance");
    for (double x : v)
      if (!(x > 0.0))
        throw std::invalid_argument("ScenarioSpec: variances must be > 0");
  }
}

ScenarioSpec ScenarioSpec::s1(std::int64_t m, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.name = "S1";
  spec.d = 10;
  spec.k_y = 2;
  spec.k_u = 2;
  spec.m = m;
  spec.seed = seed;
  for (int y = 0; y < 2; ++y)
    for (int u = 0; u < 2; ++u) {
      Vec mean(10, 0.0);
      mean[0] = y == 0 ? -2.0 : 2.0;
      mean[1] = u == 0 ? -2.0 : 2.0;
      spec.cell_means.push_back(std::move(mean));
      spec.cell_variances.push_back(Vec(10, 1.0));
      spec.cell_weights.push_back(0.25);
    }
  return spec;
}

LatentDataset generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  LatentDataset data;
  data.num_private_classes = spec.k_y;
  data.num_utility_classes = spec.k_u;
  data.points.reserve(static_cast<std::size_t>(spec.m));
  data.private_labels.reserve(static_cast<std::size_t>(spec.m));
  data.utility_labels.reserve(static_cast<std::size_t>(spec.m));
  for (std::int64_t i = 0; i < spec.m; ++i) {
    const double r = rng.uniform();
    double acc = 0.0;
    int cell = static_cast<int>(spec.cell_weights.size()) - 1;
    for (std::size_t c = 0; c < spec.cell_weights.size(); ++c) {
      acc += spec.cell_weights[c];
      if (r < acc) {
        cell = static_cast<int>(c);
        break;
      }
    }
    const int y = cell / spec.k_u;
    const int u = cell % spec.k_u;
    Vec z(static_cast<std::size_t>(spec.d));
    for (int j = 0; j < spec.d; ++j)
      z[j] = spec.cell_means[cell][j] +
             std::sqrt(spec.cell_variances[cell][j]) * rng.normal();
    data.points.push_back(std::move(z));
    data.private_labels.push_back(y);
    data.utility_labels.push_back(u);
  }
  data.validate();
  return data;
}

GaussianMixture scenario_marginal(const ScenarioSpec& spec) {
  spec.validate();
  std::vector<DiagonalGaussian> comps;
  for (std::size_t c = 0; c < spec.cell_weights.size(); ++c)
    comps.emplace_back(spec.cell_means[c], spec.cell_variances[c]);
  return GaussianMixture(spec.cell_weights, std::move(comps));
}

GaussianMixture scenario_class_conditional(const ScenarioSpec& spec, int y) {
  spec.validate();
  if (y < 0 || y >= spec.k_y)
    throw std::invalid_argument("scenario_class_conditional: label out of range");
  Vec weights;
  std::vector<DiagonalGaussian> comps;
  double total = 0.0;
  for (int u = 0; u < spec.k_u; ++u) total += spec.cell_weights[spec.cell(y, u)];
  if (total <= 0.0)
    throw std::invalid_argument("scenario_class_conditional: class has zero mass");
  for (int u = 0; u < spec.k_u; ++u) {
    const int c = spec.cell(y, u);
    weights.push_back(spec.cell_weights[c] / total);
    comps.emplace_back(spec.cell_means[c], spec.cell_variances[c]);
  }
  return GaussianMixture(std::move(weights), std::move(comps));
}

}  // namespace latentpriv
