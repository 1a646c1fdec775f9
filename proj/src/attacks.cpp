#include "latentpriv/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latentpriv {

void AttackConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("AttackConfig: epsilon must be > 0");
  if (steps < 1) throw std::invalid_argument("AttackConfig: steps must be >= 1");
  if (!(step_size > 0.0)) throw std::invalid_argument("AttackConfig: step_size must be > 0");
}

Vec project_ball(const Vec& x, const Vec& center, double epsilon,
                 AttackNorm norm) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("project_ball: epsilon must be > 0");
  if (x.size() != center.size())
    throw std::invalid_argument("project_ball: dimension mismatch");
  Vec out = x;
  if (norm == AttackNorm::Linf) {
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = std::clamp(out[j], center[j] - epsilon, center[j] + epsilon);
    return out;
  }
  const Vec diff = sub(x, center);
  const double n = l2_norm(diff);
  if (n <= epsilon) return out;
  const double scale = epsilon / n;
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = center[j] + scale * diff[j];
  return out;
}

namespace {

Vec input_gradient(const MlpClassifier& c, const Vec& z, int y) {
  const std::vector<Vec> xs{z};
  const std::vector<int> ys{y};
  return cross_entropy_and_gradients(c, xs, ys).input_grads[0];
}

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Vec fgsm(const MlpClassifier& c, const Vec& z, int y, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("fgsm: epsilon must be > 0");
  const Vec g = input_gradient(c, z, y);
  Vec out = z;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += epsilon * sign0(g[j]);
  return out;
}

Vec pgm(const MlpClassifier& c, const Vec& z, int y, const AttackConfig& cfg) {
  cfg.validate();
  Vec x = z;
  for (int t = 0; t < cfg.steps; ++t) {
    const Vec g = input_gradient(c, x, y);
    Vec v(g.size(), 0.0);
    if (cfg.norm == AttackNorm::L2) {
      const double n = l2_norm(g);
      if (n > 0.0)
        for (std::size_t j = 0; j < g.size(); ++j)
          v[j] = cfg.epsilon * g[j] / n;
    } else {
      for (std::size_t j = 0; j < g.size(); ++j)
        v[j] = cfg.epsilon * sign0(g[j]);
    }
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += cfg.step_size * v[j];
    x = project_ball(x, z, cfg.epsilon, cfg.norm);
  }
  return x;
}

std::vector<Vec> attack_batch(const MlpClassifier& c,
                              const std::vector<Vec>& zs,
                              const std::vector<int>& ys,
                              const AttackConfig& cfg, ExecMode mode) {
  if (zs.size() != ys.size())
    throw std::invalid_argument("attack_batch: points/labels length mismatch");
  cfg.validate();
  std::vector<Vec> out(zs.size());
  struct Done {};
  map_chunks<Done>(
      static_cast<std::int64_t>(zs.size()), 64, mode,
      [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i)
          out[static_cast<std::size_t>(i)] =
              pgm(c, zs[static_cast<std::size_t>(i)],
                  ys[static_cast<std::size_t>(i)], cfg);
        return Done{};
      });
  return out;
}

}  // namespace latentpriv
