#include "latentpriv/dro_dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latentpriv/errors.hpp"
#include "latentpriv/optimize.hpp"
#include "latentpriv/rng.hpp"

namespace latentpriv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-11;

double generator_alpha(const FGenerator& gen) {
  switch (gen.kind) {
    case FGenerator::Kind::KL:
      return 1.0;
    case FGenerator::Kind::ReverseKL:
      return 0.0;
    case FGenerator::Kind::ChiSquare:
      return 2.0;
    case FGenerator::Kind::Alpha:
      return gen.alpha;
  }
  return 0.0;
}

// f(t) with the t = 0 limit mapped to +inf where it diverges, for feasibility
// checks of candidate reweightings that zero out atoms.
double f_or_limit(const FGenerator& gen, double t) {
  if (t > 0.0) {
    if (gen.kind == FGenerator::Kind::Alpha && gen.alpha == 2.0)
      return 0.5 * (t - 1.0) * (t - 1.0);
    return f_eval(gen, t);
  }
  switch (gen.kind) {
    case FGenerator::Kind::KL:
      return 1.0;
    case FGenerator::Kind::ReverseKL:
      return kInf;
    case FGenerator::Kind::ChiSquare:
      return 0.5;
    case FGenerator::Kind::Alpha:
      return gen.alpha > 0.0 ? 1.0 / gen.alpha : kInf;
  }
  return kInf;
}

double divergence_of(const DiscreteLossProblem& prob, const Vec& w) {
  double d = 0.0;
  for (int i = 0; i < prob.size(); ++i) {
    d += prob.base_probs[i] * f_or_limit(prob.generator, w[i] / prob.base_probs[i]);
    if (!(d < kInf)) return kInf;
  }
  return d;
}

double objective_of(const DiscreteLossProblem& prob, const Vec& w) {
  return dot(w, prob.losses);
}

bool feasible(const DiscreteLossProblem& prob, const Vec& w) {
  for (double x : w)
    if (x < 0.0) return false;
  return divergence_of(prob, w) <= prob.delta + kFeasTol;
}

// Euclidean projection onto the probability simplex.
Vec project_simplex(Vec v) {
  Vec u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (auto& x : v) x = std::max(0.0, x - theta);
  return v;
}

struct PrimalCandidate {
  double value = -kInf;
  Vec w;
};

void keep_better(PrimalCandidate& best, const Vec& w, double value) {
  if (value > best.value) {
    best.value = value;
    best.w = w;
  }
}

// Largest s in [0,1] with w + s (target - w) feasible, assuming w feasible.
// The feasible prefix is an interval because the constraint set is convex.
Vec pull_feasible(const DiscreteLossProblem& prob, const Vec& w,
                  const Vec& target, int iters = 60) {
  if (feasible(prob, target)) return target;
  double lo = 0.0, hi = 1.0;
  Vec cand(w.size());
  for (int it = 0; it < iters; ++it) {
    const double s = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < w.size(); ++i)
      cand[i] = w[i] + s * (target[i] - w[i]);
    if (feasible(prob, cand)) {
      lo = s;
    } else {
      hi = s;
    }
  }
  for (std::size_t i = 0; i < w.size(); ++i)
    cand[i] = w[i] + lo * (target[i] - w[i]);
  return cand;
}

// Projected-gradient ascent for the linear objective over the intersection of
// the simplex and the divergence ball. Steps project onto the simplex, then
// back off along the segment to stay inside the divergence ball. For a linear
// objective on a convex set any local maximum is global, so the step-halving
// schedule converges; restarts and the grid below guard the numerics.
PrimalCandidate local_ascent(const DiscreteLossProblem& prob, Vec w,
                             int max_iters = 400) {
  const int m = prob.size();
  double value = objective_of(prob, w);
  Vec trial(static_cast<std::size_t>(m));
  for (int iter = 0; iter < max_iters; ++iter) {
    bool improved = false;
    double t = 1.0;
    for (int th = 0; th < 44 && !improved; ++th, t *= 0.5) {
      for (int i = 0; i < m; ++i) trial[i] = w[i] + t * prob.losses[i];
      Vec proj = project_simplex(trial);
      double move = 0.0;
      for (int i = 0; i < m; ++i) move = std::max(move, std::fabs(proj[i] - w[i]));
      if (move < 1e-15) continue;
      double s = 1.0;
      for (int sh = 0; sh < 46; ++sh, s *= 0.5) {
        for (int i = 0; i < m; ++i) trial[i] = w[i] + s * (proj[i] - w[i]);
        if (!feasible(prob, trial)) continue;
        const double v = objective_of(prob, trial);
        if (v > value + 1e-15) {
          w = trial;
          value = v;
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
  return {value, w};
}

// Boundary probes along random tangent directions (sum d_i = 0): walks to the
// feasibility boundary in each direction and keeps improvements. Catches the
// thin improvement cones near the constrained optimum that axis-aligned
// pattern moves miss.
PrimalCandidate directional_polish(const DiscreteLossProblem& prob,
                                   PrimalCandidate start, std::uint64_t seed) {
  const int m = prob.size();
  Rng rng(seed);
  Vec dir(static_cast<std::size_t>(m));
  Vec target(static_cast<std::size_t>(m));
  for (int round = 0; round < 8; ++round) {
    bool improved = false;
    for (int probe = 0; probe < 48; ++probe) {
      double mean = 0.0;
      for (auto& d : dir) {
        d = rng.normal();
        mean += d;
      }
      mean /= m;
      for (auto& d : dir) d -= mean;
      if (dot(dir, prob.losses) < 0.0)
        for (auto& d : dir) d = -d;
      // longest simplex-feasible step in this direction
      double t_max = kInf;
      for (int i = 0; i < m; ++i)
        if (dir[i] < 0.0) t_max = std::min(t_max, -start.w[i] / dir[i]);
      if (!(t_max > 0.0) || !std::isfinite(t_max)) continue;
      for (int i = 0; i < m; ++i) target[i] = start.w[i] + t_max * dir[i];
      const Vec cand = pull_feasible(prob, start.w, target, 80);
      const double v = objective_of(prob, cand);
      if (v > start.value + 1e-15) {
        start.w = cand;
        start.value = v;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return start;
}

// Interior stationary point for the chi-square family (alpha = 2), where the
// constrained maximum has the classical closed form
//   w_i = p_i (1 + (dl_i - E[dl]) / nu),  nu = sqrt(Var_{q_phi}(dl) / (2 delta))
// valid whenever every w_i stays nonnegative.
void add_chi2_interior_candidate(const DiscreteLossProblem& prob,
                                 PrimalCandidate& best) {
  const bool chi2_like =
      prob.generator.kind == FGenerator::Kind::ChiSquare ||
      (prob.generator.kind == FGenerator::Kind::Alpha && prob.generator.alpha == 2.0);
  if (!chi2_like || !(prob.delta > 0.0)) return;
  const int m = prob.size();
  double mean = 0.0;
  for (int i = 0; i < m; ++i) mean += prob.base_probs[i] * prob.losses[i];
  double var = 0.0;
  for (int i = 0; i < m; ++i) {
    const double d = prob.losses[i] - mean;
    var += prob.base_probs[i] * d * d;
  }
  if (var <= 0.0) return;
  const double nu = std::sqrt(var / (2.0 * prob.delta));
  Vec w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    w[i] = prob.base_probs[i] * (1.0 + (prob.losses[i] - mean) / nu);
    if (w[i] < 0.0) return;  // optimum on the rho >= 0 boundary instead
  }
  if (feasible(prob, w)) keep_better(best, w, objective_of(prob, w));
}

// Interior stationary point for the KL generator: the exponential tilt
// rho_i = exp((dl_i - mu)/nu) with mu fixed by normalization; nu > 0 is found
// by bisection on the divergence constraint (the tilt divergence is monotone
// in the temperature). Always strictly positive, so no boundary case.
void add_kl_interior_candidate(const DiscreteLossProblem& prob,
                               PrimalCandidate& best) {
  if (prob.generator.kind != FGenerator::Kind::KL || !(prob.delta > 0.0)) return;
  const int m = prob.size();
  auto tilt = [&](double nu, Vec* w_out) {
    Vec terms(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      terms[i] = std::log(prob.base_probs[i]) + prob.losses[i] / nu;
    const double lse = logsumexp(terms);
    double div = 0.0;
    for (int i = 0; i < m; ++i) {
      const double w = std::exp(terms[i] - lse);
      div += w * (terms[i] - lse - std::log(prob.base_probs[i]));
      if (w_out != nullptr) (*w_out)[i] = w;
    }
    return div;
  };
  double lo = 1e-6, hi = 1.0;
  while (tilt(hi, nullptr) > prob.delta && hi < 1e12) hi *= 2.0;
  while (tilt(lo, nullptr) < prob.delta && lo > 1e-14) lo *= 0.5;
  const double nu =
      bisect_root([&](double v) { return tilt(v, nullptr) - prob.delta; }, lo, hi);
  Vec w(static_cast<std::size_t>(m));
  tilt(nu, &w);
  if (feasible(prob, w)) keep_better(best, w, objective_of(prob, w));
}

// Compass pattern search in the (w_0, .., w_{m-2}) coordinates with shrinking
// steps; polishes grid solutions against the curved divergence boundary.
PrimalCandidate compass_polish(const DiscreteLossProblem& prob,
                               PrimalCandidate start) {
  const int m = prob.size();
  const int k = m - 1;
  Vec w = start.w;
  double value = start.value;
  Vec cand(static_cast<std::size_t>(m));
  for (double step = 1e-2; step > 1e-11; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int axis = 0; axis < k; ++axis) {
        for (double sign : {1.0, -1.0}) {
          cand = w;
          cand[axis] += sign * step;
          double rest = 0.0;
          for (int i = 0; i < k; ++i) rest += cand[i];
          cand[k] = 1.0 - rest;
          if (cand[axis] < 0.0 || cand[k] < 0.0) continue;
          if (!feasible(prob, cand)) continue;
          const double v = objective_of(prob, cand);
          if (v > value + 1e-16) {
            w = cand;
            value = v;
            improved = true;
          }
        }
      }
      // diagonal moves help when the boundary is oblique to the axes
      for (int a = 0; a < k && k >= 2; ++a) {
        for (int b = a + 1; b < k; ++b) {
          for (double sa : {1.0, -1.0}) {
            for (double sb : {1.0, -1.0}) {
              cand = w;
              cand[a] += sa * step;
              cand[b] += sb * step;
              double rest = 0.0;
              for (int i = 0; i < k; ++i) rest += cand[i];
              cand[k] = 1.0 - rest;
              bool ok = cand[k] >= 0.0;
              for (int i = 0; i < k && ok; ++i) ok = cand[i] >= 0.0;
              if (!ok || !feasible(prob, cand)) continue;
              const double v = objective_of(prob, cand);
              if (v > value + 1e-16) {
                w = cand;
                value = v;
              }
            }
          }
        }
      }
    }
  }
  return {value, w};
}

}  // namespace

AlphaDualSpec::AlphaDualSpec(double a, double d, double b)
    : alpha(a), delta(d), beta(b) {
  if (!(delta > 0.0)) throw std::invalid_argument("AlphaDualSpec: delta must be > 0");
  if (alpha == 0.0 || alpha == 1.0)
    throw std::invalid_argument("AlphaDualSpec: alpha must lie outside {0,1}");
  if (beta < 0.0) throw std::invalid_argument("AlphaDualSpec: beta must be >= 0");
}

DiscreteLossProblem::DiscreteLossProblem(Vec probs, Vec loss, FGenerator gen,
                                         double d)
    : base_probs(std::move(probs)),
      losses(std::move(loss)),
      generator(gen),
      delta(d) {
  if (base_probs.size() < 2)
    throw std::invalid_argument("DiscreteLossProblem: need at least 2 atoms");
  if (base_probs.size() != losses.size())
    throw std::invalid_argument("DiscreteLossProblem: probs/losses length mismatch");
  double s = 0.0;
  for (double p : base_probs) {
    if (p < 0.0) throw std::invalid_argument("DiscreteLossProblem: negative prob");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteLossProblem: probs must sum to 1");
  if (!all_finite(losses))
    throw std::invalid_argument("DiscreteLossProblem: non-finite losses");
  if (delta < 0.0) throw std::invalid_argument("DiscreteLossProblem: delta < 0");
}

double conjugate_alpha(double alpha, double s) {
  if (alpha == 0.0 || alpha == 1.0)
    throw std::invalid_argument("conjugate_alpha: alpha must lie outside {0,1}");
  const double base = std::max(0.0, (alpha - 1.0) * s + 1.0);
  return (std::pow(base, alpha / (alpha - 1.0)) - 1.0) / alpha;
}

double conjugate_kl(double s) { return std::expm1(s); }

double conjugate_reverse_kl(double s) {
  if (s >= 1.0)
    throw std::invalid_argument("conjugate_reverse_kl: infinite for s >= 1");
  return -std::log1p(-s);
}

double conjugate(const FGenerator& gen, double s) {
  switch (gen.kind) {
    case FGenerator::Kind::KL:
      return conjugate_kl(s);
    case FGenerator::Kind::ReverseKL:
      return conjugate_reverse_kl(s);
    case FGenerator::Kind::ChiSquare:
      return conjugate_alpha(2.0, s);
    case FGenerator::Kind::Alpha:
      return conjugate_alpha(gen.alpha, s);
  }
  throw std::invalid_argument("conjugate: unknown generator");
}

double dual_objective(const DiscreteLossProblem& problem, double lambda,
                      double mu) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("dual_objective: lambda must be > 0");
  double e = 0.0;
  for (int i = 0; i < problem.size(); ++i) {
    const double s = (problem.losses[i] - mu) / lambda;
    e += problem.base_probs[i] * conjugate(problem.generator, s);
  }
  return lambda * e + lambda * problem.delta + mu;
}

LambdaStar optimal_lambda(const AlphaDualSpec& spec,
                          const DiscreteLossProblem& problem,
                          double mu_tilde) {
  if (!(spec.alpha > 1.0))
    throw std::invalid_argument("optimal_lambda: requires alpha > 1");
  const double at = spec.a_tilde();
  double moment = 0.0;
  for (int i = 0; i < problem.size(); ++i) {
    const double pos = std::max(0.0, problem.losses[i] - mu_tilde);
    if (pos > 0.0) moment += problem.base_probs[i] * std::pow(pos, at);
  }
  if (moment <= 0.0) return {0.0, true};
  const double scale =
      std::pow(spec.alpha * (spec.alpha - 1.0) * spec.delta + 1.0, -1.0 / at);
  return {scale * (spec.alpha - 1.0) * std::pow(moment, 1.0 / at), false};
}

double corollary_objective(const AlphaDualSpec& spec,
                           const DiscreteLossProblem& problem,
                           double mu_tilde) {
  if (!(spec.alpha > 1.0))
    throw std::invalid_argument("corollary_objective: requires alpha > 1");
  const double at = spec.a_tilde();
  double moment = 0.0;
  for (int i = 0; i < problem.size(); ++i) {
    const double pos = std::max(0.0, problem.losses[i] - mu_tilde);
    if (pos > 0.0) moment += problem.base_probs[i] * std::pow(pos, at);
  }
  if (moment <= 0.0) return mu_tilde;
  return spec.c_alpha_delta() * std::pow(moment, 1.0 / at) + mu_tilde;
}

namespace {

double loss_scale(const DiscreteLossProblem& prob) {
  const double lo = *std::min_element(prob.losses.begin(), prob.losses.end());
  const double hi = *std::max_element(prob.losses.begin(), prob.losses.end());
  return std::max(1e-3, hi - lo + std::fabs(hi) + 1.0);
}

// Dual objective with the reverse-KL domain guard: outside the conjugate's
// domain the value is reported as a huge penalty so 1-D searches steer back.
double guarded_dual(const DiscreteLossProblem& prob, double lambda, double mu) {
  if (prob.generator.kind == FGenerator::Kind::ReverseKL) {
    const double max_loss =
        *std::max_element(prob.losses.begin(), prob.losses.end());
    const double s_max = (max_loss - mu) / lambda;
    if (s_max >= 1.0 - 1e-15) return 1e300 * (1.0 + s_max);
  }
  return dual_objective(prob, lambda, mu);
}

double min_over_mu(const DiscreteLossProblem& prob, double lambda,
                   double* mu_out) {
  const double lo0 = *std::min_element(prob.losses.begin(), prob.losses.end());
  const double hi0 = *std::max_element(prob.losses.begin(), prob.losses.end());
  const double pad = 2.0 * (hi0 - lo0 + lambda + 1.0);
  double lo = lo0 - pad;
  double hi = hi0 + pad;
  if (prob.generator.kind == FGenerator::Kind::ReverseKL)
    lo = std::max(lo, hi0 - lambda * (1.0 - 1e-14));
  auto f = [&](double mu) { return guarded_dual(prob, lambda, mu); };
  const ScalarMin res = minimize_convex_1d(f, lo, hi, 1e-13);
  if (mu_out != nullptr) *mu_out = res.x;
  return res.value;
}

}  // namespace

DualCertificate minimize_dual(const DiscreteLossProblem& problem) {
  const double scale = loss_scale(problem);
  const double alpha = generator_alpha(problem.generator);

  if (problem.generator.kind == FGenerator::Kind::KL) {
    // After the inner minimization over mu the KL dual collapses to
    //   h(lambda) = lambda delta + lambda log E_{q_phi}[exp(dl/lambda)]
    auto h = [&](double u) {
      const double lambda = std::exp(u);
      Vec terms(problem.base_probs.size());
      for (int i = 0; i < problem.size(); ++i)
        terms[i] = std::log(problem.base_probs[i]) + problem.losses[i] / lambda;
      return lambda * problem.delta + lambda * logsumexp(terms);
    };
    const ScalarMin res = golden_section_min(h, std::log(1e-9 * scale),
                                             std::log(1e9 * scale), 1e-14, 400);
    const double lambda = std::exp(res.x);
    Vec terms(problem.base_probs.size());
    for (int i = 0; i < problem.size(); ++i)
      terms[i] = std::log(problem.base_probs[i]) + problem.losses[i] / lambda;
    const double mu = lambda * logsumexp(terms);
    return {lambda, mu, mu, res.value};
  }

  // Generic nested search: golden section over log(lambda) is valid because a
  // convex function is quasiconvex under the monotone reparameterization. The
  // bracket floor sits far below any interior optimum so that boundary cases
  // (lambda* -> 0, essential-supremum regime) are resolved to ~1e-11.
  auto outer = [&](double u) {
    return min_over_mu(problem, std::exp(u), nullptr);
  };
  const ScalarMin res = golden_section_min(outer, std::log(1e-11 * scale),
                                           std::log(1e7 * scale), 1e-14, 500);
  const double lambda = std::exp(res.x);
  double mu = 0.0;
  const double value = min_over_mu(problem, lambda, &mu);
  const double mu_tilde =
      alpha != 1.0 ? mu - lambda / (alpha - 1.0) : mu;
  return {lambda, mu, mu_tilde, value};
}

DualCertificate minimize_corollary(const AlphaDualSpec& spec,
                                   const DiscreteLossProblem& problem) {
  const double lo0 = *std::min_element(problem.losses.begin(), problem.losses.end());
  const double hi0 = *std::max_element(problem.losses.begin(), problem.losses.end());
  const double pad = 4.0 * (hi0 - lo0 + 1.0);
  auto f = [&](double mu_tilde) {
    return corollary_objective(spec, problem, mu_tilde);
  };
  const ScalarMin res =
      minimize_convex_1d(f, lo0 - pad, hi0 + 0.5 * pad, 1e-13);
  const LambdaStar ls = optimal_lambda(spec, problem, res.x);
  const double mu = ls.lambda > 0.0 ? res.x + ls.lambda / (spec.alpha - 1.0)
                                    : res.x;
  return {ls.lambda, mu, res.x, res.value};
}

PrimalSolution primal_bruteforce(const DiscreteLossProblem& problem,
                                 std::uint64_t seed, ExecMode mode) {
  const int m = problem.size();
  if (m > 6)
    throw std::invalid_argument("primal_bruteforce: oracle scale is m <= 6");

  PrimalCandidate best{objective_of(problem, problem.base_probs),
                       problem.base_probs};

  // Vertex pulls: all mass on one atom, backed off to feasibility.
  for (int i = 0; i < m; ++i) {
    Vec v(static_cast<std::size_t>(m), 0.0);
    v[i] = 1.0;
    const Vec w = pull_feasible(problem, problem.base_probs, v);
    keep_better(best, w, objective_of(problem, w));
  }

  if (m == 2) {
    // 1-D: the objective is monotone in w_0, so the maximum sits at the
    // feasibility boundary on the better side (or at the vertex if feasible).
    const int good = problem.losses[0] >= problem.losses[1] ? 0 : 1;
    Vec v(2, 0.0);
    v[good] = 1.0;
    const Vec w = pull_feasible(problem, problem.base_probs, v, 200);
    keep_better(best, w, objective_of(problem, w));
  }

  if (m == 3) {
    // Fine simplex grid, then compass polish against the curved boundary.
    const int n_grid = 1200;
    PrimalCandidate grid_best = best;
    Vec w(3);
    for (int i = 0; i <= n_grid; ++i) {
      w[0] = static_cast<double>(i) / n_grid;
      for (int j = 0; j <= n_grid - i; ++j) {
        w[1] = static_cast<double>(j) / n_grid;
        w[2] = 1.0 - w[0] - w[1];
        if (w[2] < 0.0) w[2] = 0.0;
        const double v = objective_of(problem, w);
        if (v > grid_best.value && feasible(problem, w))
          keep_better(grid_best, w, v);
      }
    }
    keep_better(best, grid_best.w, grid_best.value);
  }

  // Random restarts of projected-gradient ascent, deterministically seeded
  // per restart and folded in order so the result is mode-independent.
  const int n_restarts = 256;
  const Rng master(seed);
  auto partials = map_chunks<PrimalCandidate>(
      n_restarts, 16, mode,
      [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        PrimalCandidate chunk_best;
        for (std::int64_t r = begin; r < end; ++r) {
          Rng rng = master.fork(static_cast<std::uint64_t>(r));
          Vec start(static_cast<std::size_t>(m));
          double s = 0.0;
          for (auto& x : start) {
            x = -std::log(1.0 - rng.uniform());
            s += x;
          }
          for (auto& x : start) x /= s;
          const Vec w0 = pull_feasible(problem, problem.base_probs, start);
          const PrimalCandidate c = local_ascent(problem, w0);
          keep_better(chunk_best, c.w, c.value);
        }
        (void)chunk;
        return chunk_best;
      });
  for (const auto& part : partials)
    if (!part.w.empty()) keep_better(best, part.w, part.value);

  add_chi2_interior_candidate(problem, best);
  add_kl_interior_candidate(problem, best);
  best = compass_polish(problem, local_ascent(problem, best.w));
  best = directional_polish(problem, best, master.fork(0xD1F).seed());
  best = compass_polish(problem, best);
  return {best.value, best.w};
}

double duality_gap(const DiscreteLossProblem& problem, std::uint64_t seed,
                   ExecMode mode) {
  const DualCertificate dual = minimize_dual(problem);
  const PrimalSolution primal = primal_bruteforce(problem, seed, mode);
  return std::fabs(dual.dual_value - primal.value);
}

}  // namespace latentpriv
