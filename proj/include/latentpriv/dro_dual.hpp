#ifndef LATENTPRIV_DRO_DUAL_HPP
#define LATENTPRIV_DRO_DUAL_HPP

#include <cmath>
#include <cstdint>

#include "latentpriv/divergences.hpp"
#include "latentpriv/linalg.hpp"
#include "latentpriv/parallel.hpp"

namespace latentpriv {

// Parameters of the alpha-family dual problem. Derived quantities are
// recomputed on demand, never stored.
struct AlphaDualSpec {
  double alpha = 2.0;
  double delta = 0.5;
  double beta = 0.0;

  AlphaDualSpec(double a, double d, double b = 0.0);

  // a~ = alpha / (alpha - 1); exceeds 1 for alpha > 1.
  double a_tilde() const { return alpha / (alpha - 1.0); }

  // c_{alpha,delta} = (alpha (alpha-1) delta + 1)^{-(1 - a~)/a~}
  double c_alpha_delta() const {
    const double at = a_tilde();
    return std::pow(alpha * (alpha - 1.0) * delta + 1.0, -(1.0 - at) / at);
  }
};

struct DualCertificate {
  double lambda = 0.0;
  double mu = 0.0;
  double mu_tilde = 0.0;  // mu - lambda/(alpha-1); equals mu when alpha has no role
  double dual_value = 0.0;
};

// Inner maximization restricted to a finite support: base probabilities q_phi
// over m atoms and per-atom combined losses dl_i = l_i - beta * l~_i.
struct DiscreteLossProblem {
  Vec base_probs;
  Vec losses;
  FGenerator generator;
  double delta = 0.0;

  DiscreteLossProblem(Vec probs, Vec losses, FGenerator gen, double delta);
  int size() const { return static_cast<int>(base_probs.size()); }
};

// Fenchel conjugates of the generator catalog.
//
// f*_alpha(s) = (1/alpha) [ (((alpha-1) s + 1)_+)^{alpha/(alpha-1)} - 1 ]
double conjugate_alpha(double alpha, double s);
// f*(s) = e^s - 1 for f(t) = t log t - t + 1
double conjugate_kl(double s);
// f*(s) = -log(1 - s), finite only for s < 1
double conjugate_reverse_kl(double s);
// Dispatch on generator kind (ChiSquare routes through conjugate_alpha(2)).
double conjugate(const FGenerator& gen, double s);

// Dual objective lambda E_{q_phi}[f*((dl - mu)/lambda)] + lambda delta + mu.
// Requires lambda > 0; jointly convex in (lambda, mu).
double dual_objective(const DiscreteLossProblem& problem, double lambda,
                      double mu);

struct LambdaStar {
  double lambda = 0.0;
  bool all_clipped = false;  // every (dl - mu~)_+ was zero
};

// Closed-form minimizer over lambda of the reparameterized dual at fixed mu~:
//   lambda* = (alpha(alpha-1)delta + 1)^{-1/a~} (alpha-1)
//             [E_{q_phi}(dl - mu~)_+^{a~}]^{1/a~}
// Valid for alpha > 1. Returns lambda = 0 with the all_clipped flag when the
// positive part vanishes everywhere.
LambdaStar optimal_lambda(const AlphaDualSpec& spec,
                          const DiscreteLossProblem& problem, double mu_tilde);

// Single-variable corollary form c_{alpha,delta} [E (dl - mu~)_+^{a~}]^{1/a~} + mu~.
double corollary_objective(const AlphaDualSpec& spec,
                           const DiscreteLossProblem& problem, double mu_tilde);

// Joint dual minimum over (lambda > 0, mu). KL uses the mu-reduced
// log-sum-exp form min_lambda lambda delta + lambda log E[exp(dl/lambda)];
// other generators use nested golden-section (outer log-lambda, inner mu).
DualCertificate minimize_dual(const DiscreteLossProblem& problem);

// Minimum of corollary_objective over mu~ (alpha > 1 path), reported as a
// certificate through lambda* and mu = mu~ + lambda*/(alpha-1).
DualCertificate minimize_corollary(const AlphaDualSpec& spec,
                                   const DiscreteLossProblem& problem);

struct PrimalSolution {
  double value = 0.0;
  Vec weights;  // reweighted measure w_i = p_i rho_i, a probability vector
};

// Brute-force primal oracle for m <= 6: maximizes sum_i w_i dl_i over
// probability vectors w with sum_i p_i f(w_i/p_i) <= delta, by projected
// gradient ascent from random restarts plus a fine simplex grid for m <= 3.
// Restarts run in parallel with deterministically derived per-restart seeds.
PrimalSolution primal_bruteforce(const DiscreteLossProblem& problem,
                                 std::uint64_t seed = 1234,
                                 ExecMode mode = ExecMode::Parallel);

// |dual minimum - primal maximum| on a small instance.
double duality_gap(const DiscreteLossProblem& problem,
                   std::uint64_t seed = 1234,
                   ExecMode mode = ExecMode::Parallel);

}  // namespace latentpriv

#endif  // LATENTPRIV_DRO_DUAL_HPP
