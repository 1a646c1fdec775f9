#ifndef LATENTPRIV_DP_MECHANISMS_HPP
#define LATENTPRIV_DP_MECHANISMS_HPP

#include <cstdint>

#include "latentpriv/gaussian.hpp"
#include "latentpriv/parallel.hpp"

namespace latentpriv {

// Projected-mean release: average of n samples projected onto the l2 ball of
// radius tau, so a single-record swap moves the mean by at most 2 tau / n.
struct ProjectionMechanism {
  double tau = 1.0;
  int n = 1;
  int d = 1;

  ProjectionMechanism(double tau, int n, int d);
  double sensitivity() const { return 2.0 * tau / n; }
};

// (epsilon, delta) strictly inside (0,1), the range of the restated Gaussian
// mechanism theorem. Callers wanting epsilon >= 1 must use the Renyi path.
struct PrivacyBudget {
  double epsilon;
  double delta;

  PrivacyBudget(double epsilon, double delta);
};

enum class MechanismKind { ApproxDP, RenyiDP };

struct MechanismCalibration {
  double sigma = 0.0;
  MechanismKind kind = MechanismKind::ApproxDP;
  // inputs echoed
  double l2_sensitivity = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double renyi_alpha = 0.0;
  double renyi_delta = 0.0;
  // Renyi path only: the source text's literal noise variance 2 tau^2/(n^2 delta),
  // which omits the alpha factor of the standard Gaussian Renyi formula.
  double paper_literal_sigma2 = 0.0;
};

// x unchanged if ||x|| <= tau, else rescaled onto the ball surface.
Vec project_l2(const Vec& x, double tau);

// (2 tau / n) * k for k records differing.
double sensitivity_bound(const ProjectionMechanism& m, int k_differing);

// Minimal sigma = L sqrt(2 log(1.25/delta)) / epsilon permitted by the
// Gaussian mechanism theorem.
MechanismCalibration calibrate_approx_dp(double l2_sensitivity,
                                         const PrivacyBudget& budget);

// Noise scale for (alpha, delta)-Renyi DP at the worst-case shift 2 tau / n:
//   sigma^2 = alpha (2 tau/n)^2 / (2 delta)
// chosen so the order-alpha Renyi divergence equals delta exactly. The
// weaker literal value 2 tau^2/(n^2 delta) is reported alongside.
MechanismCalibration calibrate_renyi_dp(const ProjectionMechanism& m,
                                        double alpha, double delta_renyi);

struct AdditiveNoiseKl {
  // Exact KL( N(mu, Sigma1 + sigma^2 I) || N(mu, Sigma1) )
  //   = 1/2 sum_j [ sigma^2/v_j - log(1 + sigma^2/v_j) ]
  double exact = 0.0;
  // The source text's display (sigma^2/2) sum_j (1/v_j - 1), which replaces
  // log-determinants by variance sums and can go negative for v_j > 1.
  double paper_literal = 0.0;
};

AdditiveNoiseKl kl_of_additive_gaussian(const DiagonalGaussian& base,
                                        double sigma2);

// Whether a KL distortion budget b accommodates the calibrated DP noise, in
// both readings of the proposition. The verdicts can genuinely differ (e.g.
// unit variances zero out the literal sum); callers report both.
struct BudgetDecision {
  bool paper_literal_admits = false;
  bool exact_kl_admits = false;
  double paper_literal_lhs = 0.0;
  double exact_kl = 0.0;
  double sigma = 0.0;
  double budget_b = 0.0;
};

BudgetDecision budget_admits_dp(const DiagonalGaussian& base, double l2_sensitivity,
                                const PrivacyBudget& budget, double b);

// Empirical P[ |log Q(z~|zeta)/Q(z~|zeta')| > eps ] for the Gaussian mechanism
// at the worst-case shift ||zeta - zeta'|| = L, over n draws. The d-dimensional
// log-ratio depends on the draw only through its component along the shift, so
// the estimate is computed in that one dimension. Chunk-deterministic.
double likelihood_ratio_tail(double L, double sigma, double eps,
                             std::int64_t n, std::uint64_t seed,
                             ExecMode mode = ExecMode::Parallel);

}  // namespace latentpriv

#endif  // LATENTPRIV_DP_MECHANISMS_HPP
