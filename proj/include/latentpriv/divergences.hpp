#ifndef LATENTPRIV_DIVERGENCES_HPP
#define LATENTPRIV_DIVERGENCES_HPP

#include <cstdint>
#include <string>

#include "latentpriv/gaussian.hpp"
#include "latentpriv/parallel.hpp"

namespace latentpriv {

// Generator function f of an f-divergence D_f(P||Q) = E_Q[f(p/q)].
//
// The alpha family f_a(t) = (t^a - a t + a - 1) / (a (a - 1)) is defined for
// a outside {0, 1}; KL and reverse KL are its extensions
//   a = 1:  f(t) = t log t - t + 1
//   a = 0:  f(t) = -log t + t - 1
// and ChiSquare f(t) = (t-1)^2 / 2 coincides with Alpha(2).
struct FGenerator {
  enum class Kind { KL, ReverseKL, ChiSquare, Alpha };
  Kind kind = Kind::KL;
  double alpha = 1.0;

  static FGenerator kl() { return {Kind::KL, 1.0}; }
  static FGenerator reverse_kl() { return {Kind::ReverseKL, 0.0}; }
  static FGenerator chi_square() { return {Kind::ChiSquare, 2.0}; }
  static FGenerator alpha_family(double a);

  std::string name() const;
};

// f(t) for t >= 0; throws for t < 0 and for t = 0 where the limit is infinite
// (reverse KL). KL extends continuously with f(0) = 1, ChiSquare with 1/2.
double f_eval(const FGenerator& gen, double t);

// Closed-form KL(p || q) between diagonal Gaussians:
//   1/2 [ sum log(v_q/v_p) - d + sum v_p/v_q + sum (m_p - m_q)^2 / v_q ]
double kl_gaussian(const DiagonalGaussian& p, const DiagonalGaussian& q);

// Same-covariance special case 1/2 ||m_p - m_q||^2_{Sigma^-1}. Requires the
// variance vectors to agree within 1e-12 per coordinate.
double kl_same_covariance(const DiagonalGaussian& p, const DiagonalGaussian& q);

// Chi-square divergence E_q[(p/q - 1)^2] / 2 = (int p^2/q - 1) / 2 via exact
// per-dimension Gaussian integrals. Returns +infinity when the integral
// diverges (2/v_p,j - 1/v_q,j <= 0 for some j); that outcome is probeable and
// distinct from the dimension-mismatch error.
double chi2_gaussian(const DiagonalGaussian& p, const DiagonalGaussian& q);

// Renyi divergence of order alpha between equal-covariance diagonal Gaussians:
//   D_alpha(p || q) = alpha/2 ||m_p - m_q||^2_{Sigma^-1}
double renyi_gaussian_equal_cov(const DiagonalGaussian& p,
                                const DiagonalGaussian& q, double alpha);

struct DivergenceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

// Monte-Carlo estimate of D_f(p||q): mean of f(exp(log p - log q)) over n
// draws from q, with standard error. Log-ratios are computed in log space and
// exponentiated once. Any non-finite f value aborts with NumericalError rather
// than biasing the mean. Chunk-deterministic: Serial and Parallel modes give
// bit-identical results for a given seed.
DivergenceEstimate f_divergence_mc(const FGenerator& gen,
                                   const DiagonalGaussian& p,
                                   const DiagonalGaussian& q,
                                   std::uint64_t seed, std::int64_t n,
                                   ExecMode mode = ExecMode::Parallel);

// Monte-Carlo Renyi divergence (1/(alpha-1)) log E_q[(p/q)^alpha] with a
// delta-method standard error, used as the oracle for the closed form above.
DivergenceEstimate renyi_equal_cov_mc(const DiagonalGaussian& p,
                                      const DiagonalGaussian& q, double alpha,
                                      std::uint64_t seed, std::int64_t n,
                                      ExecMode mode = ExecMode::Parallel);

}  // namespace latentpriv

#endif  // LATENTPRIV_DIVERGENCES_HPP
