#include "latentpriv/dp_mechanisms.hpp"

#include <cmath>
#include <stdexcept>

namespace latentpriv {

ProjectionMechanism::ProjectionMechanism(double tau_in, int n_in, int d_in)
    : tau(tau_in), n(n_in), d(d_in) {
  if (!(tau > 0.0)) throw std::invalid_argument("ProjectionMechanism: tau must be > 0");
  if (n < 1) throw std::invalid_argument("ProjectionMechanism: n must be >= 1");
  if (d < 1) throw std::invalid_argument("ProjectionMechanism: d must be >= 1");
}

PrivacyBudget::PrivacyBudget(double eps, double del) : epsilon(eps), delta(del) {
  if (!(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0))
    throw std::invalid_argument(
        "PrivacyBudget: epsilon and delta must lie strictly inside (0,1)");
}

Vec project_l2(const Vec& x, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("project_l2: tau must be > 0");
  const double norm = l2_norm(x);
  if (norm <= tau) return x;
  Vec y = x;
  const double scale = tau / norm;
  for (auto& v : y) v *= scale;
  return y;
}

double sensitivity_bound(const ProjectionMechanism& m, int k_differing) {
  if (k_differing < 0 || k_differing > m.n)
    throw std::invalid_argument("sensitivity_bound: k must lie in [0, n]");
  return m.sensitivity() * k_differing;
}

MechanismCalibration calibrate_approx_dp(double l2_sensitivity,
                                         const PrivacyBudget& budget) {
  if (!(l2_sensitivity > 0.0))
    throw std::invalid_argument("calibrate_approx_dp: sensitivity must be > 0");
  MechanismCalibration cal;
  cal.kind = MechanismKind::ApproxDP;
  cal.l2_sensitivity = l2_sensitivity;
  cal.epsilon = budget.epsilon;
  cal.delta = budget.delta;
  cal.sigma = l2_sensitivity * std::sqrt(2.0 * std::log(1.25 / budget.delta)) /
              budget.epsilon;
  return cal;
}

MechanismCalibration calibrate_renyi_dp(const ProjectionMechanism& m,
                                        double alpha, double delta_renyi) {
  if (!(alpha > 1.0))
    throw std::invalid_argument("calibrate_renyi_dp: alpha must be > 1");
  if (!(delta_renyi > 0.0))
    throw std::invalid_argument("calibrate_renyi_dp: delta must be > 0");
  const double shift = m.sensitivity();
  MechanismCalibration cal;
  cal.kind = MechanismKind::RenyiDP;
  cal.l2_sensitivity = shift;
  cal.renyi_alpha = alpha;
  cal.renyi_delta = delta_renyi;
  // D_alpha(N(z,s^2 I) || N(z',s^2 I)) = alpha ||z-z'||^2 / (2 s^2), so this
  // sigma^2 makes the divergence at the worst-case shift equal delta exactly.
  cal.sigma = std::sqrt(alpha * shift * shift / (2.0 * delta_renyi));
  cal.paper_literal_sigma2 = 2.0 * m.tau * m.tau / (static_cast<double>(m.n) * m.n * delta_renyi);
  return cal;
}

AdditiveNoiseKl kl_of_additive_gaussian(const DiagonalGaussian& base,
                                        double sigma2) {
  if (sigma2 < 0.0)
    throw std::invalid_argument("kl_of_additive_gaussian: sigma2 must be >= 0");
  AdditiveNoiseKl out;
  for (double v : base.variance) {
    const double r = sigma2 / v;
    out.exact += 0.5 * (r - std::log1p(r));
    out.paper_literal += 0.5 * sigma2 * (1.0 / v - 1.0);
  }
  return out;
}

BudgetDecision budget_admits_dp(const DiagonalGaussian& base, double l2_sensitivity,
                                const PrivacyBudget& budget, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("budget_admits_dp: b must be > 0");
  const MechanismCalibration cal = calibrate_approx_dp(l2_sensitivity, budget);
  const double sigma2 = cal.sigma * cal.sigma;

  BudgetDecision out;
  out.sigma = cal.sigma;
  out.budget_b = b;

  // Literal proposition: L^2 log(1.25/delta)/eps^2 * sum_j (1/v_j - 1) <= b.
  double literal_sum = 0.0;
  for (double v : base.variance) literal_sum += 1.0 / v - 1.0;
  out.paper_literal_lhs = l2_sensitivity * l2_sensitivity *
                          std::log(1.25 / budget.delta) /
                          (budget.epsilon * budget.epsilon) * literal_sum;
  out.paper_literal_admits = out.paper_literal_lhs <= b;

  out.exact_kl = kl_of_additive_gaussian(base, sigma2).exact;
  out.exact_kl_admits = out.exact_kl <= b;
  return out;
}

double likelihood_ratio_tail(double L, double sigma, double eps,
                             std::int64_t n, std::uint64_t seed,
                             ExecMode mode) {
  if (!(L > 0.0 && sigma > 0.0 && eps > 0.0))
    throw std::invalid_argument("likelihood_ratio_tail: L, sigma, eps must be > 0");
  if (n < 1) throw std::invalid_argument("likelihood_ratio_tail: n must be >= 1");
  const Rng master(seed);
  // With z~ = zeta + sigma w, the log-ratio is L^2/(2 sigma^2) + (L/sigma) g
  // for g standard normal along the shift direction.
  const double mean_llr = L * L / (2.0 * sigma * sigma);
  const double sd_llr = L / sigma;
  auto partials = map_chunks<McPartial>(
      n, kDefaultChunk, mode,
      [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        Rng rng = master.fork(static_cast<std::uint64_t>(chunk));
        McPartial acc;
        for (std::int64_t i = begin; i < end; ++i) {
          const double llr = mean_llr + sd_llr * rng.normal();
          acc.add(std::fabs(llr) > eps ? 1.0 : 0.0);
        }
        return acc;
      });
  McAccum total;
  for (const auto& p : partials) total.fold(p);
  return total.mean();
}

}  // namespace latentpriv
