#include "latentpriv/divergences.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "latentpriv/errors.hpp"

namespace latentpriv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dim(const DiagonalGaussian& p, const DiagonalGaussian& q,
                      const char* where) {
  if (p.dim() != q.dim())
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

void require_equal_variance(const DiagonalGaussian& p,
                            const DiagonalGaussian& q, const char* where) {
  require_same_dim(p, q, where);
  for (int j = 0; j < p.dim(); ++j)
    if (std::fabs(p.variance[j] - q.variance[j]) > 1e-12)
      throw std::invalid_argument(std::string(where) +
                                  ": variance vectors differ beyond 1e-12");
}

}  // namespace

FGenerator FGenerator::alpha_family(double a) {
  if (a == 0.0 || a == 1.0)
    throw std::invalid_argument(
        "FGenerator::alpha_family: alpha in {0,1} is excluded from the raw "
        "formula; use kl() / reverse_kl()");
  return {Kind::Alpha, a};
}

std::string FGenerator::name() const {
  switch (kind) {
    case Kind::KL:
      return "kl";
    case Kind::ReverseKL:
      return "reverse_kl";
    case Kind::ChiSquare:
      return "chi_square";
    case Kind::Alpha:
      return "alpha(" + std::to_string(alpha) + ")";
  }
  return "?";
}

double f_eval(const FGenerator& gen, double t) {
  if (t < 0.0) throw std::invalid_argument("f_eval: t must be >= 0");
  switch (gen.kind) {
    case FGenerator::Kind::KL:
      // t log t - t + 1, continuous extension f(0) = 1
      if (t == 0.0) return 1.0;
      return t * std::log(t) - t + 1.0;
    case FGenerator::Kind::ReverseKL:
      if (t == 0.0)
        throw std::invalid_argument("f_eval: reverse KL has infinite limit at t=0");
      return -std::log(t) + t - 1.0;
    case FGenerator::Kind::ChiSquare:
      return 0.5 * (t - 1.0) * (t - 1.0);
    case FGenerator::Kind::Alpha: {
      const double a = gen.alpha;
      return (std::pow(t, a) - a * t + a - 1.0) / (a * (a - 1.0));
    }
  }
  throw std::invalid_argument("f_eval: unknown generator");
}

double kl_gaussian(const DiagonalGaussian& p, const DiagonalGaussian& q) {
  require_same_dim(p, q, "kl_gaussian");
  double s = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    const double vp = p.variance[j];
    const double vq = q.variance[j];
    const double dm = p.mean[j] - q.mean[j];
    s += std::log(vq / vp) - 1.0 + vp / vq + dm * dm / vq;
  }
  return 0.5 * s;
}

double kl_same_covariance(const DiagonalGaussian& p,
                          const DiagonalGaussian& q) {
  require_equal_variance(p, q, "kl_same_covariance");
  double s = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    const double dm = p.mean[j] - q.mean[j];
    s += dm * dm / q.variance[j];
  }
  return 0.5 * s;
}

double chi2_gaussian(const DiagonalGaussian& p, const DiagonalGaussian& q) {
  require_same_dim(p, q, "chi2_gaussian");
  // int p^2/q factorizes over dimensions; per dimension, with
  // a = 2/v_p - 1/v_q, b = 2 m_p/v_p - m_q/v_q, c = -m_p^2/v_p + m_q^2/(2 v_q):
  //   int p_j^2/q_j = sqrt(v_q) / (v_p sqrt(a)) * exp(b^2/(2a) + c)
  // and the integral diverges unless a > 0.
  double log_integral = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    const double vp = p.variance[j];
    const double vq = q.variance[j];
    const double mp = p.mean[j];
    const double mq = q.mean[j];
    const double a = 2.0 / vp - 1.0 / vq;
    if (!(a > 0.0)) return kInf;
    const double b = 2.0 * mp / vp - mq / vq;
    const double c = -mp * mp / vp + mq * mq / (2.0 * vq);
    log_integral += 0.5 * std::log(vq) - std::log(vp) - 0.5 * std::log(a) +
                    b * b / (2.0 * a) + c;
  }
  return 0.5 * std::expm1(log_integral);
}

double renyi_gaussian_equal_cov(const DiagonalGaussian& p,
                                const DiagonalGaussian& q, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw std::invalid_argument(
        "renyi_gaussian_equal_cov: requires alpha > 0, alpha != 1");
  require_equal_variance(p, q, "renyi_gaussian_equal_cov");
  double s = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    const double dm = p.mean[j] - q.mean[j];
    s += dm * dm / q.variance[j];
  }
  return 0.5 * alpha * s;
}

DivergenceEstimate f_divergence_mc(const FGenerator& gen,
                                   const DiagonalGaussian& p,
                                   const DiagonalGaussian& q,
                                   std::uint64_t seed, std::int64_t n,
                                   ExecMode mode) {
  require_same_dim(p, q, "f_divergence_mc");
  if (n < 100) throw std::invalid_argument("f_divergence_mc: n must be >= 100");
  const Rng master(seed);
  auto partials = map_chunks<McPartial>(
      n, kDefaultChunk, mode,
      [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        Rng rng = master.fork(static_cast<std::uint64_t>(chunk));
        McPartial acc;
        Vec x(static_cast<std::size_t>(q.dim()));
        for (std::int64_t i = begin; i < end; ++i) {
          for (int j = 0; j < q.dim(); ++j)
            x[static_cast<std::size_t>(j)] =
                q.mean[j] + std::sqrt(q.variance[j]) * rng.normal();
          const double log_ratio = p.log_density(x) - q.log_density(x);
          const double ratio = std::exp(log_ratio);
          double v;
          if (gen.kind == FGenerator::Kind::ReverseKL) {
            // f(t) = -log t + t - 1 evaluated from the log-ratio directly,
            // so underflowed ratios surface as non-finite rather than f(0).
            v = -log_ratio + ratio - 1.0;
          } else if (ratio == 0.0) {
            v = f_eval(gen, 0.0);
          } else {
            v = f_eval(gen, ratio);
          }
          if (!std::isfinite(v)) {
            ++acc.bad;
          } else {
            acc.add(v);
          }
        }
        return acc;
      });
  McAccum total;
  for (const auto& part : partials) total.fold(part);
  if (total.bad > 0)
    throw NumericalError("f_divergence_mc: " + std::to_string(total.bad) +
                         " non-finite ratio evaluations out of " +
                         std::to_string(n));
  return {total.mean(), total.std_error(), total.count};
}

DivergenceEstimate renyi_equal_cov_mc(const DiagonalGaussian& p,
                                      const DiagonalGaussian& q, double alpha,
                                      std::uint64_t seed, std::int64_t n,
                                      ExecMode mode) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw std::invalid_argument("renyi_equal_cov_mc: requires alpha > 0, alpha != 1");
  require_same_dim(p, q, "renyi_equal_cov_mc");
  if (n < 100) throw std::invalid_argument("renyi_equal_cov_mc: n must be >= 100");
  const Rng master(seed);
  auto partials = map_chunks<McPartial>(
      n, kDefaultChunk, mode,
      [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
        Rng rng = master.fork(static_cast<std::uint64_t>(chunk));
        McPartial acc;
        Vec x(static_cast<std::size_t>(q.dim()));
        for (std::int64_t i = begin; i < end; ++i) {
          for (int j = 0; j < q.dim(); ++j)
            x[static_cast<std::size_t>(j)] =
                q.mean[j] + std::sqrt(q.variance[j]) * rng.normal();
          const double v =
              std::exp(alpha * (p.log_density(x) - q.log_density(x)));
          if (!std::isfinite(v)) {
            ++acc.bad;
          } else {
            acc.add(v);
          }
        }
        return acc;
      });
  McAccum total;
  for (const auto& part : partials) total.fold(part);
  if (total.bad > 0)
    throw NumericalError("renyi_equal_cov_mc: non-finite ratio evaluations");
  const double m = total.mean();
  if (!(m > 0.0)) throw NumericalError("renyi_equal_cov_mc: non-positive mean");
  // Delta method: se(log m) ~= se(m) / m, then scale by 1/(alpha-1).
  const double value = std::log(m) / (alpha - 1.0);
  const double se = total.std_error() / m / std::fabs(alpha - 1.0);
  return {value, se, total.count};
}

}  // namespace latentpriv
