#include <doctest.h>

#include <cmath>

#include "latentpriv/mi_bounds.hpp"
#include "latentpriv/rng.hpp"
#include "latentpriv/scenario.hpp"
#include "oracles.hpp"

using namespace latentpriv;

namespace {

// Labeled draws from per-class mixtures.
LatentDataset sample_labeled(const Vec& class_weights,
                             const std::vector<GaussianMixture>& cls,
                             std::int64_t m, std::uint64_t seed) {
  Rng rng(seed);
  LatentDataset data;
  data.num_private_classes = static_cast<int>(cls.size());
  data.num_utility_classes = 1;
  for (std::int64_t i = 0; i < m; ++i) {
    const double u = rng.uniform();
    double acc = 0.0;
    int y = static_cast<int>(cls.size()) - 1;
    for (std::size_t k = 0; k < class_weights.size(); ++k) {
      acc += class_weights[k];
      if (u < acc) {
        y = static_cast<int>(k);
        break;
      }
    }
    data.points.push_back(cls[y].sample(rng));
    data.private_labels.push_back(y);
    data.utility_labels.push_back(0);
  }
  return data;
}

GaussianMixture single(const DiagonalGaussian& g) {
  return GaussianMixture({1.0}, {g});
}

}  // namespace

TEST_CASE("class-conditional moment fits") {
  // two well-separated classes; fitted means land within 3 SE of truth
  const std::vector<GaussianMixture> cls{single(DiagonalGaussian({-2.0}, {1.0})),
                                         single(DiagonalGaussian({2.0}, {1.0}))};
  const LatentDataset data = sample_labeled({0.5, 0.5}, cls, 10000, 21);
  const ClassConditionalModel model = fit_class_conditionals(data);
  for (int y = 0; y < 2; ++y) {
    const double n_y = model.class_weights[y] * static_cast<double>(data.size());
    const double se = 1.0 / std::sqrt(n_y);
    CHECK(std::fabs(model.conditionals[y].mean[0] - (y == 0 ? -2.0 : 2.0)) <=
          3.0 * se);
  }

  // single-class data degenerates to a marginal fit
  LatentDataset one = data;
  one.num_private_classes = 1;
  for (auto& y : one.private_labels) y = 0;
  const ClassConditionalModel marginal = fit_class_conditionals(one);
  CHECK(marginal.num_classes() == 1);
  CHECK(marginal.class_weights[0] == doctest::Approx(1.0));

  // constant coordinate engages the variance floor
  LatentDataset flat;
  flat.num_private_classes = 1;
  flat.num_utility_classes = 1;
  for (int i = 0; i < 5; ++i) {
    flat.points.push_back({3.0});
    flat.private_labels.push_back(0);
    flat.utility_labels.push_back(0);
  }
  const ClassConditionalModel fm = fit_class_conditionals(flat);
  CHECK(fm.conditionals[0].variance[0] == doctest::Approx(1e-6));

  // a class with fewer than two samples is rejected
  LatentDataset tiny;
  tiny.num_private_classes = 2;
  tiny.num_utility_classes = 1;
  tiny.points = {{0.0}, {1.0}, {2.0}};
  tiny.private_labels = {0, 0, 1};
  tiny.utility_labels = {0, 0, 0};
  CHECK_THROWS_AS(fit_class_conditionals(tiny), std::invalid_argument);
}

TEST_CASE("label entropy is exact") {
  const std::vector<int> labels{0, 0, 1, 2, 1, 0, 2, 2, 2, 1};
  Vec freq(3, 0.0);
  for (int y : labels) freq[y] += 0.1;
  double expected = 0.0;
  for (double p : freq) expected -= p * std::log(p);
  CHECK(label_entropy(labels, 3) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(label_entropy({0, 1}, 2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("lower bound behaves on separated and uninformative mixtures") {
  // means +-5: true MI ~ log 2; the bound should capture most of it
  const std::vector<GaussianMixture> cls{single(DiagonalGaussian({-5.0}, {1.0})),
                                         single(DiagonalGaussian({5.0}, {1.0}))};
  const LatentDataset data = sample_labeled({0.5, 0.5}, cls, 100000, 5);
  const ClassConditionalModel model = fit_class_conditionals(data);
  const GaussianMixture marginal(
      {0.5, 0.5}, {cls[0].components[0], cls[1].components[0]});
  const MIEstimate est = mi_lower_bound(data, model, &marginal);
  CHECK(est.hz_method == EntropyMethod::Quadrature);
  CHECK(est.value >= 0.64);

  const double true_mi = oracles::true_mixture_mi({0.5, 0.5}, cls);
  CHECK(est.value <= true_mi + 3.0 * est.std_error);

  // identical class conditionals carry no information
  const std::vector<GaussianMixture> flat{single(DiagonalGaussian({0.0}, {1.0})),
                                          single(DiagonalGaussian({0.0}, {1.0}))};
  const LatentDataset noise = sample_labeled({0.5, 0.5}, flat, 20000, 8);
  const ClassConditionalModel nm = fit_class_conditionals(noise);
  const MIEstimate zero = mi_lower_bound(noise, nm, nullptr);
  CHECK(zero.hz_method == EntropyMethod::McPlugin);
  CHECK(zero.value <= 0.0 + 3.0 * zero.std_error);
}

TEST_CASE("lower bound stays below quadrature truth on 1-D and 2-D mixtures") {
  // 1-D, moderate separation
  {
    const std::vector<GaussianMixture> cls{
        single(DiagonalGaussian({-1.2}, {0.8})),
        single(DiagonalGaussian({1.0}, {1.3}))};
    const LatentDataset data = sample_labeled({0.4, 0.6}, cls, 60000, 99);
    const ClassConditionalModel model = fit_class_conditionals(data);
    const MIEstimate est = mi_lower_bound(data, model, nullptr);
    const double true_mi = oracles::true_mixture_mi({0.4, 0.6}, cls);
    CHECK(est.value <= true_mi + 3.0 * est.std_error);
  }
  // 2-D, one class itself a mixture (so the Gaussian fit is strictly inside)
  {
    const GaussianMixture c0({0.5, 0.5},
                             {DiagonalGaussian({-1.0, 0.5}, {1.0, 0.7}),
                              DiagonalGaussian({-2.0, -0.5}, {0.6, 1.1})});
    const GaussianMixture c1({1.0}, {DiagonalGaussian({1.5, 0.0}, {1.2, 0.9})});
    const LatentDataset data = sample_labeled({0.5, 0.5}, {c0, c1}, 60000, 77);
    const ClassConditionalModel model = fit_class_conditionals(data);
    const MIEstimate est = mi_lower_bound(data, model, nullptr);
    const double true_mi = oracles::true_mixture_mi({0.5, 0.5}, {c0, c1});
    CHECK(est.value <= true_mi + 3.0 * est.std_error);
  }
}

TEST_CASE("upper bound: analytic expectation of the minimal legal case") {
  // A_eps = s I, A_y = 0, z ~ N(0, I), marginal N(0, (1+s^2) I):
  // E[KL] = d/2 log((1+s^2)/s^2)
  const int d = 3;
  const double s = 1.7;
  const std::vector<GaussianMixture> cls{single(DiagonalGaussian::standard(d))};
  const LatentDataset data = sample_labeled({1.0}, cls, 50000, 13);
  FilterParameters filter(d, 1);
  for (int j = 0; j < d; ++j) filter.a_eps(j, j) = s;
  const DiagonalGaussian marginal(Vec(d, 0.0), Vec(d, 1.0 + s * s));
  const MIEstimate est = mi_upper_bound_privatized(data, filter, marginal);
  const double analytic = 0.5 * d * std::log((1.0 + s * s) / (s * s));
  CHECK(std::fabs(est.value - analytic) <= 3.0 * est.std_error);
}

TEST_CASE("upper bound is nonnegative-valid and dominates the lower bound under heavy noise") {
  // label-independent latents: true I(z~;y) = 0 and the bound stays >= 0
  const std::vector<GaussianMixture> flat{single(DiagonalGaussian({0.0}, {1.0})),
                                          single(DiagonalGaussian({0.0}, {1.0}))};
  const LatentDataset noise = sample_labeled({0.5, 0.5}, flat, 5000, 3);
  FilterParameters id_filter(1, 2);
  id_filter.a_eps(0, 0) = 1.0;
  const DiagonalGaussian marg({0.0}, {2.0});
  CHECK(mi_upper_bound_privatized(noise, id_filter, marg).value >= 0.0);

  // separated two-class mixture with strong noise: upper < lower
  const std::vector<GaussianMixture> cls{single(DiagonalGaussian({-2.0}, {1.0})),
                                         single(DiagonalGaussian({2.0}, {1.0}))};
  const LatentDataset data = sample_labeled({0.5, 0.5}, cls, 40000, 23);
  const ClassConditionalModel model = fit_class_conditionals(data);
  const GaussianMixture marginal(
      {0.5, 0.5}, {cls[0].components[0], cls[1].components[0]});
  const MIEstimate lower = mi_lower_bound(data, model, &marginal);

  FilterParameters heavy(1, 2);
  heavy.a_eps(0, 0) = 5.0;
  Rng priv_rng(7);
  const LatentDataset priv = privatize_dataset(data, heavy, priv_rng);
  const DiagonalGaussian fitted = fit_moments(priv.points);
  const MIEstimate upper = mi_upper_bound_privatized(data, heavy, fitted);
  CHECK(upper.value < lower.value);
}

TEST_CASE("upper bound degrades monotonically with the noise scale") {
  const std::vector<GaussianMixture> cls{single(DiagonalGaussian({-2.0}, {1.0})),
                                         single(DiagonalGaussian({2.0}, {1.0}))};
  const LatentDataset data = sample_labeled({0.5, 0.5}, cls, 20000, 31);
  double prev = 1e300;
  double prev_se = 0.0;
  for (double scale : {1.0, 2.0, 3.0, 4.0, 5.0}) {
    FilterParameters f(1, 2);
    f.a_eps(0, 0) = scale;
    Rng priv_rng(100 + static_cast<std::uint64_t>(scale));
    const LatentDataset priv = privatize_dataset(data, f, priv_rng);
    const MIEstimate est =
        mi_upper_bound_privatized(data, f, fit_moments(priv.points));
    CHECK(est.value <= prev + 3.0 * (est.std_error + prev_se));
    prev = est.value;
    prev_se = est.std_error;
  }
}

TEST_CASE("diagonal conditional-covariance approximation quantified at d=2") {
  // exact KL with the full 2x2 noise covariance, via the general formula
  const int d = 2;
  FilterParameters f(d, 1);
  f.a_eps(0, 0) = 1.0;
  f.a_eps(0, 1) = 0.6;
  f.a_eps(1, 0) = 0.0;
  f.a_eps(1, 1) = 0.8;
  // Sigma = A_eps A_eps^T
  const double s00 = 1.0 * 1.0 + 0.6 * 0.6;
  const double s01 = 0.6 * 0.8;
  const double s11 = 0.64;
  const DiagonalGaussian marginal({0.0, 0.0}, {2.0, 1.8});

  const std::vector<GaussianMixture> cls{single(DiagonalGaussian::standard(d))};
  const LatentDataset data = sample_labeled({1.0}, cls, 4000, 41);
  const MIEstimate diag_est = mi_upper_bound_privatized(data, f, marginal);

  // full-covariance KL( N(m, S) || N(m2, D) ) averaged over the same points
  double full = 0.0;
  const double det_s = s00 * s11 - s01 * s01;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double m0 = data.points[i][0];
    const double m1 = data.points[i][1];
    const double trace = s00 / 2.0 + s11 / 1.8;
    const double quad = m0 * m0 / 2.0 + m1 * m1 / 1.8;
    const double logdet = std::log(2.0 * 1.8) - std::log(det_s);
    full += 0.5 * (logdet - d + trace + quad);
  }
  full /= static_cast<double>(data.size());
  CHECK(std::fabs(diag_est.value - full) <= 0.2);

  // with a diagonal A_eps the approximation is exact
  FilterParameters g(d, 1);
  g.a_eps(0, 0) = 1.3;
  g.a_eps(1, 1) = 0.9;
  const MIEstimate diag_exact = mi_upper_bound_privatized(data, g, marginal);
  double direct = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const DiagonalGaussian cond(
        {data.points[i][0], data.points[i][1]},
        {1.3 * 1.3 + kConditionalJitter, 0.9 * 0.9 + kConditionalJitter});
    direct += kl_gaussian(cond, marginal);
  }
  direct /= static_cast<double>(data.size());
  CHECK(diag_exact.value == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("cross-entropy plug-in lower bound") {
  // exactly balanced binary labels and a uniform classifier: plugin = 0
  LatentDataset data;
  data.num_private_classes = 2;
  data.num_utility_classes = 1;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    data.points.push_back({rng.normal(), rng.normal()});
    data.private_labels.push_back(i % 2);
    data.utility_labels.push_back(0);
  }
  const MlpClassifier uniform = MlpClassifier::zeros(2, 4, 2);
  CHECK(mi_cross_entropy_plugin(data, uniform) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // trained classifier on +-5 separation approaches H(y) = log 2
  const std::vector<GaussianMixture> cls{single(DiagonalGaussian({-5.0}, {1.0})),
                                         single(DiagonalGaussian({5.0}, {1.0}))};
  const LatentDataset sep = sample_labeled({0.5, 0.5}, cls, 20000, 17);
  Rng init(11);
  MlpClassifier c = MlpClassifier::init(1, 15, 2, init);
  train_classifier(c, sep.points, sep.private_labels, 3000, 64, 0.05, init);
  const double plugin = mi_cross_entropy_plugin(sep, c);
  CHECK(plugin >= 0.67);
  const double true_mi = oracles::true_mixture_mi({0.5, 0.5}, cls);
  CHECK(plugin <= true_mi + 3.0 * 0.01);
}

TEST_CASE("quadrature entropies agree with Monte-Carlo plug-ins") {
  const GaussianMixture mix({0.35, 0.65},
                            {DiagonalGaussian({-1.0}, {0.6}),
                             DiagonalGaussian({1.4}, {1.5})});
  const double quad = mixture_entropy_quad_1d(mix);
  Rng rng(29);
  double sum = 0.0, sum_sq = 0.0;
  const std::int64_t n = 200000;
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = -mix.log_density(mix.sample(rng));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq - n * mean * mean) / (n - 1) / n);
  CHECK(std::fabs(quad - mean) <= 3.0 * se);
  // and against the independent trapezoid oracle
  CHECK(quad == doctest::Approx(oracles::mixture_entropy_trap_1d(mix)).epsilon(1e-9));

  const GaussianMixture mix2({0.5, 0.5},
                             {DiagonalGaussian({-1.0, 0.0}, {1.0, 0.8}),
                              DiagonalGaussian({1.0, 0.5}, {0.7, 1.2})});
  CHECK(mixture_entropy_quad_2d(mix2) ==
        doctest::Approx(oracles::mixture_entropy_trap_2d(mix2)).epsilon(1e-7));
}
