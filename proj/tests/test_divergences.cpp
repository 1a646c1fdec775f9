#include <doctest.h>

#include <cmath>

#include "latentpriv/divergences.hpp"
#include "oracles.hpp"

using namespace latentpriv;

TEST_CASE("generator catalog basics") {
  const FGenerator kinds[] = {FGenerator::kl(), FGenerator::reverse_kl(),
                              FGenerator::chi_square(),
                              FGenerator::alpha_family(2.0),
                              FGenerator::alpha_family(1.5),
                              FGenerator::alpha_family(3.0)};
  for (const auto& gen : kinds) CHECK(f_eval(gen, 1.0) == doctest::Approx(0.0));

  CHECK(f_eval(FGenerator::chi_square(), 3.0) == doctest::Approx(2.0));
  CHECK(f_eval(FGenerator::alpha_family(2.0), 3.0) == doctest::Approx(2.0));

  // Alpha(2) reproduces ChiSquare pointwise
  for (double t = 0.0; t <= 5.0; t += 0.01)
    CHECK(std::fabs(f_eval(FGenerator::alpha_family(2.0), t) -
                    f_eval(FGenerator::chi_square(), t)) <= 1e-12);

  CHECK(f_eval(FGenerator::kl(), 0.0) == doctest::Approx(1.0));
  CHECK(f_eval(FGenerator::chi_square(), 0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(f_eval(FGenerator::reverse_kl(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(f_eval(FGenerator::kl(), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(FGenerator::alpha_family(1.0), std::invalid_argument);
  CHECK_THROWS_AS(FGenerator::alpha_family(0.0), std::invalid_argument);
}

TEST_CASE("generators are convex on a grid") {
  const FGenerator kinds[] = {FGenerator::kl(), FGenerator::reverse_kl(),
                              FGenerator::chi_square(),
                              FGenerator::alpha_family(1.5),
                              FGenerator::alpha_family(3.0)};
  const double h = 1e-4;
  for (const auto& gen : kinds)
    for (double t = 0.05; t <= 8.0; t += 0.05) {
      const double second =
          (f_eval(gen, t + h) - 2.0 * f_eval(gen, t) + f_eval(gen, t - h)) /
          (h * h);
      CHECK(second >= -1e-9);
    }
}

TEST_CASE("closed-form KL") {
  const DiagonalGaussian std1 = DiagonalGaussian::standard(1);
  CHECK(kl_gaussian(std1, std1) == doctest::Approx(0.0));

  const DiagonalGaussian p({1.0}, {1.0});
  CHECK(kl_gaussian(p, std1) == doctest::Approx(0.5).epsilon(1e-12));
  const auto mc1 = oracles::mc_kl(p, std1, 100000, 31);
  CHECK(std::fabs(0.5 - mc1.value) <= 3.0 * mc1.se);

  const DiagonalGaussian wide({0.0}, {2.0});
  const double expected = 0.5 * (-std::log(2.0) - 1.0 + 2.0);
  CHECK(kl_gaussian(wide, std1) == doctest::Approx(expected).epsilon(1e-12));
  const auto mc2 = oracles::mc_kl(wide, std1, 100000, 32);
  CHECK(std::fabs(expected - mc2.value) <= 3.0 * mc2.se);

  CHECK_THROWS_AS(kl_gaussian(std1, DiagonalGaussian::standard(2)),
                  std::invalid_argument);
}

TEST_CASE("same-covariance KL") {
  const DiagonalGaussian q({0.0, 0.0}, {1.0, 1.0});
  const DiagonalGaussian p({1.0, 1.0}, {1.0, 1.0});  // ||dmu||^2 = 2
  CHECK(kl_same_covariance(q, q) == doctest::Approx(0.0));
  CHECK(kl_same_covariance(p, q) == doctest::Approx(1.0).epsilon(1e-12));
  const auto mc = oracles::mc_kl(p, q, 100000, 33);
  CHECK(std::fabs(1.0 - mc.value) <= 3.0 * mc.se);

  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto pair = oracles::safe_random_pair(3, rng, /*equal_cov=*/true);
    CHECK(std::fabs(kl_same_covariance(pair.p, pair.q) -
                    kl_gaussian(pair.p, pair.q)) <= 1e-12);
  }
  CHECK_THROWS_AS(
      kl_same_covariance(DiagonalGaussian({0.0}, {1.0}),
                         DiagonalGaussian({0.0}, {1.0 + 1e-9})),
      std::invalid_argument);
}

TEST_CASE("chi-square closed form and divergence outcome") {
  const DiagonalGaussian std1 = DiagonalGaussian::standard(1);
  CHECK(chi2_gaussian(std1, std1) == doctest::Approx(0.0));

  // same covariance: 1/2 (e^{2s} - 1) with s = ||dmu||^2/2
  const DiagonalGaussian p({1.0}, {1.0});
  CHECK(chi2_gaussian(p, std1) ==
        doctest::Approx(0.5 * (std::exp(1.0) - 1.0)).epsilon(1e-10));
  const auto mc =
      f_divergence_mc(FGenerator::chi_square(), p, std1, 71, 1000000);
  CHECK(std::fabs(chi2_gaussian(p, std1) - mc.value) <= 3.0 * mc.std_error);

  // 2/1 - 1/0.4 < 0: integral diverges; reported as +inf, not an exception
  const DiagonalGaussian narrow({0.0}, {0.4});
  CHECK(std::isinf(chi2_gaussian(std1, narrow)));
  CHECK_THROWS_AS(chi2_gaussian(std1, DiagonalGaussian::standard(2)),
                  std::invalid_argument);
}

TEST_CASE("Monte-Carlo estimator vs closed forms on random pairs") {
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform() * 8.0);
    const auto pair = oracles::safe_random_pair(std::min(d, 8), rng);
    const auto kl_mc = f_divergence_mc(FGenerator::kl(), pair.p, pair.q,
                                       900 + trial, 100000);
    CHECK(std::fabs(kl_gaussian(pair.p, pair.q) - kl_mc.value) <=
          3.0 * kl_mc.std_error);
    const auto chi_mc = f_divergence_mc(FGenerator::chi_square(), pair.p,
                                        pair.q, 1900 + trial, 400000);
    CHECK(std::fabs(chi2_gaussian(pair.p, pair.q) - chi_mc.value) <=
          3.0 * chi_mc.std_error);
  }

  // identical distributions: estimate within 3 SE of zero for every kind
  const DiagonalGaussian g({0.2, -0.4}, {0.9, 1.3});
  for (const auto& gen : {FGenerator::kl(), FGenerator::reverse_kl(),
                          FGenerator::chi_square(), FGenerator::alpha_family(3.0)}) {
    const auto est = f_divergence_mc(gen, g, g, 55, 50000);
    CHECK(std::fabs(est.value) <= 3.0 * est.std_error + 1e-12);
  }
  CHECK_THROWS_AS(f_divergence_mc(FGenerator::kl(), g, g, 1, 50),
                  std::invalid_argument);
}

TEST_CASE("Renyi equal-covariance closed form") {
  const DiagonalGaussian q = DiagonalGaussian::standard(1);
  const DiagonalGaussian p({1.0}, {1.0});
  CHECK(renyi_gaussian_equal_cov(q, q, 2.0) == doctest::Approx(0.0));
  CHECK(renyi_gaussian_equal_cov(p, q, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  // quadrature oracle for the defining integral
  CHECK(oracles::renyi_quadrature_1d(p, q, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(renyi_gaussian_equal_cov(p, q, 3.0) > renyi_gaussian_equal_cov(p, q, 2.0));
  CHECK_THROWS_AS(renyi_gaussian_equal_cov(p, q, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(renyi_gaussian_equal_cov(p, q, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(
      renyi_gaussian_equal_cov(DiagonalGaussian({0.0}, {1.0}),
                               DiagonalGaussian({0.0}, {1.5}), 2.0),
      std::invalid_argument);

  // Monte-Carlo route agrees too
  const auto mc = renyi_equal_cov_mc(p, q, 2.0, 404, 200000);
  CHECK(std::fabs(mc.value - 1.0) <= 3.0 * mc.std_error);
}

TEST_CASE("divergence properties on random pairs") {
  Rng rng(909);
  for (int i = 0; i < 1000; ++i) {
    const auto pair = oracles::safe_random_pair(2, rng);
    CHECK(kl_gaussian(pair.p, pair.q) >= -1e-12);
    const double chi = chi2_gaussian(pair.p, pair.q);
    if (std::isfinite(chi)) CHECK(chi >= -1e-12);
    const auto eq = oracles::safe_random_pair(2, rng, /*equal_cov=*/true);
    CHECK(kl_same_covariance(eq.p, eq.q) >= -1e-12);
    CHECK(renyi_gaussian_equal_cov(eq.p, eq.q, 2.0) >= -1e-12);
  }
  const DiagonalGaussian g({0.1}, {1.1});
  CHECK(kl_gaussian(g, g) <= 1e-12);
  CHECK(chi2_gaussian(g, g) <= 1e-12);

  // KL asymmetry witness
  const DiagonalGaussian a({0.0}, {1.0});
  const DiagonalGaussian b({0.0}, {4.0});
  CHECK(std::fabs(kl_gaussian(a, b) - kl_gaussian(b, a)) > 0.1);
}

TEST_CASE("Monte-Carlo estimator is mode-independent bit for bit") {
  const DiagonalGaussian p({0.4, -0.3}, {1.0, 0.8});
  const DiagonalGaussian q({0.0, 0.0}, {1.1, 1.0});
  const auto serial =
      f_divergence_mc(FGenerator::kl(), p, q, 123, 300000, ExecMode::Serial);
  const auto parallel =
      f_divergence_mc(FGenerator::kl(), p, q, 123, 300000, ExecMode::Parallel);
  CHECK(serial.value == parallel.value);
  CHECK(serial.std_error == parallel.std_error);
}
