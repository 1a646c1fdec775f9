#include <doctest.h>

#include <cmath>

#include "latentpriv/divergences.hpp"
#include "latentpriv/dp_mechanisms.hpp"
#include "latentpriv/rng.hpp"
#include "oracles.hpp"

using namespace latentpriv;

TEST_CASE("l2 projection") {
  const Vec inside{0.3, 0.4};
  CHECK(project_l2(inside, 1.0) == inside);
  const Vec out = project_l2({3.0, 4.0}, 1.0);
  CHECK(out[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(project_l2(out, 1.0) == out);  // idempotent
  CHECK_THROWS_AS(project_l2(inside, 0.0), std::invalid_argument);

  // non-expansive on random pairs
  Rng rng(15);
  for (int i = 0; i < 10000; ++i) {
    Vec x(3), y(3);
    for (int j = 0; j < 3; ++j) {
      x[j] = 4.0 * rng.uniform() - 2.0;
      y[j] = 4.0 * rng.uniform() - 2.0;
    }
    const double before = l2_norm(sub(x, y));
    const double after = l2_norm(sub(project_l2(x, 1.0), project_l2(y, 1.0)));
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("sensitivity bound and empirical tightness") {
  const ProjectionMechanism mech(1.0, 10, 3);
  CHECK(sensitivity_bound(mech, 0) == doctest::Approx(0.0));
  CHECK(sensitivity_bound(mech, 1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(sensitivity_bound(mech, 10) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(sensitivity_bound(mech, 11), std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_bound(mech, -1), std::invalid_argument);

  // random single swaps never exceed 2 tau / n
  Rng rng(33);
  double empirical_max = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    Vec mean_a(3, 0.0), mean_b(3, 0.0);
    Vec swapped_in(3), swapped_out(3);
    for (int i = 0; i < mech.n; ++i) {
      Vec z(3);
      for (auto& v : z) v = 4.0 * rng.uniform() - 2.0;
      const Vec pz = project_l2(z, mech.tau);
      axpy(1.0 / mech.n, pz, mean_a);
      if (i == 0) {
        for (auto& v : swapped_in) v = 4.0 * rng.uniform() - 2.0;
        axpy(1.0 / mech.n, project_l2(swapped_in, mech.tau), mean_b);
      } else {
        axpy(1.0 / mech.n, pz, mean_b);
      }
    }
    const double shift = l2_norm(sub(mean_a, mean_b));
    empirical_max = std::max(empirical_max, shift);
    CHECK(shift <= sensitivity_bound(mech, 1) + 1e-12);
  }
  // antipodal boundary placement attains the bound
  Vec base(3, 0.0);
  base[0] = mech.tau;
  Vec anti = base;
  anti[0] = -mech.tau;
  Vec mean_a(3, 0.0), mean_b(3, 0.0);
  axpy(1.0 / mech.n, base, mean_a);
  axpy(1.0 / mech.n, anti, mean_b);
  CHECK(l2_norm(sub(mean_a, mean_b)) >= 0.95 * sensitivity_bound(mech, 1));
}

TEST_CASE("approximate-DP calibration") {
  const PrivacyBudget budget(0.5, 0.05);
  const MechanismCalibration cal = calibrate_approx_dp(1.0, budget);
  CHECK(cal.sigma == doctest::Approx(5.074544964718079).epsilon(1e-12));
  const MechanismCalibration twice = calibrate_approx_dp(2.0, budget);
  CHECK(twice.sigma == doctest::Approx(2.0 * cal.sigma).epsilon(1e-12));

  // projection route sigma^2 = 8 tau^2 log(1.25/delta) / (n^2 eps^2) equals
  // the L = 2 tau / n route
  const ProjectionMechanism mech(1.0, 10, 4);
  const double direct = 8.0 * mech.tau * mech.tau * std::log(1.25 / budget.delta) /
                        (static_cast<double>(mech.n) * mech.n * budget.epsilon *
                         budget.epsilon);
  const MechanismCalibration via_l = calibrate_approx_dp(mech.sensitivity(), budget);
  CHECK(std::fabs(direct - via_l.sigma * via_l.sigma) <= 1e-10);

  CHECK_THROWS_AS(PrivacyBudget(1.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(PrivacyBudget(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_approx_dp(0.0, budget), std::invalid_argument);

  // monotonicity: sigma strictly decreasing in eps and in delta
  CHECK(calibrate_approx_dp(1.0, PrivacyBudget(0.6, 0.05)).sigma < cal.sigma);
  CHECK(calibrate_approx_dp(1.0, PrivacyBudget(0.5, 0.06)).sigma < cal.sigma);
}

TEST_CASE("Renyi-DP calibration hits the divergence target exactly") {
  const ProjectionMechanism mech(1.0, 10, 4);
  const MechanismCalibration cal = calibrate_renyi_dp(mech, 2.0, 0.1);
  CHECK(cal.sigma * cal.sigma == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(cal.paper_literal_sigma2 == doctest::Approx(0.2).epsilon(1e-12));

  // worst-case shift 2 tau / n: D_alpha == delta_renyi
  const double shift = mech.sensitivity();
  const DiagonalGaussian a({shift}, {cal.sigma * cal.sigma});
  const DiagonalGaussian b({0.0}, {cal.sigma * cal.sigma});
  CHECK(std::fabs(renyi_gaussian_equal_cov(a, b, 2.0) - 0.1) <= 1e-10);

  CHECK_THROWS_AS(calibrate_renyi_dp(mech, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_renyi_dp(mech, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("additive-noise KL: exact form, literal form, oracle") {
  const DiagonalGaussian unit = DiagonalGaussian::standard(1);
  CHECK(kl_of_additive_gaussian(unit, 0.0).exact == doctest::Approx(0.0));

  const AdditiveNoiseKl kl = kl_of_additive_gaussian(unit, 1.0);
  CHECK(kl.exact == doctest::Approx(0.15342640972002735).epsilon(1e-12));
  CHECK(kl.paper_literal == doctest::Approx(0.0));  // unit variance zeroes it

  // matches the generic closed form
  const DiagonalGaussian base({0.3, -0.2}, {0.7, 1.9});
  const double s2 = 0.63;
  const DiagonalGaussian noised({0.3, -0.2}, {0.7 + s2, 1.9 + s2});
  CHECK(kl_of_additive_gaussian(base, s2).exact ==
        doctest::Approx(kl_gaussian(noised, base)).epsilon(1e-12));

  // Monte-Carlo oracle E_p[log p - log q]
  const DiagonalGaussian p({0.0}, {2.0});
  const auto mc = oracles::mc_kl(p, unit, 1000000, 617);
  CHECK(std::fabs(kl_of_additive_gaussian(unit, 1.0).exact - mc.value) <=
        3.0 * mc.se);
}

TEST_CASE("budget proposition is evaluated in both readings") {
  const PrivacyBudget budget(0.5, 0.05);
  const DiagonalGaussian unit4(Vec(4, 0.0), Vec(4, 1.0));

  const BudgetDecision huge = budget_admits_dp(unit4, 0.2, budget, 1e9);
  CHECK(huge.paper_literal_admits);
  CHECK(huge.exact_kl_admits);

  // unit variances: the literal sum vanishes, the exact KL does not
  const BudgetDecision unit_case = budget_admits_dp(unit4, 0.2, budget, 1.0);
  CHECK(unit_case.paper_literal_lhs == doctest::Approx(0.0));
  CHECK(unit_case.paper_literal_admits);
  CHECK(unit_case.exact_kl ==
        doctest::Approx(0.6439692732776925).epsilon(1e-10));
  CHECK(unit_case.exact_kl_admits);

  // verdicts genuinely differ once b drops below the exact KL
  const BudgetDecision split = budget_admits_dp(unit4, 0.2, budget, 0.5);
  CHECK(split.paper_literal_admits);
  CHECK(!split.exact_kl_admits);
  CHECK_THROWS_AS(budget_admits_dp(unit4, 0.2, budget, 0.0), std::invalid_argument);
}

TEST_CASE("empirical likelihood-ratio tail respects the budget") {
  const PrivacyBudget budget(0.5, 0.05);
  const double L = 0.2;
  const MechanismCalibration cal = calibrate_approx_dp(L, budget);
  const double tail = likelihood_ratio_tail(L, cal.sigma, budget.epsilon,
                                            1000000, 4242);
  CHECK(tail <= 1.5 * budget.delta);
  // serial and parallel agree exactly
  CHECK(likelihood_ratio_tail(L, cal.sigma, budget.epsilon, 200000, 9,
                              ExecMode::Serial) ==
        likelihood_ratio_tail(L, cal.sigma, budget.epsilon, 200000, 9,
                              ExecMode::Parallel));
}
