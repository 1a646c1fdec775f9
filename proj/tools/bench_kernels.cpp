// Times the OpenMP kernels against their serial reference paths and checks
// that both produce identical results (the chunked reductions are
// bit-deterministic by construction).

#include <chrono>
#include <cstdio>

#include "latentpriv/attacks.hpp"
#include "latentpriv/divergences.hpp"
#include "latentpriv/dp_mechanisms.hpp"
#include "latentpriv/dro_dual.hpp"
#include "latentpriv/mlp.hpp"
#include "latentpriv/scenario.hpp"

using namespace latentpriv;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename Fn>
double time_ms(Fn&& fn, int reps) {
  const double t0 = now_ms();
  for (int r = 0; r < reps; ++r) fn();
  return (now_ms() - t0) / reps;
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef LATENTPRIV_HAVE_OPENMP
  std::printf("OpenMP enabled\n");
#else
  std::printf("OpenMP not available; parallel mode falls back to serial\n");
#endif

  {
    const DiagonalGaussian p(Vec{0.4, -0.3, 0.2, 0.1}, Vec{1.0, 0.8, 1.2, 0.9});
    const DiagonalGaussian q(Vec{0.0, 0.0, 0.0, 0.0}, Vec{1.1, 1.0, 1.0, 1.3});
    DivergenceEstimate s, par;
    const double ts = time_ms(
        [&] { s = f_divergence_mc(FGenerator::kl(), p, q, 7, 2000000, ExecMode::Serial); },
        3);
    const double tp = time_ms(
        [&] { par = f_divergence_mc(FGenerator::kl(), p, q, 7, 2000000, ExecMode::Parallel); },
        3);
    report("f_divergence_mc (KL, 2e6)", ts, tp,
           s.value == par.value && s.std_error == par.std_error);
  }

  {
    double s = 0, par = 0;
    const double ts = time_ms(
        [&] { s = likelihood_ratio_tail(0.2, 1.0149, 0.5, 4000000, 11, ExecMode::Serial); },
        3);
    const double tp = time_ms(
        [&] { par = likelihood_ratio_tail(0.2, 1.0149, 0.5, 4000000, 11, ExecMode::Parallel); },
        3);
    report("likelihood_ratio_tail (4e6)", ts, tp, s == par);
  }

  {
    const ScenarioSpec spec = ScenarioSpec::s1(1024, 3);
    const LatentDataset data = generate_scenario(spec);
    Rng rng(5);
    MlpClassifier victim = MlpClassifier::init(spec.d, 15, spec.k_y, rng);
    train_classifier(victim, data.points, data.private_labels, 600, 128, 0.05, rng);
    AttackConfig cfg;
    cfg.epsilon = 1.0;
    cfg.steps = 10;
    cfg.step_size = 0.3;
    std::vector<Vec> s, par;
    const double ts = time_ms(
        [&] { s = attack_batch(victim, data.points, data.private_labels, cfg, ExecMode::Serial); },
        2);
    const double tp = time_ms(
        [&] { par = attack_batch(victim, data.points, data.private_labels, cfg, ExecMode::Parallel); },
        2);
    report("attack_batch (PGM, 1024)", ts, tp, s == par);
  }

  {
    Rng rng(17);
    Vec probs{0.3, 0.25, 0.2, 0.15, 0.1};
    Vec losses{-0.8, -0.2, 0.1, 0.5, 0.9};
    const DiscreteLossProblem prob(probs, losses, FGenerator::alpha_family(2.0), 0.4);
    PrimalSolution s, par;
    const double ts =
        time_ms([&] { s = primal_bruteforce(prob, 23, ExecMode::Serial); }, 2);
    const double tp =
        time_ms([&] { par = primal_bruteforce(prob, 23, ExecMode::Parallel); }, 2);
    report("primal_bruteforce (m=5)", ts, tp,
           s.value == par.value && s.weights == par.weights);
  }

  return 0;
}
