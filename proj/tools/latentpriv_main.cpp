// latentpriv command-line harness: synthetic scenario experiments, solver
// cross-checks, and CSV emission. Exit codes: 0 success, 2 validation error,
// 3 numerical failure.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "latentpriv/cli/commands.hpp"
#include "latentpriv/errors.hpp"
#include "latentpriv/version.hpp"

namespace {

using latentpriv::cli::AttackOptions;
using latentpriv::cli::BudgetSweepOptions;
using latentpriv::cli::CommonOptions;
using latentpriv::cli::DivergenceOptions;
using latentpriv::cli::DpCalibrateOptions;
using latentpriv::cli::DualCheckOptions;
using latentpriv::cli::MiBoundsOptions;
using latentpriv::cli::TrainOptions;

// Optional JSON config: a flat object of flag-name -> value defaults, applied
// before parsing so that command-line flags override the file.
nlohmann::json load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw std::invalid_argument(std::string("cannot open config file: ") + argv[i + 1]);
      nlohmann::json j;
      in >> j;
      if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
      return j;
    }
  return nlohmann::json::object();
}

template <typename T>
void cfg_get(const nlohmann::json& j, const std::string& key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_common(const nlohmann::json& j, CommonOptions& c) {
  cfg_get(j, "seed", c.seed);
  cfg_get(j, "out", c.out_dir);
}

void apply_train_cfg(const nlohmann::json& j, latentpriv::TrainConfig& t) {
  cfg_get(j, "beta", t.beta);
  cfg_get(j, "budget-b", t.budget_b);
  cfg_get(j, "kappa", t.penalty_kappa);
  cfg_get(j, "lr-filter", t.lr_filter);
  cfg_get(j, "lr-adv", t.lr_adv);
  cfg_get(j, "lr-util", t.lr_util);
  cfg_get(j, "steps-adv", t.steps_adv);
  cfg_get(j, "steps-util", t.steps_util);
  cfg_get(j, "steps-filter", t.steps_filter);
  cfg_get(j, "rounds", t.rounds);
  cfg_get(j, "batch-size", t.batch_size);
  cfg_get(j, "hidden", t.hidden);
}

void add_common_flags(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--seed", c.seed, "master RNG seed");
  cmd->add_option("--out", c.out_dir, "output directory");
}

void add_train_flags(CLI::App* cmd, latentpriv::TrainConfig& t) {
  cmd->add_option("--beta", t.beta, "utility loss weight");
  cmd->add_option("--budget-b", t.budget_b, "distortion budget (nats)");
  cmd->add_option("--kappa", t.penalty_kappa, "hinge penalty weight");
  cmd->add_option("--lr-filter", t.lr_filter, "filter learning rate");
  cmd->add_option("--lr-adv", t.lr_adv, "adversary learning rate");
  cmd->add_option("--lr-util", t.lr_util, "utility learning rate");
  cmd->add_option("--steps-adv", t.steps_adv, "adversary steps per round");
  cmd->add_option("--steps-util", t.steps_util, "utility steps per round");
  cmd->add_option("--steps-filter", t.steps_filter, "filter steps per round");
  cmd->add_option("--rounds", t.rounds, "training rounds");
  cmd->add_option("--batch-size", t.batch_size, "SGD batch size");
  cmd->add_option("--hidden", t.hidden, "classifier hidden width");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divergence-constrained latent privatization toolkit"};
  app.set_version_flag("--version", LATENTPRIV_VERSION);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file of flag defaults (flags override)");

  nlohmann::json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  DivergenceOptions div_opt;
  DualCheckOptions dual_opt;
  DpCalibrateOptions dp_opt;
  MiBoundsOptions mi_opt;
  TrainOptions train_opt;
  BudgetSweepOptions sweep_opt;
  AttackOptions attack_opt;

  apply_common(cfg, div_opt.common);
  apply_common(cfg, dual_opt.common);
  apply_common(cfg, dp_opt.common);
  apply_common(cfg, mi_opt.common);
  apply_common(cfg, train_opt.common);
  apply_common(cfg, sweep_opt.common);
  apply_common(cfg, attack_opt.common);
  apply_train_cfg(cfg, train_opt.train);
  apply_train_cfg(cfg, sweep_opt.train);

  CLI::App* divergence =
      app.add_subcommand("divergence", "closed forms vs Monte-Carlo oracles");
  add_common_flags(divergence, div_opt.common);
  cfg_get(cfg, "pairs", div_opt.pairs);
  cfg_get(cfg, "dim", div_opt.dim);
  cfg_get(cfg, "n-mc", div_opt.n_mc);
  cfg_get(cfg, "renyi-alpha", div_opt.renyi_alpha);
  divergence->add_option("--pairs", div_opt.pairs, "random Gaussian pairs");
  divergence->add_option("--dim", div_opt.dim, "latent dimension (<= 8)");
  divergence->add_option("--n-mc", div_opt.n_mc, "Monte-Carlo sample count");
  divergence->add_option("--renyi-alpha", div_opt.renyi_alpha, "Renyi order");

  CLI::App* dual = app.add_subcommand(
      "dual-check", "strong duality: brute-force primal vs conjugate dual");
  add_common_flags(dual, dual_opt.common);
  cfg_get(cfg, "alpha", dual_opt.alpha);
  cfg_get(cfg, "delta", dual_opt.delta);
  cfg_get(cfg, "atoms", dual_opt.atoms);
  cfg_get(cfg, "trials", dual_opt.trials);
  cfg_get(cfg, "generator", dual_opt.generator);
  dual->add_option("--alpha", dual_opt.alpha, "alpha of the divergence family");
  dual->add_option("--delta", dual_opt.delta, "divergence budget");
  dual->add_option("--atoms", dual_opt.atoms, "support size (2..6)");
  dual->add_option("--trials", dual_opt.trials, "random problems");
  dual->add_option("--generator", dual_opt.generator,
                   "alpha | kl | chi2 | reverse_kl");

  CLI::App* dp = app.add_subcommand("dp-calibrate",
                                    "Gaussian mechanism noise calibration");
  add_common_flags(dp, dp_opt.common);
  cfg_get(cfg, "L", dp_opt.l2_sensitivity);
  cfg_get(cfg, "eps", dp_opt.epsilon);
  cfg_get(cfg, "delta", dp_opt.delta);
  cfg_get(cfg, "tau", dp_opt.tau);
  cfg_get(cfg, "n-records", dp_opt.n_records);
  cfg_get(cfg, "renyi-alpha", dp_opt.renyi_alpha);
  cfg_get(cfg, "renyi-delta", dp_opt.renyi_delta);
  cfg_get(cfg, "budget-b", dp_opt.budget_b);
  cfg_get(cfg, "tail-n", dp_opt.tail_n);
  dp->add_option("--L", dp_opt.l2_sensitivity, "l2 sensitivity");
  dp->add_option("--eps", dp_opt.epsilon, "epsilon in (0,1)");
  dp->add_option("--delta", dp_opt.delta, "delta in (0,1)");
  dp->add_option("--tau", dp_opt.tau, "projection radius (enables 2 tau/n route)");
  dp->add_option("--n-records", dp_opt.n_records, "records averaged");
  dp->add_option("--renyi-alpha", dp_opt.renyi_alpha, "Renyi order (> 1)");
  dp->add_option("--renyi-delta", dp_opt.renyi_delta, "Renyi divergence budget");
  dp->add_option("--budget-b", dp_opt.budget_b, "KL distortion budget check");
  dp->add_option("--tail-n", dp_opt.tail_n, "empirical tail sample count");

  CLI::App* mi = app.add_subcommand("mi-bounds",
                                    "variational MI bounds on a scenario");
  add_common_flags(mi, mi_opt.common);
  cfg_get(cfg, "scenario", mi_opt.scenario);
  cfg_get(cfg, "m", mi_opt.m);
  cfg_get(cfg, "noise", mi_opt.noise);
  cfg_get(cfg, "prior-marginal", mi_opt.prior_marginal);
  cfg_get(cfg, "plugin-steps", mi_opt.plugin_steps);
  mi->add_option("--scenario", mi_opt.scenario, "scenario name (S1)");
  mi->add_option("--m", mi_opt.m, "sample count");
  mi->add_option("--noise", mi_opt.noise, "A_eps = noise * I");
  mi->add_flag("--prior-marginal", mi_opt.prior_marginal,
               "use the N(0,I) prior for p(z~) instead of a moment fit");
  mi->add_option("--plugin-steps", mi_opt.plugin_steps,
                 "training steps for the plug-in classifier");

  CLI::App* train = app.add_subcommand("train", "adversarial filter training");
  add_common_flags(train, train_opt.common);
  cfg_get(cfg, "scenario", train_opt.scenario);
  cfg_get(cfg, "m", train_opt.m);
  cfg_get(cfg, "checkpoint", train_opt.checkpoint);
  train->add_option("--scenario", train_opt.scenario, "scenario name (S1)");
  train->add_option("--m", train_opt.m, "sample count");
  train->add_option("--checkpoint", train_opt.checkpoint,
                    "checkpoint filename (under --out)");
  add_train_flags(train, train_opt.train);

  CLI::App* sweep = app.add_subcommand(
      "budget-sweep", "accuracy/MI trends over distortion budgets");
  add_common_flags(sweep, sweep_opt.common);
  cfg_get(cfg, "scenario", sweep_opt.scenario);
  cfg_get(cfg, "m", sweep_opt.m);
  cfg_get(cfg, "budgets", sweep_opt.budgets);
  cfg_get(cfg, "eval-steps", sweep_opt.eval_train_steps);
  sweep->add_option("--scenario", sweep_opt.scenario, "scenario name (S1)");
  sweep->add_option("--m", sweep_opt.m, "sample count");
  sweep->add_option("--budgets", sweep_opt.budgets, "distortion budgets")
      ->delimiter(',');
  sweep->add_option("--eval-steps", sweep_opt.eval_train_steps,
                    "retraining steps for evaluation classifiers");
  add_train_flags(sweep, sweep_opt.train);

  CLI::App* attack =
      app.add_subcommand("attack", "FGSM/PGM attacks on a trained classifier");
  add_common_flags(attack, attack_opt.common);
  cfg_get(cfg, "scenario", attack_opt.scenario);
  cfg_get(cfg, "m", attack_opt.m);
  cfg_get(cfg, "method", attack_opt.method);
  cfg_get(cfg, "norm", attack_opt.norm);
  cfg_get(cfg, "eps", attack_opt.epsilon);
  cfg_get(cfg, "steps", attack_opt.steps);
  cfg_get(cfg, "step-size", attack_opt.step_size);
  cfg_get(cfg, "victim-steps", attack_opt.victim_steps);
  attack->add_option("--scenario", attack_opt.scenario, "scenario name (S1)");
  attack->add_option("--m", attack_opt.m, "sample count");
  attack->add_option("--method", attack_opt.method, "pgm | fgsm");
  attack->add_option("--norm", attack_opt.norm, "l2 | linf");
  attack->add_option("--eps", attack_opt.epsilon, "ball radius");
  attack->add_option("--steps", attack_opt.steps, "PGM iterations");
  attack->add_option("--step-size", attack_opt.step_size, "PGM step size");
  attack->add_option("--victim-steps", attack_opt.victim_steps,
                     "victim classifier training steps");

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (divergence->parsed()) {
      const auto r = latentpriv::cli::run_divergence(div_opt);
      std::cout << r.csv_path << "\n";
    } else if (dual->parsed()) {
      const auto r = latentpriv::cli::run_dual_check(dual_opt);
      std::cout << r.csv_path << " max_gap=" << r.max_gap << "\n";
    } else if (dp->parsed()) {
      const auto r = latentpriv::cli::run_dp_calibrate(dp_opt);
      std::cout << r.csv_path << " sigma=" << r.sigma << "\n";
    } else if (mi->parsed()) {
      const auto r = latentpriv::cli::run_mi_bounds(mi_opt);
      std::cout << r.csv_path << " lower=" << r.mi_lower
                << " upper=" << r.mi_upper << "\n";
    } else if (train->parsed()) {
      const auto r = latentpriv::cli::run_train(train_opt);
      std::cout << r.csv_path << " " << r.checkpoint_path
                << " distortion=" << r.final_distortion << "\n";
    } else if (sweep->parsed()) {
      const auto r = latentpriv::cli::run_budget_sweep(sweep_opt);
      std::cout << r.csv_path << "\n";
    } else if (attack->parsed()) {
      const auto r = latentpriv::cli::run_attack(attack_opt);
      std::cout << r.csv_path << " clean=" << r.clean_acc
                << " attacked=" << r.attacked_acc << "\n";
    }
  } catch (const latentpriv::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
