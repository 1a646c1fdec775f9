#ifndef LATENTPRIV_CLI_COMMANDS_HPP
#define LATENTPRIV_CLI_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "latentpriv/train.hpp"

namespace latentpriv::cli {

// Shared flags. Every subcommand writes one CSV under out_dir with a fixed
// column schema and a provenance footer; reruns with identical options are
// byte-identical.
struct CommonOptions {
  std::uint64_t seed = 42;
  std::string out_dir = ".";
};

struct DivergenceOptions {
  CommonOptions common;
  int pairs = 20;
  int dim = 4;
  std::int64_t n_mc = 100000;
  double renyi_alpha = 2.0;
};

struct DivergenceRow {
  int pair = 0;
  std::string kind;
  double closed_form = 0.0;
  double mc_estimate = 0.0;
  double mc_std_error = 0.0;
  std::int64_t n_mc = 0;
  bool within_3se = false;
};

struct DivergenceResult {
  std::vector<DivergenceRow> rows;
  std::string csv_path;
};

DivergenceResult run_divergence(const DivergenceOptions& opt);

struct DualCheckOptions {
  CommonOptions common;
  double alpha = 2.0;
  double delta = 0.5;
  int atoms = 3;
  int trials = 50;
  std::string generator = "alpha";  // alpha | kl | chi2 | reverse_kl
};

struct DualCheckRow {
  int trial = 0;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  // alpha > 1 path only (otherwise NaN and left empty in the CSV)
  double lambda_star = 0.0;
  double mu_tilde_star = 0.0;
  double corollary_min = 0.0;
  double corollary_vs_dual = 0.0;
};

struct DualCheckResult {
  std::vector<DualCheckRow> rows;
  double max_gap = 0.0;
  std::string csv_path;
};

DualCheckResult run_dual_check(const DualCheckOptions& opt);

struct DpCalibrateOptions {
  CommonOptions common;
  double l2_sensitivity = 1.0;  // used when tau <= 0
  double epsilon = 0.5;
  double delta = 0.05;
  double tau = 0.0;   // > 0 switches to the projection route L = 2 tau / n
  int n_records = 0;
  double renyi_alpha = 0.0;  // > 1 adds a Renyi calibration row
  double renyi_delta = 0.1;
  double budget_b = 0.0;     // > 0 evaluates the budget proposition
  std::int64_t tail_n = 0;   // > 0 adds the empirical likelihood-ratio tail
};

struct DpCalibrateResult {
  double sigma = 0.0;
  double renyi_sigma = 0.0;
  std::string csv_path;
};

DpCalibrateResult run_dp_calibrate(const DpCalibrateOptions& opt);

struct MiBoundsOptions {
  CommonOptions common;
  std::string scenario = "S1";
  std::int64_t m = 8000;
  double noise = 5.0;          // A_eps = noise * I, A_y = 0
  bool prior_marginal = false; // p(z~) = N(0, I) instead of a moment fit
  int plugin_steps = 2500;
};

struct MiBoundsResult {
  double mi_lower = 0.0;
  double mi_lower_se = 0.0;
  double mi_upper = 0.0;
  double mi_upper_se = 0.0;
  double mi_ce_plugin = 0.0;
  double entropy_y = 0.0;
  std::string csv_path;
};

MiBoundsResult run_mi_bounds(const MiBoundsOptions& opt);

struct TrainOptions {
  CommonOptions common;
  std::string scenario = "S1";
  std::int64_t m = 8000;
  TrainConfig train;
  std::string checkpoint = "checkpoint.json";  // relative to out_dir
};

struct TrainCmdResult {
  double final_distortion = 0.0;
  std::string csv_path;
  std::string checkpoint_path;
};

TrainCmdResult run_train(const TrainOptions& opt);

struct BudgetSweepOptions {
  CommonOptions common;
  std::string scenario = "S1";
  std::int64_t m = 8000;
  std::vector<double> budgets = {0.1, 0.5, 1.0, 2.0, 4.0};
  TrainConfig train;
  int eval_train_steps = 2500;  // fresh-classifier retraining per row
};

struct SweepRow {
  double budget = 0.0;
  double adv_acc = 0.0;
  double util_acc = 0.0;
  double distortion = 0.0;
  double mi_lower_raw = 0.0;
  double mi_upper_priv = 0.0;
  double mi_ce_plugin = 0.0;
  double baseline_sigma2 = 0.0;
  double baseline_adv_acc = 0.0;
  double baseline_util_acc = 0.0;
  std::string error;  // non-empty when training diverged for this row
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double raw_adv_acc = 0.0;
  double raw_util_acc = 0.0;
  std::string csv_path;
};

SweepResult run_budget_sweep(const BudgetSweepOptions& opt);

struct AttackOptions {
  CommonOptions common;
  std::string scenario = "S1";
  std::int64_t m = 8000;
  std::string method = "pgm";  // pgm | fgsm
  std::string norm = "l2";     // l2 | linf
  double epsilon = 1.0;
  int steps = 10;
  double step_size = 0.3;
  int victim_steps = 2500;
};

struct AttackResult {
  double clean_acc = 0.0;
  double attacked_acc = 0.0;
  double drop = 0.0;
  double max_ball_violation = 0.0;
  std::string csv_path;
};

AttackResult run_attack(const AttackOptions& opt);

// Deterministic sub-seed derivation: every piece of randomness in a
// subcommand flows from (--seed, a fixed tag, an index).
std::uint64_t sub_seed(std::uint64_t master, const std::string& tag,
                       std::uint64_t index);

}  // namespace latentpriv::cli

#endif  // LATENTPRIV_CLI_COMMANDS_HPP
