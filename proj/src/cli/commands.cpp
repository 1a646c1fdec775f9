#include "latentpriv/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "latentpriv/attacks.hpp"
#include "latentpriv/checkpoint.hpp"
#include "latentpriv/csv.hpp"
#include "latentpriv/divergences.hpp"
#include "latentpriv/dp_mechanisms.hpp"
#include "latentpriv/dro_dual.hpp"
#include "latentpriv/errors.hpp"
#include "latentpriv/mi_bounds.hpp"
#include "latentpriv/optimize.hpp"
#include "latentpriv/scenario.hpp"

namespace latentpriv::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string cell(double v) { return std::isnan(v) ? "" : fmt_double(v); }

ScenarioSpec scenario_by_name(const std::string& name, std::int64_t m,
                              std::uint64_t seed) {
  if (name == "S1") return ScenarioSpec::s1(m, seed);
  throw std::invalid_argument("unknown scenario: " + name);
}

struct Split {
  LatentDataset train;
  LatentDataset eval;
};

// Deterministic 75/25 split; generation is already randomized.
Split split_dataset(const LatentDataset& data) {
  const std::size_t n_train = data.size() * 3 / 4;
  Split s;
  s.train.num_private_classes = s.eval.num_private_classes = data.num_private_classes;
  s.train.num_utility_classes = s.eval.num_utility_classes = data.num_utility_classes;
  for (std::size_t i = 0; i < data.size(); ++i) {
    LatentDataset& dst = i < n_train ? s.train : s.eval;
    dst.points.push_back(data.points[i]);
    dst.private_labels.push_back(data.private_labels[i]);
    dst.utility_labels.push_back(data.utility_labels[i]);
  }
  return s;
}

MlpClassifier fit_fresh_classifier(const std::vector<Vec>& xs,
                                   const std::vector<int>& ys, int classes,
                                   int steps, std::uint64_t seed) {
  Rng rng(seed);
  MlpClassifier c = MlpClassifier::init(static_cast<int>(xs.front().size()), 15,
                                        classes, rng);
  train_classifier(c, xs, ys, steps, 128, 0.05, rng);
  return c;
}

// sigma^2 of isotropic Gaussian noise whose exact additive-noise KL equals b.
double solve_baseline_sigma2(const Vec& base_variance, double b) {
  const DiagonalGaussian base(Vec(base_variance.size(), 0.0), base_variance);
  auto kl_of = [&](double s2) {
    return kl_of_additive_gaussian(base, s2).exact;
  };
  double hi = 1.0;
  while (kl_of(hi) < b && hi < 1e12) hi *= 2.0;
  return bisect_root([&](double s2) { return kl_of(s2) - b; }, 0.0, hi);
}

std::vector<Vec> add_isotropic_noise(const std::vector<Vec>& points,
                                     double sigma, Rng& rng) {
  std::vector<Vec> out = points;
  for (auto& p : out)
    for (auto& x : p) x += sigma * rng.normal();
  return out;
}

}  // namespace

std::uint64_t sub_seed(std::uint64_t master, const std::string& tag,
                       std::uint64_t index) {
  std::uint64_t state =
      master ^ fnv1a64(tag) ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  return detail::splitmix64(state);
}

DivergenceResult run_divergence(const DivergenceOptions& opt) {
  if (opt.pairs < 1 || opt.dim < 1 || opt.dim > 8)
    throw std::invalid_argument("divergence: pairs >= 1 and 1 <= dim <= 8 required");
  if (opt.n_mc < 1000) throw std::invalid_argument("divergence: n_mc >= 1000 required");
  if (!(opt.renyi_alpha > 0.0) || opt.renyi_alpha == 1.0)
    throw std::invalid_argument("divergence: renyi_alpha must be > 0 and != 1");

  std::ostringstream cfg;
  cfg << "divergence;seed=" << opt.common.seed << ";pairs=" << opt.pairs
      << ";dim=" << opt.dim << ";n_mc=" << opt.n_mc
      << ";renyi_alpha=" << fmt_double(opt.renyi_alpha);

  DivergenceResult result;
  result.csv_path = opt.common.out_dir + "/divergence.csv";
  CsvWriter csv(result.csv_path,
                {"pair", "kind", "dim", "closed_form", "mc_estimate",
                 "mc_std_error", "n_mc", "abs_diff", "within_3se"});

  const std::int64_t n_chi2 = std::min<std::int64_t>(1000000, 10 * opt.n_mc);
  for (int pair = 0; pair < opt.pairs; ++pair) {
    Rng rng(sub_seed(opt.common.seed, "divergence_pair", pair));
    Vec mp(opt.dim), mq(opt.dim), mr(opt.dim), vp(opt.dim), vq(opt.dim);
    for (int j = 0; j < opt.dim; ++j) {
      mp[j] = 2.0 * rng.uniform() - 1.0;
      mq[j] = mp[j] + 0.5 * (2.0 * rng.uniform() - 1.0);
      mr[j] = mq[j] + 0.3 * (2.0 * rng.uniform() - 1.0);
      vp[j] = 0.5 + rng.uniform();  // [0.5, 1.5]
      // Coupled to v_p so that E_q[(p/q)^4] stays finite: the chi-square and
      // Renyi estimators need the fourth moment for their standard errors to
      // mean anything (4/v_p - 3/v_q > 0, comfortably inside here).
      vq[j] = vp[j] * (0.95 + 0.55 * rng.uniform());
    }
    const DiagonalGaussian p(mp, vp), q(mq, vq);
    const DiagonalGaussian p_same(mp, vq);   // shares q's covariance
    const DiagonalGaussian p_renyi(mr, vq);  // small shift, equal covariance

    struct Item {
      std::string kind;
      double closed;
      DivergenceEstimate mc;
    };
    std::vector<Item> items;
    items.push_back({"kl", kl_gaussian(p, q),
                     f_divergence_mc(FGenerator::kl(), p, q,
                                     sub_seed(opt.common.seed, "div_mc_kl", pair),
                                     opt.n_mc)});
    items.push_back({"kl_same_cov", kl_same_covariance(p_same, q),
                     f_divergence_mc(FGenerator::kl(), p_same, q,
                                     sub_seed(opt.common.seed, "div_mc_same", pair),
                                     opt.n_mc)});
    items.push_back({"chi_square", chi2_gaussian(p, q),
                     f_divergence_mc(FGenerator::chi_square(), p, q,
                                     sub_seed(opt.common.seed, "div_mc_chi2", pair),
                                     n_chi2)});
    items.push_back(
        {"renyi", renyi_gaussian_equal_cov(p_renyi, q, opt.renyi_alpha),
         renyi_equal_cov_mc(p_renyi, q, opt.renyi_alpha,
                            sub_seed(opt.common.seed, "div_mc_renyi", pair),
                            opt.n_mc)});

    for (const auto& item : items) {
      DivergenceRow row;
      row.pair = pair;
      row.kind = item.kind;
      row.closed_form = item.closed;
      row.mc_estimate = item.mc.value;
      row.mc_std_error = item.mc.std_error;
      row.n_mc = item.mc.n_samples;
      row.within_3se =
          std::fabs(item.closed - item.mc.value) <= 3.0 * item.mc.std_error;
      result.rows.push_back(row);
      csv.add_row({std::to_string(pair), item.kind, std::to_string(opt.dim),
                   fmt_double(item.closed), fmt_double(item.mc.value),
                   fmt_double(item.mc.std_error), std::to_string(item.mc.n_samples),
                   fmt_double(std::fabs(item.closed - item.mc.value)),
                   row.within_3se ? "1" : "0"});
    }
  }
  csv.finish(opt.common.seed, hex64(fnv1a64(cfg.str())));
  return result;
}

namespace {

DiscreteLossProblem random_problem(const FGenerator& gen, double delta,
                                   int atoms, Rng& rng) {
  Vec probs(atoms);
  double s = 0.0;
  for (auto& p : probs) {
    p = 0.05 - std::log(1.0 - rng.uniform());
    s += p;
  }
  for (auto& p : probs) p /= s;
  Vec losses(atoms);
  for (auto& l : losses) l = 2.0 * rng.uniform() - 1.0;
  return DiscreteLossProblem(probs, losses, gen, delta);
}

FGenerator generator_by_name(const std::string& name, double alpha) {
  if (name == "alpha") return FGenerator::alpha_family(alpha);
  if (name == "kl") return FGenerator::kl();
  if (name == "chi2") return FGenerator::chi_square();
  if (name == "reverse_kl") return FGenerator::reverse_kl();
  throw std::invalid_argument("unknown generator: " + name);
}

}  // namespace

DualCheckResult run_dual_check(const DualCheckOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("dual-check: trials >= 1 required");
  if (opt.atoms < 2 || opt.atoms > 6)
    throw std::invalid_argument("dual-check: atoms must lie in [2, 6]");
  if (!(opt.delta > 0.0)) throw std::invalid_argument("dual-check: delta must be > 0");
  const FGenerator gen = generator_by_name(opt.generator, opt.alpha);
  const bool alpha_path =
      (gen.kind == FGenerator::Kind::Alpha && gen.alpha > 1.0) ||
      gen.kind == FGenerator::Kind::ChiSquare;
  const double alpha_eff =
      gen.kind == FGenerator::Kind::ChiSquare ? 2.0 : gen.alpha;

  std::ostringstream cfg;
  cfg << "dual_check;seed=" << opt.common.seed << ";alpha=" << fmt_double(opt.alpha)
      << ";delta=" << fmt_double(opt.delta) << ";atoms=" << opt.atoms
      << ";trials=" << opt.trials << ";generator=" << opt.generator;

  DualCheckResult result;
  result.csv_path = opt.common.out_dir + "/dual_check.csv";
  CsvWriter csv(result.csv_path,
                {"trial", "generator", "alpha", "delta", "atoms", "primal_value",
                 "dual_value", "gap", "lambda_star", "mu_tilde_star",
                 "corollary_min", "corollary_vs_dual"});

  for (int trial = 0; trial < opt.trials; ++trial) {
    Rng rng(sub_seed(opt.common.seed, "dual_check_problem", trial));
    const DiscreteLossProblem problem =
        random_problem(gen, opt.delta, opt.atoms, rng);
    const DualCertificate dual = minimize_dual(problem);
    const PrimalSolution primal = primal_bruteforce(
        problem, sub_seed(opt.common.seed, "dual_check_primal", trial));

    DualCheckRow row;
    row.trial = trial;
    row.primal_value = primal.value;
    row.dual_value = dual.dual_value;
    row.gap = std::fabs(dual.dual_value - primal.value);
    row.lambda_star = kNaN;
    row.mu_tilde_star = kNaN;
    row.corollary_min = kNaN;
    row.corollary_vs_dual = kNaN;
    if (alpha_path) {
      const AlphaDualSpec spec(alpha_eff, opt.delta);
      const DualCertificate cor = minimize_corollary(spec, problem);
      row.lambda_star = cor.lambda;
      row.mu_tilde_star = cor.mu_tilde;
      row.corollary_min = cor.dual_value;
      row.corollary_vs_dual = std::fabs(cor.dual_value - dual.dual_value);
    }
    result.rows.push_back(row);
    result.max_gap = std::max(result.max_gap, row.gap);
    csv.add_row({std::to_string(trial), opt.generator, fmt_double(alpha_eff),
                 fmt_double(opt.delta), std::to_string(opt.atoms),
                 fmt_double(row.primal_value), fmt_double(row.dual_value),
                 fmt_double(row.gap), cell(row.lambda_star),
                 cell(row.mu_tilde_star), cell(row.corollary_min),
                 cell(row.corollary_vs_dual)});
  }
  csv.finish(opt.common.seed, hex64(fnv1a64(cfg.str())));
  return result;
}

DpCalibrateResult run_dp_calibrate(const DpCalibrateOptions& opt) {
  std::ostringstream cfg;
  cfg << "dp_calibrate;seed=" << opt.common.seed
      << ";L=" << fmt_double(opt.l2_sensitivity) << ";eps=" << fmt_double(opt.epsilon)
      << ";delta=" << fmt_double(opt.delta) << ";tau=" << fmt_double(opt.tau)
      << ";n_records=" << opt.n_records
      << ";renyi_alpha=" << fmt_double(opt.renyi_alpha)
      << ";renyi_delta=" << fmt_double(opt.renyi_delta)
      << ";budget_b=" << fmt_double(opt.budget_b) << ";tail_n=" << opt.tail_n;

  const PrivacyBudget budget(opt.epsilon, opt.delta);
  double sensitivity = opt.l2_sensitivity;
  if (opt.tau > 0.0) {
    if (opt.n_records < 1)
      throw std::invalid_argument("dp-calibrate: projection route needs --n-records");
    sensitivity = ProjectionMechanism(opt.tau, opt.n_records, 1).sensitivity();
  }

  DpCalibrateResult result;
  result.csv_path = opt.common.out_dir + "/dp_calibrate.csv";
  CsvWriter csv(result.csv_path,
                {"kind", "L", "epsilon", "delta", "renyi_alpha", "renyi_delta",
                 "sigma", "sigma2", "paper_literal_sigma2", "tail_estimate",
                 "budget_b", "literal_lhs", "literal_admits", "exact_kl",
                 "exact_admits"});

  const MechanismCalibration approx = calibrate_approx_dp(sensitivity, budget);
  result.sigma = approx.sigma;

  double tail = kNaN;
  if (opt.tail_n > 0)
    tail = likelihood_ratio_tail(sensitivity, approx.sigma, opt.epsilon,
                                 opt.tail_n,
                                 sub_seed(opt.common.seed, "dp_tail", 0));

  double budget_b = kNaN, literal_lhs = kNaN, exact_kl = kNaN;
  std::string literal_admits, exact_admits;
  if (opt.budget_b > 0.0) {
    // baseline latent covariance for the proposition check: unit variances in
    // four dimensions unless the caller is driving the library directly
    const DiagonalGaussian base(Vec(4, 0.0), Vec(4, 1.0));
    const BudgetDecision dec =
        budget_admits_dp(base, sensitivity, budget, opt.budget_b);
    budget_b = opt.budget_b;
    literal_lhs = dec.paper_literal_lhs;
    exact_kl = dec.exact_kl;
    literal_admits = dec.paper_literal_admits ? "1" : "0";
    exact_admits = dec.exact_kl_admits ? "1" : "0";
    if (dec.paper_literal_admits != dec.exact_kl_admits)
      std::cerr << "warning: budget proposition verdicts differ "
                   "(literal sum formula vs exact KL); both are reported\n";
  }

  csv.add_row({"approx_dp", fmt_double(sensitivity), fmt_double(opt.epsilon),
               fmt_double(opt.delta), "", "", fmt_double(approx.sigma),
               fmt_double(approx.sigma * approx.sigma), "", cell(tail),
               cell(budget_b), cell(literal_lhs), literal_admits,
               cell(exact_kl), exact_admits});

  if (opt.renyi_alpha > 1.0) {
    if (!(opt.tau > 0.0) || opt.n_records < 1)
      throw std::invalid_argument(
          "dp-calibrate: the Renyi path needs --tau and --n-records");
    const ProjectionMechanism mech(opt.tau, opt.n_records, 1);
    const MechanismCalibration renyi =
        calibrate_renyi_dp(mech, opt.renyi_alpha, opt.renyi_delta);
    result.renyi_sigma = renyi.sigma;
    csv.add_row({"renyi_dp", fmt_double(mech.sensitivity()), "", "",
                 fmt_double(opt.renyi_alpha), fmt_double(opt.renyi_delta),
                 fmt_double(renyi.sigma), fmt_double(renyi.sigma * renyi.sigma),
                 fmt_double(renyi.paper_literal_sigma2), "", "", "", "", "", ""});
  }
  csv.finish(opt.common.seed, hex64(fnv1a64(cfg.str())));
  return result;
}

MiBoundsResult run_mi_bounds(const MiBoundsOptions& opt) {
  if (!(opt.noise > 0.0)) throw std::invalid_argument("mi-bounds: noise must be > 0");
  if (opt.m < 100) throw std::invalid_argument("mi-bounds: m must be >= 100");

  std::ostringstream cfg;
  cfg << "mi_bounds;seed=" << opt.common.seed << ";scenario=" << opt.scenario
      << ";m=" << opt.m << ";noise=" << fmt_double(opt.noise)
      << ";prior_marginal=" << (opt.prior_marginal ? 1 : 0)
      << ";plugin_steps=" << opt.plugin_steps;

  const ScenarioSpec spec = scenario_by_name(
      opt.scenario, opt.m, sub_seed(opt.common.seed, "mi_scenario", 0));
  const LatentDataset data = generate_scenario(spec);
  const GaussianMixture marginal_true = scenario_marginal(spec);

  const ClassConditionalModel model = fit_class_conditionals(data);
  const MIEstimate lower = mi_lower_bound(data, model, &marginal_true);

  // Heavy-noise filter: A_eps = noise * I, A_y = 0.
  FilterParameters filter(spec.d, spec.k_y);
  for (int j = 0; j < spec.d; ++j) filter.a_eps(j, j) = opt.noise;

  DiagonalGaussian marginal_model = DiagonalGaussian::standard(spec.d);
  if (!opt.prior_marginal) {
    Rng priv_rng(sub_seed(opt.common.seed, "mi_privatize", 0));
    const LatentDataset priv = privatize_dataset(data, filter, priv_rng);
    marginal_model = fit_moments(priv.points);
  }
  const MIEstimate upper = mi_upper_bound_privatized(data, filter, marginal_model);

  const Split split = split_dataset(data);
  const MlpClassifier plugin_cls = fit_fresh_classifier(
      split.train.points, split.train.private_labels, spec.k_y,
      opt.plugin_steps, sub_seed(opt.common.seed, "mi_plugin_cls", 0));
  const double plugin = mi_cross_entropy_plugin(split.eval, plugin_cls);
  const double hy = label_entropy(data.private_labels, spec.k_y);

  MiBoundsResult result;
  result.mi_lower = lower.value;
  result.mi_lower_se = lower.std_error;
  result.mi_upper = upper.value;
  result.mi_upper_se = upper.std_error;
  result.mi_ce_plugin = plugin;
  result.entropy_y = hy;
  result.csv_path = opt.common.out_dir + "/mi_bounds.csv";

  CsvWriter csv(result.csv_path,
                {"scenario", "m", "noise", "mi_lower", "mi_lower_se",
                 "hz_method", "mi_upper", "mi_upper_se", "marginal_model",
                 "mi_ce_plugin", "entropy_y"});
  csv.add_row({opt.scenario, std::to_string(opt.m), fmt_double(opt.noise),
               fmt_double(lower.value), fmt_double(lower.std_error),
               lower.hz_method == EntropyMethod::Quadrature ? "quadrature"
                                                            : "mc_plugin",
               fmt_double(upper.value), fmt_double(upper.std_error),
               opt.prior_marginal ? "prior" : "fitted", fmt_double(plugin),
               fmt_double(hy)});
  csv.finish(opt.common.seed, hex64(fnv1a64(cfg.str())));
  return result;
}

namespace {

std::string train_cfg_string(const TrainConfig& t) {
  std::ostringstream s;
  s << "beta=" << fmt_double(t.beta) << ";b=" << fmt_double(t.budget_b)
    << ";kappa=" << fmt_double(t.penalty_kappa)
    << ";lr_f=" << fmt_double(t.lr_filter) << ";lr_a=" << fmt_double(t.lr_adv)
    << ";lr_u=" << fmt_double(t.lr_util) << ";sa=" << t.steps_adv
    << ";su=" << t.steps_util << ";sf=" << t.steps_filter
    << ";rounds=" << t.rounds << ";batch=" << t.batch_size
    << ";hidden=" << t.hidden;
  return s.str();
}

}  // namespace

TrainCmdResult run_train(const TrainOptions& opt) {
  std::ostringstream cfg;
  cfg << "train;seed=" << opt.common.seed << ";scenario=" << opt.scenario
      << ";m=" << opt.m << ";" << train_cfg_string(opt.train);

  const ScenarioSpec spec = scenario_by_name(
      opt.scenario, opt.m, sub_seed(opt.common.seed, "train_scenario", 0));
  const LatentDataset data = generate_scenario(spec);

  TrainConfig tc = opt.train;
  tc.seed = sub_seed(opt.common.seed, "train_loop", 0);
  const TrainResult trained = train_privatizer(data, tc);

  TrainCmdResult result;
  result.final_distortion = distortion_estimate(
      trained.filter, data.points, data.private_labels, dataset_variance(data));
  result.csv_path = opt.common.out_dir + "/train_trace.csv";
  result.checkpoint_path = opt.common.out_dir + "/" + opt.checkpoint;

  CsvWriter csv(result.csv_path, {"round", "adv_ce", "util_ce", "distortion",
                                  "adv_acc", "util_acc", "violated"});
  for (const auto& rec : trained.trace)
    csv.add_row({std::to_string(rec.round), fmt_double(rec.adv_ce),
                 fmt_double(rec.util_ce), fmt_double(rec.distortion),
                 fmt_double(rec.adv_acc), fmt_double(rec.util_acc),
                 rec.constraint_violated ? "1" : "0"});
  csv.finish(opt.common.seed, hex64(fnv1a64(cfg.str())));

  save_checkpoint(result.checkpoint_path,
                  {tc, trained.filter, trained.adversary, trained.utility});
  return result;
}

SweepResult run_budget_sweep(const BudgetSweepOptions& opt) {
  if (opt.budgets.empty())
    throw std::invalid_argument("budget-sweep: budget list must be nonempty");

  std::ostringstream cfg;
  cfg << "budget_sweep;seed=" << opt.common.seed << ";scenario=" << opt.scenario
      << ";m=" << opt.m << ";eval_steps=" << opt.eval_train_steps << ";"
      << train_cfg_string(opt.train) << ";budgets=";
  for (double b : opt.budgets) cfg << fmt_double(b) << ",";

  const ScenarioSpec spec = scenario_by_name(
      opt.scenario, opt.m, sub_seed(opt.common.seed, "sweep_scenario", 0));
  const LatentDataset data = generate_scenario(spec);
  const Split split = split_dataset(data);
  const Vec base_var = dataset_variance(split.train);

  SweepResult result;
  result.csv_path = opt.common.out_dir + "/budget_sweep.csv";

  // Raw-latent reference accuracies.
  const MlpClassifier raw_adv = fit_fresh_classifier(
      split.train.points, split.train.private_labels, spec.k_y,
      opt.eval_train_steps, sub_seed(opt.common.seed, "sweep_raw_adv", 0));
  const MlpClassifier raw_util = fit_fresh_classifier(
      split.train.points, split.train.utility_labels, spec.k_u,
      opt.eval_train_steps, sub_seed(opt.common.seed, "sweep_raw_util", 0));
  result.raw_adv_acc =
      classifier_accuracy(raw_adv, split.eval.points, split.eval.private_labels);
  result.raw_util_acc =
      classifier_accuracy(raw_util, split.eval.points, split.eval.utility_labels);

  const GaussianMixture marginal_true = scenario_marginal(spec);
  const ClassConditionalModel cond_model = fit_class_conditionals(data);
  const MIEstimate mi_lower = mi_lower_bound(data, cond_model, &marginal_true);

  CsvWriter csv(result.csv_path,
                {"budget", "adv_acc", "util_acc", "distortion", "mi_lower_raw",
                 "mi_upper_priv", "mi_ce_plugin", "baseline_sigma2",
                 "baseline_adv_acc", "baseline_util_acc", "raw_adv_acc",
                 "raw_util_acc", "error"});

  for (std::size_t k = 0; k < opt.budgets.size(); ++k) {
    const double b = opt.budgets[k];
    SweepRow row;
    row.budget = b;
    row.mi_lower_raw = mi_lower.value;
    try {
      TrainConfig tc = opt.train;
      tc.budget_b = b;
      tc.seed = sub_seed(opt.common.seed, "sweep_train", k);
      const TrainResult trained = train_privatizer(split.train, tc);

      row.distortion =
          distortion_estimate(trained.filter, split.train.points,
                              split.train.private_labels, base_var);

      Rng priv_rng_train(sub_seed(opt.common.seed, "sweep_priv_train", k));
      Rng priv_rng_eval(sub_seed(opt.common.seed, "sweep_priv_eval", k));
      const LatentDataset priv_train =
          privatize_dataset(split.train, trained.filter, priv_rng_train);
      const LatentDataset priv_eval =
          privatize_dataset(split.eval, trained.filter, priv_rng_eval);

      const MlpClassifier adv = fit_fresh_classifier(
          priv_train.points, priv_train.private_labels, spec.k_y,
          opt.eval_train_steps, sub_seed(opt.common.seed, "sweep_adv", k));
      const MlpClassifier util = fit_fresh_classifier(
          priv_train.points, priv_train.utility_labels, spec.k_u,
          opt.eval_train_steps, sub_seed(opt.common.seed, "sweep_util", k));
      row.adv_acc = classifier_accuracy(adv, priv_eval.points,
                                        priv_eval.private_labels);
      row.util_acc = classifier_accuracy(util, priv_eval.points,
                                         priv_eval.utility_labels);

      const DiagonalGaussian priv_marginal = fit_moments(priv_train.points);
      row.mi_upper_priv =
          mi_upper_bound_privatized(split.train, trained.filter, priv_marginal)
              .value;
      row.mi_ce_plugin = mi_cross_entropy_plugin(priv_eval, adv);

      // Isotropic Gaussian mechanism at matched exact-KL distortion.
      row.baseline_sigma2 = solve_baseline_sigma2(base_var, b);
      const double bsigma = std::sqrt(row.baseline_sigma2);
      Rng noise_rng_train(sub_seed(opt.common.seed, "sweep_base_train", k));
      Rng noise_rng_eval(sub_seed(opt.common.seed, "sweep_base_eval", k));
      const std::vector<Vec> base_train =
          add_isotropic_noise(split.train.points, bsigma, noise_rng_train);
      const std::vector<Vec> base_eval =
          add_isotropic_noise(split.eval.points, bsigma, noise_rng_eval);
      const MlpClassifier base_adv = fit_fresh_classifier(
          base_train, split.train.private_labels, spec.k_y,
          opt.eval_train_steps, sub_seed(opt.common.seed, "sweep_base_adv", k));
      const MlpClassifier base_util = fit_fresh_classifier(
          base_train, split.train.utility_labels, spec.k_u,
          opt.eval_train_steps, sub_seed(opt.common.seed, "sweep_base_util", k));
      row.baseline_adv_acc =
          classifier_accuracy(base_adv, base_eval, split.eval.private_labels);
      row.baseline_util_acc =
          classifier_accuracy(base_util, base_eval, split.eval.utility_labels);
    } catch (const NumericalError& e) {
      row.error = e.what();
      row.adv_acc = row.util_acc = row.distortion = kNaN;
      row.mi_upper_priv = row.mi_ce_plugin = kNaN;
      row.baseline_sigma2 = row.baseline_adv_acc = row.baseline_util_acc = kNaN;
    }
    result.rows.push_back(row);
    csv.add_row({fmt_double(row.budget), cell(row.adv_acc), cell(row.util_acc),
                 cell(row.distortion), fmt_double(row.mi_lower_raw),
                 cell(row.mi_upper_priv), cell(row.mi_ce_plugin),
                 cell(row.baseline_sigma2), cell(row.baseline_adv_acc),
                 cell(row.baseline_util_acc), fmt_double(result.raw_adv_acc),
                 fmt_double(result.raw_util_acc), row.error});
  }
  csv.finish(opt.common.seed, hex64(fnv1a64(cfg.str())));
  return result;
}

AttackResult run_attack(const AttackOptions& opt) {
  AttackConfig acfg;
  acfg.epsilon = opt.epsilon;
  acfg.steps = opt.steps;
  acfg.step_size = opt.step_size;
  if (opt.norm == "l2") {
    acfg.norm = AttackNorm::L2;
  } else if (opt.norm == "linf") {
    acfg.norm = AttackNorm::Linf;
  } else {
    throw std::invalid_argument("attack: norm must be l2 or linf");
  }
  if (opt.method != "pgm" && opt.method != "fgsm")
    throw std::invalid_argument("attack: method must be pgm or fgsm");
  acfg.validate();

  std::ostringstream cfg;
  cfg << "attack;seed=" << opt.common.seed << ";scenario=" << opt.scenario
      << ";m=" << opt.m << ";method=" << opt.method << ";norm=" << opt.norm
      << ";eps=" << fmt_double(opt.epsilon) << ";steps=" << opt.steps
      << ";eta=" << fmt_double(opt.step_size)
      << ";victim_steps=" << opt.victim_steps;

  const ScenarioSpec spec = scenario_by_name(
      opt.scenario, opt.m, sub_seed(opt.common.seed, "attack_scenario", 0));
  const LatentDataset data = generate_scenario(spec);
  const Split split = split_dataset(data);

  const MlpClassifier victim = fit_fresh_classifier(
      split.train.points, split.train.private_labels, spec.k_y,
      opt.victim_steps, sub_seed(opt.common.seed, "attack_victim", 0));
  const double clean_acc = classifier_accuracy(victim, split.eval.points,
                                               split.eval.private_labels);

  std::vector<Vec> attacked(split.eval.size());
  if (opt.method == "pgm") {
    attacked = attack_batch(victim, split.eval.points,
                            split.eval.private_labels, acfg);
  } else {
    for (std::size_t i = 0; i < split.eval.size(); ++i)
      attacked[i] = fgsm(victim, split.eval.points[i],
                         split.eval.private_labels[i], acfg.epsilon);
  }

  double max_violation = 0.0;
  for (std::size_t i = 0; i < attacked.size(); ++i) {
    const Vec diff = sub(attacked[i], split.eval.points[i]);
    const double norm =
        acfg.norm == AttackNorm::L2 ? l2_norm(diff) : linf_norm(diff);
    max_violation = std::max(max_violation, norm - acfg.epsilon);
  }
  const double attacked_acc =
      classifier_accuracy(victim, attacked, split.eval.private_labels);

  AttackResult result;
  result.clean_acc = clean_acc;
  result.attacked_acc = attacked_acc;
  result.drop = clean_acc - attacked_acc;
  result.max_ball_violation = max_violation;
  result.csv_path = opt.common.out_dir + "/attack.csv";

  CsvWriter csv(result.csv_path,
                {"scenario", "method", "norm", "epsilon", "steps", "step_size",
                 "clean_acc", "attacked_acc", "drop", "max_ball_violation"});
  csv.add_row({opt.scenario, opt.method, opt.norm, fmt_double(opt.epsilon),
               std::to_string(opt.steps), fmt_double(opt.step_size),
               fmt_double(clean_acc), fmt_double(attacked_acc),
               fmt_double(result.drop), fmt_double(max_violation)});
  csv.finish(opt.common.seed, hex64(fnv1a64(cfg.str())));
  return result;
}

}  // namespace latentpriv::cli
