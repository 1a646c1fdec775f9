#ifndef LATENTPRIV_MI_BOUNDS_HPP
#define LATENTPRIV_MI_BOUNDS_HPP

#include <cstdint>

#include "latentpriv/dataset.hpp"
#include "latentpriv/filter.hpp"
#include "latentpriv/gaussian.hpp"
#include "latentpriv/mlp.hpp"

namespace latentpriv {

// Per-class diagonal Gaussians p(z|y) with class weights pi_y; the
// approximating distribution of the variational MI lower bound.
struct ClassConditionalModel {
  Vec class_weights;
  std::vector<DiagonalGaussian> conditionals;

  int num_classes() const { return static_cast<int>(conditionals.size()); }
  int dim() const { return conditionals.front().dim(); }
  GaussianMixture marginal() const {
    return GaussianMixture(class_weights, conditionals);
  }
};

// Per-class moment fit: empirical class frequencies, sample means and
// variances (variances floored at 1e-6). Every class needs >= 2 samples.
ClassConditionalModel fit_class_conditionals(const LatentDataset& data);

// Single diagonal Gaussian moment fit (used for the privatized marginal).
DiagonalGaussian fit_moments(const std::vector<Vec>& points);

// Entropy of the empirical label distribution, exact: -sum pi log pi.
double label_entropy(const std::vector<int>& labels, int num_classes);

enum class EntropyMethod { Quadrature, McPlugin };

struct MIEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  EntropyMethod hz_method = EntropyMethod::McPlugin;
  bool fitted_marginal = true;  // H(z) against fitted mixture vs true marginal
};

// Variational lower bound I_(z;y) = E_{q(z,y)}[log p(z|y)] + H(z), averaged
// over the dataset. H(z) uses quadrature when the true generating mixture is
// supplied and d <= 2, and the Monte-Carlo plug-in -mean log q(z_i) otherwise
// (against the true marginal when given, else the fitted mixture).
MIEstimate mi_lower_bound(const LatentDataset& data,
                          const ClassConditionalModel& model,
                          const GaussianMixture* true_marginal = nullptr);

// Variational upper bound on I(z~;y) for the linear filter, with the filter
// noise eps marginalized out: the conditional q(z~|z,y) is Gaussian with mean
// z + A_y onehot(y) and covariance approximated by diag(A_eps A_eps^T) plus a
// 1e-8 jitter, and the bound averages its closed-form KL to the marginal
// model over the dataset. Marginalizing eps keeps the bound finite where
// conditioning on eps would make the conditional a point mass.
MIEstimate mi_upper_bound_privatized(const LatentDataset& data,
                                     const FilterParameters& filter,
                                     const DiagonalGaussian& marginal_model);

// Cross-entropy plug-in lower bound I >= H(y) - CE(classifier). May be
// negative for a bad classifier; still a valid lower bound.
double mi_cross_entropy_plugin(const LatentDataset& data,
                               const MlpClassifier& classifier);

// Differential entropy of a mixture by composite Simpson quadrature.
double mixture_entropy_quad_1d(const GaussianMixture& mix);
double mixture_entropy_quad_2d(const GaussianMixture& mix);

inline constexpr double kConditionalJitter = 1e-8;

}  // namespace latentpriv

#endif  // LATENTPRIV_MI_BOUNDS_HPP
