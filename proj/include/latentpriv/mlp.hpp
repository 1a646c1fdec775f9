#ifndef LATENTPRIV_MLP_HPP
#define LATENTPRIV_MLP_HPP

#include <vector>

#include "latentpriv/linalg.hpp"
#include "latentpriv/rng.hpp"

namespace latentpriv {

// Two fully-connected layers with an ELU after the first: FC(hidden) -> ELU
// -> FC(classes), softmax on top for the loss. Gradients are analytic and
// checked against finite differences.
struct MlpClassifier {
  Matrix w1;  // hidden x input
  Vec b1;    // hidden
  Matrix w2;  // classes x hidden
  Vec b2;    // classes

  int input_dim() const { return w1.cols; }
  int hidden_dim() const { return w1.rows; }
  int num_classes() const { return w2.rows; }

  // Weights ~ N(0, 1/fan_in), biases zero.
  static MlpClassifier init(int input, int hidden, int classes, Rng& rng);
  static MlpClassifier zeros(int input, int hidden, int classes);
};

Vec mlp_logits(const MlpClassifier& c, const Vec& x);
// Softmax probabilities; always sums to 1 up to rounding.
Vec mlp_forward(const MlpClassifier& c, const Vec& x);

struct MlpGradients {
  Matrix w1;
  Vec b1;
  Matrix w2;
  Vec b2;
};

struct CeBatchResult {
  double loss = 0.0;                // mean negative log-likelihood
  MlpGradients grads;               // d loss / d parameters
  std::vector<Vec> input_grads;     // d loss / d x_i (feeds filter and attacks)
};

CeBatchResult cross_entropy_and_gradients(const MlpClassifier& c,
                                          const std::vector<Vec>& xs,
                                          const std::vector<int>& ys);

// Convenience single-sample loss (used by attack oracles and tests).
double cross_entropy_single(const MlpClassifier& c, const Vec& x, int y);

// w -= lr * g on every parameter block.
void sgd_step(MlpClassifier& c, const MlpGradients& g, double lr);

int mlp_predict(const MlpClassifier& c, const Vec& x);

double classifier_accuracy(const MlpClassifier& c, const std::vector<Vec>& xs,
                           const std::vector<int>& ys);

// Plain SGD training on (xs, ys); draws uniform batches with the given rng.
void train_classifier(MlpClassifier& c, const std::vector<Vec>& xs,
                      const std::vector<int>& ys, int steps, int batch_size,
                      double lr, Rng& rng);

}  // namespace latentpriv

#endif  // LATENTPRIV_MLP_HPP
