#include "latentpriv/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace latentpriv {

namespace {

double elu(double t) { return t >= 0.0 ? t : std::expm1(t); }
double elu_prime(double t) { return t >= 0.0 ? 1.0 : std::exp(t); }

}  // namespace

MlpClassifier MlpClassifier::init(int input, int hidden, int classes, Rng& rng) {
  if (input < 1 || hidden < 1 || classes < 2)
    throw std::invalid_argument("MlpClassifier::init: bad shape");
  MlpClassifier c;
  c.w1 = Matrix(hidden, input);
  c.b1 = Vec(hidden, 0.0);
  c.w2 = Matrix(classes, hidden);
  c.b2 = Vec(classes, 0.0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& w : c.w1.data) w = s1 * rng.normal();
  for (auto& w : c.w2.data) w = s2 * rng.normal();
  return c;
}

MlpClassifier MlpClassifier::zeros(int input, int hidden, int classes) {
  MlpClassifier c;
  c.w1 = Matrix(hidden, input);
  c.b1 = Vec(hidden, 0.0);
  c.w2 = Matrix(classes, hidden);
  c.b2 = Vec(classes, 0.0);
  return c;
}

Vec mlp_logits(const MlpClassifier& c, const Vec& x) {
  if (static_cast<int>(x.size()) != c.input_dim())
    throw std::invalid_argument("mlp_logits: dimension mismatch");
  Vec h(static_cast<std::size_t>(c.hidden_dim()));
  for (int i = 0; i < c.hidden_dim(); ++i) {
    double a = c.b1[i];
    for (int j = 0; j < c.input_dim(); ++j) a += c.w1(i, j) * x[j];
    h[i] = elu(a);
  }
  Vec logits(static_cast<std::size_t>(c.num_classes()));
  for (int k = 0; k < c.num_classes(); ++k) {
    double a = c.b2[k];
    for (int i = 0; i < c.hidden_dim(); ++i) a += c.w2(k, i) * h[i];
    logits[k] = a;
  }
  return logits;
}

Vec mlp_forward(const MlpClassifier& c, const Vec& x) {
  Vec logits = mlp_logits(c, x);
  const double lse = logsumexp(logits);
  for (auto& v : logits) v = std::exp(v - lse);
  return logits;
}

CeBatchResult cross_entropy_and_gradients(const MlpClassifier& c,
                                          const std::vector<Vec>& xs,
                                          const std::vector<int>& ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("cross_entropy_and_gradients: empty or ragged batch");
  const int in = c.input_dim();
  const int hid = c.hidden_dim();
  const int out = c.num_classes();
  const double inv_m = 1.0 / static_cast<double>(xs.size());

  CeBatchResult res;
  res.grads.w1 = Matrix(hid, in);
  res.grads.b1 = Vec(hid, 0.0);
  res.grads.w2 = Matrix(out, hid);
  res.grads.b2 = Vec(out, 0.0);
  res.input_grads.resize(xs.size());

  Vec a(hid), h(hid), logits(out), dh(hid);
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const Vec& x = xs[s];
    if (static_cast<int>(x.size()) != in)
      throw std::invalid_argument("cross_entropy_and_gradients: dimension mismatch");
    const int y = ys[s];
    if (y < 0 || y >= out)
      throw std::invalid_argument("cross_entropy_and_gradients: label out of range");

    for (int i = 0; i < hid; ++i) {
      double acc = c.b1[i];
      for (int j = 0; j < in; ++j) acc += c.w1(i, j) * x[j];
      a[i] = acc;
      h[i] = elu(acc);
    }
    for (int k = 0; k < out; ++k) {
      double acc = c.b2[k];
      for (int i = 0; i < hid; ++i) acc += c.w2(k, i) * h[i];
      logits[k] = acc;
    }
    const double lse = logsumexp(logits);
    res.loss += inv_m * (lse - logits[y]);

    // dlogits = (softmax - onehot(y)) / m
    Vec dlogits(out);
    for (int k = 0; k < out; ++k)
      dlogits[k] = (std::exp(logits[k] - lse) - (k == y ? 1.0 : 0.0)) * inv_m;

    for (int i = 0; i < hid; ++i) dh[i] = 0.0;
    for (int k = 0; k < out; ++k) {
      res.grads.b2[k] += dlogits[k];
      for (int i = 0; i < hid; ++i) {
        res.grads.w2(k, i) += dlogits[k] * h[i];
        dh[i] += c.w2(k, i) * dlogits[k];
      }
    }

    Vec dx(in, 0.0);
    for (int i = 0; i < hid; ++i) {
      const double da = dh[i] * elu_prime(a[i]);
      res.grads.b1[i] += da;
      for (int j = 0; j < in; ++j) {
        res.grads.w1(i, j) += da * x[j];
        dx[j] += c.w1(i, j) * da;
      }
    }
    res.input_grads[s] = std::move(dx);
  }
  return res;
}

double cross_entropy_single(const MlpClassifier& c, const Vec& x, int y) {
  const Vec logits = mlp_logits(c, x);
  return logsumexp(logits) - logits[y];
}

void sgd_step(MlpClassifier& c, const MlpGradients& g, double lr) {
  for (std::size_t i = 0; i < c.w1.data.size(); ++i) c.w1.data[i] -= lr * g.w1.data[i];
  for (std::size_t i = 0; i < c.b1.size(); ++i) c.b1[i] -= lr * g.b1[i];
  for (std::size_t i = 0; i < c.w2.data.size(); ++i) c.w2.data[i] -= lr * g.w2.data[i];
  for (std::size_t i = 0; i < c.b2.size(); ++i) c.b2[i] -= lr * g.b2[i];
}

int mlp_predict(const MlpClassifier& c, const Vec& x) {
  const Vec logits = mlp_logits(c, x);
  int arg = 0;
  for (int k = 1; k < static_cast<int>(logits.size()); ++k)
    if (logits[k] > logits[arg]) arg = k;
  return arg;
}

double classifier_accuracy(const MlpClassifier& c, const std::vector<Vec>& xs,
                           const std::vector<int>& ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("classifier_accuracy: empty or ragged data");
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (mlp_predict(c, xs[i]) == ys[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(xs.size());
}

void train_classifier(MlpClassifier& c, const std::vector<Vec>& xs,
                      const std::vector<int>& ys, int steps, int batch_size,
                      double lr, Rng& rng) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("train_classifier: empty or ragged data");
  std::vector<Vec> bx(static_cast<std::size_t>(batch_size));
  std::vector<int> by(static_cast<std::size_t>(batch_size));
  for (int step = 0; step < steps; ++step) {
    for (int b = 0; b < batch_size; ++b) {
      const std::size_t idx =
          static_cast<std::size_t>(rng.uniform() * static_cast<double>(xs.size()));
      bx[b] = xs[idx < xs.size() ? idx : xs.size() - 1];
      by[b] = ys[idx < xs.size() ? idx : xs.size() - 1];
    }
    const CeBatchResult r = cross_entropy_and_gradients(c, bx, by);
    sgd_step(c, r.grads, lr);
  }
}

}  // namespace latentpriv
