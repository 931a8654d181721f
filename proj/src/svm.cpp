#include "dann/svm.hpp"

#include <cmath>
#include <numeric>

#include "dann/error.hpp"
#include "dann/rng.hpp"

namespace dann {
namespace {

double signed_label(int y) { return y == 1 ? 1.0 : -1.0; }

// θ is stored as scale · (v, v_bias) so the shrink step is O(1).
struct ScaledWeights {
  DenseVec v;
  double v_bias = 0.0;
  double scale = 1.0;
  double sq_norm = 0.0;  // ‖v‖² + v_bias², unscaled

  explicit ScaledWeights(std::size_t n) : v(n, 0.0) {}

  double margin(const SparseVec& x) const {
    double s = v_bias;
    for (const auto& e : x.entries()) s += v[e.index] * e.value;
    return scale * s;
  }

  void add(double coef, const SparseVec& x) {
    const double k = coef / scale;
    for (const auto& e : x.entries()) {
      const double old = v[e.index];
      v[e.index] += k * e.value;
      sq_norm += v[e.index] * v[e.index] - old * old;
    }
    const double old = v_bias;
    v_bias += k;
    sq_norm += v_bias * v_bias - old * old;
  }

  void renormalize() {
    for (auto& x : v) x *= scale;
    v_bias *= scale;
    scale = 1.0;
    sq_norm = v_bias * v_bias;
    for (double x : v) sq_norm += x * x;
  }
};

}  // namespace

SvmModel svm_train(const LabeledSet& data, const SvmOptions& opts) {
  return svm_train(data, opts, nullptr);
}

SvmModel svm_train(const LabeledSet& data, const SvmOptions& opts,
                   std::vector<double>* objective_trace) {
  if (!(opts.C > 0.0) || !std::isfinite(opts.C)) throw std::invalid_argument("svm: C must be > 0");
  if (data.empty()) throw DataError("svm: empty training set");
  data.validate();

  const std::size_t m = data.size();
  const double lambda = 1.0 / (opts.C * static_cast<double>(m));
  const double radius = 1.0 / std::sqrt(lambda);

  ScaledWeights theta(data.dim);
  Rng rng(opts.seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::size_t t = 0;

  SvmModel model{DenseVec(data.dim, 0.0), 0.0, opts.C};
  auto snapshot = [&] {
    theta.renormalize();
    model.weights = theta.v;
    model.bias = theta.v_bias;
  };

  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double y = signed_label(data.y[i]);
      const bool violated = y * theta.margin(data.x[i]) < 1.0;
      // Shrink first; the first step zeroes θ exactly (η·λ = 1).
      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        theta = ScaledWeights(data.dim);
      } else {
        theta.scale *= shrink;
      }
      if (violated) theta.add(eta * y, data.x[i]);
      const double norm = theta.scale * std::sqrt(std::max(theta.sq_norm, 0.0));
      if (norm > radius) theta.scale *= radius / norm;
      if (theta.scale < 1e-100 || theta.scale > 1e100) theta.renormalize();
    }
    if (objective_trace) {
      snapshot();
      objective_trace->push_back(svm_objective(model, data));
    }
  }
  snapshot();
  if (!all_finite(model.weights) || !std::isfinite(model.bias))
    throw NumericalError("svm: non-finite weights after training");
  return model;
}

double svm_decision(const SvmModel& m, const SparseVec& x) { return x.dot(m.weights) + m.bias; }

int svm_predict(const SvmModel& m, const SparseVec& x) { return svm_decision(m, x) >= 0.0 ? 1 : 0; }

double svm_error(const SvmModel& m, const LabeledSet& data) {
  if (data.empty()) throw DataError("svm_error: empty data set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) wrong += svm_predict(m, data.x[i]) != data.y[i];
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double svm_objective(const SvmModel& m, const LabeledSet& data) {
  if (data.empty()) throw DataError("svm_objective: empty data set");
  const double lambda = 1.0 / (m.c_param * static_cast<double>(data.size()));
  double hinge = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    hinge += std::max(0.0, 1.0 - signed_label(data.y[i]) * svm_decision(m, data.x[i]));
  return 0.5 * lambda * (dot(m.weights, m.weights) + m.bias * m.bias) +
         hinge / static_cast<double>(data.size());
}

}  // namespace dann
