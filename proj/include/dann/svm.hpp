#pragma once

// Linear SVM trained in the primal by Pegasos-style projected subgradient
// descent on  (λ/2)‖θ‖² + mean hinge,  with λ = 1/(C·m) and θ = (w, bias).
// The bias is an augmented constant feature and is regularized with w.

#include <cstdint>
#include <vector>

#include "dann/dataset.hpp"
#include "dann/tensor.hpp"

namespace dann {

struct SvmModel {
  DenseVec weights;
  double bias = 0.0;
  double c_param = 1.0;

  std::size_t dim() const { return weights.size(); }
  bool operator==(const SvmModel&) const = default;
};

struct SvmOptions {
  double C = 1.0;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
};

/// Labels {0, 1} are mapped to {-1, +1}. Starts from θ = 0.
SvmModel svm_train(const LabeledSet& data, const SvmOptions& opts);

/// Same as svm_train, also recording the primal objective after each epoch.
SvmModel svm_train(const LabeledSet& data, const SvmOptions& opts,
                   std::vector<double>* objective_trace);

double svm_decision(const SvmModel& m, const SparseVec& x);
/// 1 when w·x + bias >= 0, else 0.
int svm_predict(const SvmModel& m, const SparseVec& x);
double svm_error(const SvmModel& m, const LabeledSet& data);
/// (λ/2)‖θ‖² + mean hinge on `data`, with λ = 1/(C·m).
double svm_objective(const SvmModel& m, const LabeledSet& data);

}  // namespace dann
