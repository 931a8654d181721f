#pragma once

// Shallow domain-adversarial network: one sigmoid hidden layer, a softmax
// label classifier on top, and a logistic domain regressor that reads the
// same hidden representation. Trained by per-example SGD where the hidden
// layer descends on the domain term while the regressor ascends on it.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dann/dataset.hpp"
#include "dann/rng.hpp"
#include "dann/tensor.hpp"

namespace dann {

enum class Mode {
  Dann,             // adversarial hidden-layer updates
  NnPlain,          // label loss only; lambda forced to 0, target unused
  NnWithRegressor,  // regressor trained on the side, no feedback into the hidden layer
};

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct TrainConfig {
  std::size_t hidden_size = 15;
  double lambda = 1.0;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Mode mode = Mode::Dann;
  std::size_t max_epochs = 500;
  std::size_t patience = 10;
  double val_fraction = 0.10;
  bool shuffle = true;

  void validate() const;
  /// lambda actually used by the update rule (0 in NnPlain).
  double effective_lambda() const { return mode == Mode::NnPlain ? 0.0 : lambda; }
};

struct DannParams {
  DenseMat W;  // l x n
  DenseVec b;  // l
  DenseMat V;  // 2 x l
  DenseVec c;  // 2
  DenseVec w;  // l, domain regressor weights
  double d = 0.0;

  std::size_t input_dim() const { return W.cols(); }
  std::size_t hidden_size() const { return W.rows(); }

  static DannParams zeros(std::size_t n, std::size_t l);
  /// W and V uniform in ±1/sqrt(fan_in); biases and (w, d) zero.
  static DannParams random_init(std::size_t n, std::size_t l, Rng& rng);

  /// Throws DimensionError when blocks disagree with (n, l).
  void check_shapes() const;
  bool operator==(const DannParams&) const = default;
};

DenseVec forward_hidden(const DannParams& p, const SparseVec& x);
DenseVec forward_output(const DannParams& p, std::span<const double> h);
double domain_regressor(const DannParams& p, std::span<const double> h);

/// Probability clamp used inside the logarithms of both losses.
inline constexpr double kProbClamp = 1e-12;

/// -log f_y
double nll_loss(std::span<const double> f, int y);
/// -z log o - (1 - z) log(1 - o)
double domain_loss(double o, int z);

/// Per-example deltas of one SGD step.
///
/// The hidden-weight delta is kept factored: ΔW = w_source ⊗ xs + w_target ⊗ xt,
/// which is exact and keeps updates proportional to nnz(x).
struct Deltas {
  DenseVec c;
  DenseMat V;
  DenseVec b;
  DenseVec W_source;  // coefficient of xsᵀ
  DenseVec W_target;  // coefficient of xtᵀ (empty when no target example)
  DenseVec w;
  double d = 0.0;

  /// Dense ΔW for inspection and tests.
  DenseMat dense_W(const SparseVec& xs, const SparseVec* xt) const;
};

/// Forward and backward pass for the pair (xs, ys) / xt. `xt` may be null,
/// in which case only the source-side terms are accumulated.
/// `adversarial` controls whether the regularizer terms flow into (W, b).
Deltas compute_deltas(const DannParams& p, const SparseVec& xs, int ys, const SparseVec* xt,
                      double lambda, bool adversarial);

/// Which parameter blocks an update touches; used to freeze blocks.
struct UpdateMask {
  bool network = true;    // W, V, b, c (descent)
  bool regressor = true;  // w, d (ascent)
};

/// Applies W -= αΔW, V -= αΔV, b -= αΔb, c -= αΔc, w += αΔw, d += αΔd.
/// Throws NumericalError naming the block and `step` if anything becomes non-finite.
void apply_deltas(DannParams& p, const Deltas& delta, const SparseVec& xs, const SparseVec* xt,
                  double alpha, std::size_t step, UpdateMask mask = {});

/// One stochastic update for a source example and a sampled target example.
void sgd_step(DannParams& p, const SparseVec& xs, int ys, const SparseVec* xt,
              const TrainConfig& cfg, std::size_t step = 0);

struct TrainReport {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_risk = 1.0;
  std::vector<double> val_risk_history;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> val_indices;

  bool operator==(const TrainReport&) const = default;
};

struct TrainResult {
  DannParams params;  // snapshot at best_epoch
  TrainReport report;
};

/// Per-epoch callback: (epoch, params after the epoch, validation risk).
using EpochObserver = std::function<void(std::size_t, const DannParams&, double)>;

TrainResult train(const LabeledSet& source, const UnlabeledSet& target, const TrainConfig& cfg,
                  const EpochObserver& observer = {});

/// argmax_y f_y(x), ties broken towards 0.
int predict(const DannParams& p, const SparseVec& x);
std::vector<int> predict(const DannParams& p, std::span<const SparseVec> xs);
/// Fraction misclassified.
double risk(const DannParams& p, const LabeledSet& data);

/// Fraction of examples the domain regressor places on the right side of
/// 0.5 (source ⇒ o ≥ 0.5, target ⇒ o < 0.5).
double domain_accuracy(const DannParams& p, std::span<const SparseVec> source,
                       std::span<const SparseVec> target);

}  // namespace dann
