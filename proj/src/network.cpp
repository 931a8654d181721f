#include "dann/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dann/error.hpp"

namespace dann {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Dann: return "dann";
    case Mode::NnPlain: return "nn";
    case Mode::NnWithRegressor: return "nn-regressor";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "dann") return Mode::Dann;
  if (s == "nn" || s == "nn-plain") return Mode::NnPlain;
  if (s == "nn-regressor") return Mode::NnWithRegressor;
  throw std::invalid_argument("unknown mode '" + s + "' (expected dann, nn, nn-regressor)");
}

void TrainConfig::validate() const {
  if (hidden_size < 1) throw std::invalid_argument("hidden_size must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be > 0");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("val_fraction must lie in (0, 1)");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
}

DannParams DannParams::zeros(std::size_t n, std::size_t l) {
  return {DenseMat(l, n), DenseVec(l, 0.0), DenseMat(2, l), DenseVec(2, 0.0), DenseVec(l, 0.0),
          0.0};
}

DannParams DannParams::random_init(std::size_t n, std::size_t l, Rng& rng) {
  auto p = zeros(n, l);
  const double bw = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : p.W.data()) v = rng.uniform(-bw, bw);
  const double bv = 1.0 / std::sqrt(static_cast<double>(l));
  for (auto& v : p.V.data()) v = rng.uniform(-bv, bv);
  return p;
}

void DannParams::check_shapes() const {
  const auto l = W.rows();
  if (b.size() != l || V.rows() != 2 || V.cols() != l || c.size() != 2 || w.size() != l)
    throw DimensionError("DannParams: inconsistent blocks for W " + W.shape() + ", b(" +
                         std::to_string(b.size()) + "), V " + V.shape() + ", c(" +
                         std::to_string(c.size()) + "), w(" + std::to_string(w.size()) + ")");
}

DenseVec forward_hidden(const DannParams& p, const SparseVec& x) {
  auto a = matvec(p.W, x);
  axpy(a, 1.0, p.b);
  return sigm(a);
}

DenseVec forward_output(const DannParams& p, std::span<const double> h) {
  auto a = matvec(p.V, h);
  axpy(a, 1.0, p.c);
  return softmax(a);
}

double domain_regressor(const DannParams& p, std::span<const double> h) {
  return sigm(p.d + dot(p.w, h));
}

double nll_loss(std::span<const double> f, int y) {
  if (y != 0 && y != 1) throw std::invalid_argument("nll_loss: label must be 0 or 1");
  if (f.size() != 2) throw DimensionError("nll_loss: expected a 2-vector");
  return -std::log(std::clamp(f[static_cast<std::size_t>(y)], kProbClamp, 1.0 - kProbClamp));
}

double domain_loss(double o, int z) {
  if (z != 0 && z != 1) throw std::invalid_argument("domain_loss: z must be 0 or 1");
  if (!(o > 0.0 && o < 1.0)) throw std::invalid_argument("domain_loss: o must lie in (0, 1)");
  o = std::clamp(o, kProbClamp, 1.0 - kProbClamp);
  return z == 1 ? -std::log(o) : -std::log(1.0 - o);
}

DenseMat Deltas::dense_W(const SparseVec& xs, const SparseVec* xt) const {
  DenseMat m(W_source.size(), xs.dim());
  add_outer(m, 1.0, W_source, xs);
  if (xt && !W_target.empty()) add_outer(m, 1.0, W_target, *xt);
  return m;
}

Deltas compute_deltas(const DannParams& p, const SparseVec& xs, int ys, const SparseVec* xt,
                      double lambda, bool adversarial) {
  if (ys != 0 && ys != 1) throw std::invalid_argument("label must be 0 or 1");
  const std::size_t l = p.hidden_size();
  Deltas g;

  // Forward propagation.
  const auto hs = forward_hidden(p, xs);
  const auto fs = forward_output(p, hs);

  // Backpropagation of the label loss.
  g.c = {fs[0], fs[1]};
  g.c[static_cast<std::size_t>(ys)] -= 1.0;
  g.V = outer(g.c, hs);
  g.b = matvec_transposed(p.V, g.c);
  for (std::size_t k = 0; k < l; ++k) g.b[k] *= hs[k] * (1.0 - hs[k]);

  // Domain regularizer, source side.
  const double os = domain_regressor(p, hs);
  g.d = lambda * (1.0 - os);
  g.w.assign(hs.begin(), hs.end());
  for (auto& v : g.w) v *= g.d;
  if (adversarial) {
    for (std::size_t k = 0; k < l; ++k) g.b[k] += g.d * p.w[k] * hs[k] * (1.0 - hs[k]);
  }
  g.W_source = g.b;

  // Domain regularizer, target side.
  if (xt) {
    const auto ht = forward_hidden(p, *xt);
    const double ot = domain_regressor(p, ht);
    const double coef = lambda * ot;
    g.d -= coef;
    axpy(g.w, -coef, ht);
    g.W_target.assign(l, 0.0);
    if (adversarial) {
      for (std::size_t k = 0; k < l; ++k) {
        const double tmp = -coef * p.w[k] * ht[k] * (1.0 - ht[k]);
        g.b[k] += tmp;
        g.W_target[k] = tmp;
      }
    }
  }
  return g;
}

namespace {

void check_block(std::span<const double> v, const char* name, std::size_t step) {
  if (!all_finite(v))
    throw NumericalError(std::string("sgd: non-finite value in parameter block ") + name +
                         " at step " + std::to_string(step));
}

void check_columns(const DannParams& p, const SparseVec& x, std::size_t step) {
  for (std::size_t r = 0; r < p.W.rows(); ++r)
    for (const auto& e : x.entries())
      if (!std::isfinite(p.W(r, e.index)))
        throw NumericalError("sgd: non-finite value in parameter block W at step " +
                             std::to_string(step));
}

}  // namespace

void apply_deltas(DannParams& p, const Deltas& g, const SparseVec& xs, const SparseVec* xt,
                  double alpha, std::size_t step, UpdateMask mask) {
  if (mask.network) {
    add_outer(p.W, -alpha, g.W_source, xs);
    if (xt && !g.W_target.empty()) add_outer(p.W, -alpha, g.W_target, *xt);
    axpy(p.V, -alpha, g.V);
    axpy(p.b, -alpha, g.b);
    axpy(p.c, -alpha, g.c);
    check_columns(p, xs, step);
    if (xt) check_columns(p, *xt, step);
    check_block(p.V.data(), "V", step);
    check_block(p.b, "b", step);
    check_block(p.c, "c", step);
  }
  if (mask.regressor) {
    axpy(p.w, alpha, g.w);
    p.d += alpha * g.d;
    check_block(p.w, "w", step);
    check_block({&p.d, 1}, "d", step);
  }
}

void sgd_step(DannParams& p, const SparseVec& xs, int ys, const SparseVec* xt,
              const TrainConfig& cfg, std::size_t step) {
  const bool plain = cfg.mode == Mode::NnPlain;
  const SparseVec* target = plain ? nullptr : xt;
  const auto g = compute_deltas(p, xs, ys, target, cfg.effective_lambda(), cfg.mode == Mode::Dann);
  apply_deltas(p, g, xs, target, cfg.learning_rate, step, {true, !plain});
}

TrainResult train(const LabeledSet& source, const UnlabeledSet& target, const TrainConfig& cfg,
                  const EpochObserver& observer) {
  cfg.validate();
  source.validate();
  if (source.empty()) throw DataError("train: empty source sample");
  const bool uses_target = cfg.mode != Mode::NnPlain;
  if (uses_target) {
    target.validate();
    if (target.empty()) throw DataError("train: empty target sample in " + to_string(cfg.mode) + " mode");
    if (target.dim != source.dim)
      throw DimensionError("train: source dim " + std::to_string(source.dim) + " vs target dim " +
                           std::to_string(target.dim));
  }

  const std::size_t m = source.size();
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(static_cast<double>(m) * cfg.val_fraction)));
  if (n_val >= m) throw DataError("train: source sample too small for a validation split");

  TrainResult result;
  auto& report = result.report;
  {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(Rng::derive_seed(cfg.seed, 1));
    split_rng.shuffle(std::span(order));
    report.train_indices.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
    report.val_indices.assign(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(report.train_indices.begin(), report.train_indices.end());
    std::sort(report.val_indices.begin(), report.val_indices.end());
  }
  const auto val_set = subset(source, report.val_indices);

  Rng init_rng(Rng::derive_seed(cfg.seed, 0));
  Rng shuffle_rng(Rng::derive_seed(cfg.seed, 2));
  Rng target_rng(Rng::derive_seed(cfg.seed, 3));

  auto params = DannParams::random_init(source.dim, cfg.hidden_size, init_rng);
  result.params = params;

  const auto last_target = static_cast<std::int64_t>(target.size()) - 1;
  std::vector<std::size_t> order = report.train_indices;
  std::size_t step = 0;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (cfg.shuffle) shuffle_rng.shuffle(std::span(order));
    for (auto i : order) {
      const SparseVec* xt = nullptr;
      if (uses_target) xt = &target.x[static_cast<std::size_t>(target_rng.uniform_int(0, last_target))];
      sgd_step(params, source.x[i], source.y[i], xt, cfg, step++);
    }
    const double val = risk(params, val_set);
    report.val_risk_history.push_back(val);
    report.epochs_run = epoch;
    if (observer) observer(epoch, params, val);
    // Ties move the snapshot forward so a flat validation curve keeps training.
    if (epoch == 1 || val <= report.best_val_risk) {
      if (epoch == 1 || val < report.best_val_risk) stale = 0;
      report.best_val_risk = val;
      report.best_epoch = epoch;
      result.params = params;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

int predict(const DannParams& p, const SparseVec& x) {
  const auto f = forward_output(p, forward_hidden(p, x));
  return f[1] > f[0] ? 1 : 0;
}

std::vector<int> predict(const DannParams& p, std::span<const SparseVec> xs) {
  std::vector<int> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(p, x));
  return out;
}

double risk(const DannParams& p, const LabeledSet& data) {
  if (data.empty()) throw DataError("risk: empty data set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) wrong += predict(p, data.x[i]) != data.y[i];
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double domain_accuracy(const DannParams& p, std::span<const SparseVec> source,
                       std::span<const SparseVec> target) {
  if (source.empty() && target.empty()) throw DataError("domain_accuracy: no examples");
  std::size_t right = 0;
  for (const auto& x : source) right += domain_regressor(p, forward_hidden(p, x)) >= 0.5;
  for (const auto& x : target) right += domain_regressor(p, forward_hidden(p, x)) < 0.5;
  return static_cast<double>(right) / static_cast<double>(source.size() + target.size());
}

}  // namespace dann
