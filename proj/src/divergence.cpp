#include "dann/divergence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <numeric>

#include "dann/error.hpp"
#include "dann/rng.hpp"
#include "dann/svm.hpp"

namespace dann {

DomainDataset build_U(std::span<const SparseVec> source, std::span<const SparseVec> target) {
  if (source.empty() || target.empty()) throw DataError("build_U: both samples must be nonempty");
  const std::size_t dim = source.front().dim();
  DomainDataset u;
  u.dim = dim;
  u.x.reserve(source.size() + target.size());
  for (auto [set, z] : {std::pair{source, 1}, std::pair{target, 0}}) {
    for (const auto& x : set) {
      if (x.dim() != dim)
        throw DimensionError("build_U: example dim " + std::to_string(x.dim()) + " vs " +
                             std::to_string(dim));
      u.x.push_back(x);
      u.z.push_back(z);
    }
  }
  return u;
}

double empirical_h_divergence(double err_source, double err_target) {
  if (!(err_source >= 0.0 && err_source <= 1.0) || !(err_target >= 0.0 && err_target <= 1.0))
    throw std::invalid_argument("empirical_h_divergence: error terms must lie in [0, 1]");
  return 2.0 * (1.0 - (err_source + err_target));
}

double pad_from_error(double epsilon) { return 2.0 * (1.0 - 2.0 * epsilon); }

std::vector<double> default_c_grid(std::size_t count) {
  if (count == 1) return {1.0};
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k)
    grid[k] = std::pow(10.0, -5.0 + 5.0 * static_cast<double>(k) / static_cast<double>(count - 1));
  return grid;
}

void PadReport::check() const {
  if (per_c_errors.empty()) throw DataError("PadReport: no per-C errors");
  double mn = per_c_errors.front().second;
  for (const auto& [c, e] : per_c_errors) mn = std::min(mn, e);
  if (mn != best_epsilon) throw DataError("PadReport: best_epsilon is not the minimum error");
  if (pad_value != pad_from_error(best_epsilon))
    throw DataError("PadReport: pad_value != 2(1 - 2 best_epsilon)");
  if (pad_value < -2.0 || pad_value > 2.0) throw DataError("PadReport: pad_value outside [-2, 2]");
}

namespace {

// Content hash used to put U in a label-independent canonical order, so
// swapping the source and target roles yields the same split and the same
// SVM visiting order with every label flipped.
std::uint64_t content_hash(const SparseVec& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
      h ^= (v >> (8 * k)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : x.entries()) {
    mix(e.index);
    mix(std::bit_cast<std::uint64_t>(e.value));
  }
  return h;
}

}  // namespace

PadReport compute_pad(std::span<const SparseVec> source, std::span<const SparseVec> target,
                      const PadOptions& opts) {
  if (source.size() < 2 || target.size() < 2)
    throw DataError("compute_pad: need at least 2 examples per domain");
  if (opts.c_grid.empty()) throw std::invalid_argument("compute_pad: empty C grid");
  const auto u = build_U(source, target);
  const std::size_t n = u.size();

  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = content_hash(u.x[i]);
  std::vector<std::size_t> canonical(n);
  std::iota(canonical.begin(), canonical.end(), 0);
  std::stable_sort(canonical.begin(), canonical.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  const std::size_t n_train = (n + 1) / 2;
  std::vector<std::size_t> train_idx, test_idx;
  std::size_t attempt = 0;
  for (;; ++attempt) {
    if (attempt == 10) throw DataError("compute_pad: could not draw a split with both domains in each half");
    auto order = canonical;
    Rng rng(Rng::derive_seed(opts.seed, attempt));
    rng.shuffle(std::span(order));
    train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    auto both = [&](const std::vector<std::size_t>& idx) {
      bool has0 = false, has1 = false;
      for (auto i : idx) (u.z[i] ? has1 : has0) = true;
      return has0 && has1;
    };
    if (both(train_idx) && both(test_idx)) break;
  }

  const auto pooled = u.as_labeled();
  const auto train_half = subset(pooled, train_idx);
  const auto test_half = subset(pooled, test_idx);
  const std::uint64_t svm_seed = Rng::derive_seed(opts.seed, 1000);

  std::vector<double> errors(opts.c_grid.size());
  auto run = [&](std::size_t k) {
    const auto model = svm_train(train_half, {opts.c_grid[k], opts.svm_epochs, svm_seed});
    errors[k] = svm_error(model, test_half);
  };
  const std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
  if (jobs == 1) {
    for (std::size_t k = 0; k < errors.size(); ++k) run(k);
  } else {
    std::vector<std::future<void>> pending;
    for (std::size_t w = 0; w < jobs; ++w)
      pending.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t k = w; k < errors.size(); k += jobs) run(k);
      }));
    for (auto& f : pending) f.get();
  }

  PadReport report;
  report.split_seed = opts.seed;
  report.split_attempts = attempt + 1;
  report.train_size = train_idx.size();
  report.test_size = test_idx.size();
  report.svm_epochs = opts.svm_epochs;
  report.representation_tag = opts.tag;
  for (std::size_t k = 0; k < errors.size(); ++k) report.per_c_errors.emplace_back(opts.c_grid[k], errors[k]);
  report.best_epsilon = *std::min_element(errors.begin(), errors.end());
  report.pad_value = pad_from_error(report.best_epsilon);
  return report;
}

std::vector<SparseVec> hidden_representation(const DannParams& p, std::span<const SparseVec> xs) {
  std::vector<SparseVec> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(SparseVec::from_dense(forward_hidden(p, x)));
  return out;
}

PadReport pad_on_representation(const DannParams& p, std::span<const SparseVec> source,
                                std::span<const SparseVec> target, const PadOptions& opts) {
  const auto hs = hidden_representation(p, source);
  const auto ht = hidden_representation(p, target);
  return compute_pad(hs, ht, opts);
}

}  // namespace dann
