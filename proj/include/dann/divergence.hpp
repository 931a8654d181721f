#pragma once

// Empirical H-divergence and Proxy A-distance (PAD).
//
// PAD: label source examples 1 and target examples 0, split the pooled set
// in two halves, train a linear SVM per C on the first half, take the
// smallest held-out error ε on the second half, report 2(1 - 2ε).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dann/dataset.hpp"
#include "dann/network.hpp"
#include "dann/tensor.hpp"

namespace dann {

/// Pooled source/target sample; source examples carry z = 1, target z = 0.
struct DomainDataset {
  std::size_t dim = 0;
  std::vector<SparseVec> x;
  std::vector<int> z;

  std::size_t size() const { return x.size(); }
  LabeledSet as_labeled() const { return {"U", dim, x, z}; }
};

DomainDataset build_U(std::span<const SparseVec> source, std::span<const SparseVec> target);

/// Plug-in empirical H-divergence 2(1 - [err_s + err_t]) for a trained
/// discriminator: err_s is the fraction of source examples it assigns to the
/// target side, err_t the fraction of target examples it assigns to the
/// source side. Both must lie in [0, 1].
double empirical_h_divergence(double err_source_as_1, double err_target_as_0);

/// 2(1 - 2ε). Not clipped; ε > 0.5 gives negative values.
double pad_from_error(double epsilon);

/// C values log-spaced in [1e-5, 1].
std::vector<double> default_c_grid(std::size_t count = 10);

struct PadReport {
  std::uint64_t split_seed = 0;
  std::size_t split_attempts = 1;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t svm_epochs = 50;
  std::vector<std::pair<double, double>> per_c_errors;  // (C, ε)
  double best_epsilon = 0.5;
  double pad_value = 0.0;
  std::string representation_tag;

  /// Re-checks best ε = min and pad = 2(1 - 2ε); throws DataError otherwise.
  void check() const;
  bool operator==(const PadReport&) const = default;
};

struct PadOptions {
  std::vector<double> c_grid = default_c_grid();
  std::uint64_t seed = 0;
  std::size_t svm_epochs = 50;
  std::size_t jobs = 1;
  std::string tag = "raw";
};

PadReport compute_pad(std::span<const SparseVec> source, std::span<const SparseVec> target,
                      const PadOptions& opts);

/// Maps both samples through h(·) of `p`, then defers to compute_pad.
PadReport pad_on_representation(const DannParams& p, std::span<const SparseVec> source,
                                std::span<const SparseVec> target, const PadOptions& opts);

std::vector<SparseVec> hidden_representation(const DannParams& p, std::span<const SparseVec> xs);

}  // namespace dann
