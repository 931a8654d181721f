#pragma once

// Marginalized stacked denoising autoencoder (closed form).
//
// Each layer maps the bias-augmented input x̄ = (x, 1) to a reconstruction
// W x̄ where W minimizes the expected squared reconstruction error under
// feature dropout with probability p (the bias is never dropped):
//
//   S = Σ x̄ x̄ᵀ,  q = (1-p, …, 1-p, 1)
//   Q = S ⊙ q qᵀ with diag(Q) = q ⊙ diag(S),  P_ij = S_ij q_j  (i < d)
//   W = P (Q + ridge·I')⁻¹          (I' leaves the bias entry unregularized)
//
// Layer output is tanh(W x̄), which feeds the next layer. The feature map
// concatenates the raw input with every layer output.

#include <cstdint>
#include <vector>

#include "dann/tensor.hpp"

namespace dann {

/// Dense factors the (d+1)x(d+1) system directly. LowRank uses its
/// diagonal-plus-rank-n structure and costs O(d·n²) instead of O(d³); Auto
/// picks LowRank when there are fewer examples than features.
enum class MsdaSolver { Auto, Dense, LowRank };

struct MsdaOptions {
  double corruption = 0.5;
  std::size_t layers = 5;
  double ridge = 1e-5;
  /// Keep only the `keep_features` most frequent input features (0 = all).
  std::size_t keep_features = 0;
  MsdaSolver solver = MsdaSolver::Auto;
};

struct MsdaModel {
  std::size_t original_dim = 0;
  /// Kept original feature indices, ascending; empty means identity.
  std::vector<std::uint32_t> kept_features;
  double corruption = 0.5;
  double ridge = 1e-5;
  std::vector<DenseMat> layers;  // each d x (d + 1)

  std::size_t input_dim() const;  // d, after truncation
  std::size_t num_layers() const { return layers.size(); }
  std::size_t output_dim() const { return input_dim() * (num_layers() + 1); }

  /// Restricts x to the kept features (dim d).
  SparseVec project(const SparseVec& x) const;
  bool operator==(const MsdaModel&) const = default;
};

MsdaModel msda_fit(std::span<const SparseVec> xs, const MsdaOptions& opts);

/// [x, h_1, …, h_L], length d·(L+1).
DenseVec msda_transform(const MsdaModel& m, const SparseVec& x);
std::vector<SparseVec> msda_transform(const MsdaModel& m, std::span<const SparseVec> xs);

/// Linear part of one layer: W x̄ for a d-dimensional input.
DenseVec msda_layer_linear(const DenseMat& layer, std::span<const double> x);

}  // namespace dann
