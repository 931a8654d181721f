#pragma once

// Numeric views of a trained 2D model: label and domain decision surfaces
// on a grid, a PCA projection of the hidden representation, and the
// hidden-neuron level sets h_i(x) = 1/2.

#include <filesystem>
#include <vector>

#include "dann/dataset.hpp"
#include "dann/network.hpp"

namespace dann {

struct AxisRange {
  double min = -1.0;
  double max = 1.0;
  std::size_t steps = 300;

  double at(std::size_t i) const;
};

struct Region {
  AxisRange x;
  AxisRange y;
};

/// Bounding box of 2D points inflated by `inflate` (fraction of each side).
Region bounding_region(std::span<const SparseVec> points, std::size_t steps = 300,
                       double inflate = 0.2);

struct Grid2D {
  AxisRange x_range;
  AxisRange y_range;
  DenseMat values;  // y_range.steps rows, x_range.steps columns
};

/// f_1(x) at every node; the label boundary is the 0.5 level set.
Grid2D label_boundary_grid(const DannParams& p, const Region& region);
/// o(h(x)) at every node; o >= 0.5 is classified as source.
Grid2D domain_boundary_grid(const DannParams& p, const Region& region);

struct EigenResult {
  DenseVec values;        // descending
  DenseMat vectors;       // column k pairs with values[k]
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi eigensolver for symmetric matrices; stops once the
/// off-diagonal Frobenius norm drops below `tol` times the matrix norm.
EigenResult jacobi_eigen(const DenseMat& sym, double tol = 1e-12, std::size_t max_sweeps = 100);

struct PcaPoint {
  double pc1 = 0.0;
  double pc2 = 0.0;
  int domain = 1;  // 1 = source, 0 = target
  int label = -1;  // -1 when unknown
};

struct Pca2D {
  DenseVec mean;
  std::vector<DenseVec> components;  // 2 orthonormal vectors
  DenseVec explained_variance;       // top-2 eigenvalues, population covariance
  std::vector<PcaPoint> projected;
};

/// Top-2 principal components of `points` (centred only, not scaled).
/// Component signs make the largest-magnitude coordinate positive.
Pca2D pca2d(std::span<const DenseVec> points);

/// PCA of h(S) ∪ h(T). `target_labels` may be empty.
Pca2D pca_embed(const DannParams& p, const LabeledSet& source, const UnlabeledSet& target,
                std::span<const int> target_labels = {});

struct LevelSet {
  std::size_t neuron = 0;
  double a = 0.0;  // a·x1 + b·x2 + c = 0
  double b = 0.0;
  double c = 0.0;
  bool degenerate = false;  // zero weight row: h_i is constant
};

std::vector<LevelSet> hidden_level_sets(const DannParams& p);

// CSV emitters. Headers:
//   grid:      x,y,value
//   pca:       pc1,pc2,domain,label
//   levelsets: neuron_id,a,b,c,degenerate
void write_grid_csv(const Grid2D& grid, const std::filesystem::path& path);
void write_pca_csv(const Pca2D& pca, const std::filesystem::path& path);
void write_levelsets_csv(const std::vector<LevelSet>& sets, const std::filesystem::path& path);

}  // namespace dann
