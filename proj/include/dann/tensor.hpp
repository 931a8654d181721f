#pragma once

// Small deterministic numerical substrate: dense vectors and row-major
// matrices, sorted sparse vectors, and the two activations used by the
// network. All arithmetic is 64-bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dann {

using DenseVec = std::vector<double>;

class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMat(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::string shape() const;

  bool operator==(const DenseMat&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Sparse vector stored as index-sorted (index, value) pairs.
///
/// Invariants: indices strictly increasing and < dim; values nonzero and
/// finite. Construction validates them.
class SparseVec {
 public:
  struct Entry {
    std::uint32_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  SparseVec() = default;
  explicit SparseVec(std::size_t dim) : dim_(dim) {}
  SparseVec(std::size_t dim, std::vector<Entry> entries);

  /// Keeps every nonzero entry of `dense`; dim = dense.size().
  static SparseVec from_dense(std::span<const double> dense);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  double dot(std::span<const double> dense) const;
  DenseVec to_dense() const;

  bool operator==(const SparseVec&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

/// Elementwise logistic function. Arguments are clamped to [-700, 700]
/// and the result to at most 1 - 2^-53 so outputs stay in (0, 1).
double sigm(double a);
DenseVec sigm(std::span<const double> a);

/// Max-shifted softmax. Throws std::invalid_argument on empty input.
DenseVec softmax(std::span<const double> a);

DenseVec matvec(const DenseMat& m, const SparseVec& x);
DenseVec matvec(const DenseMat& m, std::span<const double> x);
/// mᵀ·x
DenseVec matvec_transposed(const DenseMat& m, std::span<const double> x);

DenseMat outer(std::span<const double> u, std::span<const double> x);
DenseMat outer(std::span<const double> u, const SparseVec& x);

/// m += scale · u xᵀ. The sparse overload touches only stored columns.
void add_outer(DenseMat& m, double scale, std::span<const double> u, std::span<const double> x);
void add_outer(DenseMat& m, double scale, std::span<const double> u, const SparseVec& x);

/// y += a · x
void axpy(std::span<double> y, double a, std::span<const double> x);
void axpy(DenseMat& y, double a, const DenseMat& x);

double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v);

}  // namespace dann
