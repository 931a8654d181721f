#include "dann/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dann/error.hpp"

namespace dann {
namespace {

std::string shape_of(std::size_t n) { return "(" + std::to_string(n) + ")"; }

void require(bool ok, const std::string& op, const std::string& a, const std::string& b) {
  if (!ok) throw DimensionError(op + ": dimension mismatch " + a + " vs " + b);
}

constexpr double kSigmUpper = 1.0 - 0x1.0p-53;

}  // namespace

DenseMat::DenseMat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMat::DenseMat(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw DimensionError("DenseMat: data length " + std::to_string(data_.size()) +
                         " does not match " + shape());
}

DenseMat DenseMat::identity(std::size_t n) {
  DenseMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string DenseMat::shape() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

SparseVec::SparseVec(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.index >= dim_)
      throw DimensionError("SparseVec: index " + std::to_string(e.index) + " >= dim " +
                           std::to_string(dim_));
    if (k > 0 && entries_[k - 1].index >= e.index)
      throw std::invalid_argument("SparseVec: indices must be strictly increasing");
    if (e.value == 0.0 || !std::isfinite(e.value))
      throw std::invalid_argument("SparseVec: values must be nonzero and finite");
  }
}

SparseVec SparseVec::from_dense(std::span<const double> dense) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) entries.push_back({static_cast<std::uint32_t>(i), dense[i]});
  return SparseVec(dense.size(), std::move(entries));
}

double SparseVec::dot(std::span<const double> dense) const {
  require(dense.size() == dim_, "SparseVec::dot", shape_of(dim_), shape_of(dense.size()));
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * dense[e.index];
  return s;
}

DenseVec SparseVec::to_dense() const {
  DenseVec out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

double sigm(double a) {
  a = std::clamp(a, -700.0, 700.0);
  return std::min(1.0 / (1.0 + std::exp(-a)), kSigmUpper);
}

DenseVec sigm(std::span<const double> a) {
  DenseVec out(a.size());
  std::transform(a.begin(), a.end(), out.begin(), [](double v) { return sigm(v); });
  return out;
}

DenseVec softmax(std::span<const double> a) {
  if (a.empty()) throw std::invalid_argument("softmax: empty input");
  const double mx = *std::max_element(a.begin(), a.end());
  DenseVec out(a.size());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = std::exp(a[i] - mx);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return out;
}

DenseVec matvec(const DenseMat& m, const SparseVec& x) {
  require(m.cols() == x.dim(), "matvec", m.shape(), shape_of(x.dim()));
  DenseVec out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    double s = 0.0;
    for (const auto& e : x.entries()) s += row[e.index] * e.value;
    out[r] = s;
  }
  return out;
}

DenseVec matvec(const DenseMat& m, std::span<const double> x) {
  require(m.cols() == x.size(), "matvec", m.shape(), shape_of(x.size()));
  DenseVec out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), x);
  return out;
}

DenseVec matvec_transposed(const DenseMat& m, std::span<const double> x) {
  require(m.rows() == x.size(), "matvec_transposed", m.shape(), shape_of(x.size()));
  DenseVec out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) axpy(out, x[r], m.row(r));
  return out;
}

DenseMat outer(std::span<const double> u, std::span<const double> x) {
  DenseMat m(u.size(), x.size());
  add_outer(m, 1.0, u, x);
  return m;
}

DenseMat outer(std::span<const double> u, const SparseVec& x) {
  DenseMat m(u.size(), x.dim());
  add_outer(m, 1.0, u, x);
  return m;
}

void add_outer(DenseMat& m, double scale, std::span<const double> u, std::span<const double> x) {
  require(m.rows() == u.size() && m.cols() == x.size(), "add_outer", m.shape(),
          "(" + std::to_string(u.size()) + "x" + std::to_string(x.size()) + ")");
  for (std::size_t r = 0; r < m.rows(); ++r) axpy(m.row(r), scale * u[r], x);
}

void add_outer(DenseMat& m, double scale, std::span<const double> u, const SparseVec& x) {
  require(m.rows() == u.size() && m.cols() == x.dim(), "add_outer", m.shape(),
          "(" + std::to_string(u.size()) + "x" + std::to_string(x.dim()) + ")");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double s = scale * u[r];
    auto row = m.row(r);
    for (const auto& e : x.entries()) row[e.index] += s * e.value;
  }
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
  require(y.size() == x.size(), "axpy", shape_of(y.size()), shape_of(x.size()));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void axpy(DenseMat& y, double a, const DenseMat& x) {
  require(y.rows() == x.rows() && y.cols() == x.cols(), "axpy", y.shape(), x.shape());
  axpy(std::span<double>(y.data()), a, std::span<const double>(x.data()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot", shape_of(a.size()), shape_of(b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace dann
