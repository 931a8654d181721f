#include "dann/msda.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "dann/error.hpp"

namespace dann {

std::size_t MsdaModel::input_dim() const {
  return kept_features.empty() ? original_dim : kept_features.size();
}

SparseVec MsdaModel::project(const SparseVec& x) const {
  if (x.dim() != original_dim)
    throw DimensionError("msda: input dim " + std::to_string(x.dim()) + " vs model dim " +
                         std::to_string(original_dim));
  if (kept_features.empty()) return x;
  std::vector<SparseVec::Entry> out;
  auto it = kept_features.begin();
  for (const auto& e : x.entries()) {
    it = std::lower_bound(it, kept_features.end(), e.index);
    if (it == kept_features.end()) break;
    if (*it == e.index)
      out.push_back({static_cast<std::uint32_t>(it - kept_features.begin()), e.value});
  }
  return SparseVec(kept_features.size(), std::move(out));
}

namespace {

using Mat = Eigen::MatrixXd;

DenseMat fit_layer(const Mat& xbar, double p, double ridge) {
  const auto d1 = xbar.rows();
  const auto d = d1 - 1;
  Mat scatter = Mat::Zero(d1, d1);
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(xbar);
  scatter = scatter.selfadjointView<Eigen::Lower>();

  Eigen::VectorXd q = Eigen::VectorXd::Constant(d1, 1.0 - p);
  q(d) = 1.0;
  Mat Q = scatter.cwiseProduct(q * q.transpose());
  Q.diagonal() = q.cwiseProduct(scatter.diagonal());
  for (Eigen::Index i = 0; i < d; ++i) Q(i, i) += ridge;
  // P = S[0:d, :] ⊙ 1 qᵀ
  Mat P = scatter.topRows(d) * q.asDiagonal();

  Eigen::LDLT<Mat> ldlt(Q);
  const auto D = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || D.minCoeff() <= 1e-12 * std::max(D.maxCoeff(), 1e-300))
    throw NumericalError("msda: singular reconstruction system; use a positive ridge");
  const Mat Wt = ldlt.solve(P.transpose());  // (d+1) x d
  if (!Wt.allFinite()) throw NumericalError("msda: non-finite layer weights");

  DenseMat layer(static_cast<std::size_t>(d), static_cast<std::size_t>(d1));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d1; ++j) layer(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Wt(j, i);
  return layer;
}

// Same solution through Q = Δ̄ + U Uᵀ with U = diag(q) x̄ and
// Δ̄ = diag(p(1-p) S_ii + ridge, 0). The bias block is eliminated by a Schur
// complement and the remaining diagonal-plus-low-rank block by Woodbury, so
// Y = Q⁻¹ U costs O(d·n²) and W = X Yᵀ.
DenseMat fit_layer_low_rank(const Mat& xbar, double p, double ridge, Mat* pre) {
  const auto d1 = xbar.rows();
  const auto d = d1 - 1;
  const auto n = xbar.cols();
  const auto X = xbar.topRows(d);

  const Eigen::VectorXd delta = (p * (1.0 - p)) * X.rowwise().squaredNorm().array() + ridge;
  if (delta.minCoeff() <= 0.0) throw NumericalError("msda: singular reconstruction system; use a positive ridge");

  const Mat Ux = (1.0 - p) * X;
  const Mat DinvUx = Ux.array().colwise() / delta.array();
  Mat IK = Ux.transpose() * DinvUx;
  IK.diagonal().array() += 1.0;
  Eigen::LLT<Mat> llt(IK);
  if (llt.info() != Eigen::Success) throw NumericalError("msda: singular reconstruction system; use a positive ridge");
  const Mat G = llt.solve(DinvUx.transpose()).transpose();  // A⁻¹ U_x, d x n

  const Eigen::VectorXd g = G.rowwise().sum();   // A⁻¹ a
  const Eigen::VectorXd a = Ux.rowwise().sum();  // U_x 1
  const double schur = static_cast<double>(n) - a.dot(g);
  if (!(schur > 1e-12 * static_cast<double>(n)))
    throw NumericalError("msda: singular reconstruction system; use a positive ridge");
  const Eigen::RowVectorXd yb = (Eigen::RowVectorXd::Ones(n) - a.transpose() * G) / schur;
  const Mat Yx = G - g * yb;

  if (pre) *pre = X * (Yx.transpose() * X + yb.transpose() * Eigen::RowVectorXd::Ones(n));

  const Mat Wx = X * Yx.transpose();
  const Eigen::VectorXd wb = X * yb.transpose();
  if (!Wx.allFinite() || !wb.allFinite()) throw NumericalError("msda: non-finite layer weights");

  DenseMat layer(static_cast<std::size_t>(d), static_cast<std::size_t>(d1));
  for (Eigen::Index i = 0; i < d; ++i) {
    auto row = layer.row(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = Wx(i, j);
    row[static_cast<std::size_t>(d)] = wb(i);
  }
  return layer;
}

}  // namespace

MsdaModel msda_fit(std::span<const SparseVec> xs, const MsdaOptions& opts) {
  if (xs.empty()) throw DataError("msda_fit: no examples");
  if (!(opts.corruption > 0.0 && opts.corruption < 1.0))
    throw std::invalid_argument("msda_fit: corruption must lie in (0, 1)");
  if (opts.layers < 1) throw std::invalid_argument("msda_fit: need at least one layer");
  if (!(opts.ridge >= 0.0)) throw std::invalid_argument("msda_fit: ridge must be >= 0");

  MsdaModel model;
  model.original_dim = xs.front().dim();
  model.corruption = opts.corruption;
  model.ridge = opts.ridge;
  for (const auto& x : xs)
    if (x.dim() != model.original_dim) throw DimensionError("msda_fit: inconsistent input dims");

  if (opts.keep_features > 0 && opts.keep_features < model.original_dim) {
    std::vector<std::size_t> freq(model.original_dim, 0);
    for (const auto& x : xs)
      for (const auto& e : x.entries()) ++freq[e.index];
    std::vector<std::uint32_t> idx(model.original_dim);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return freq[a] > freq[b]; });
    idx.resize(opts.keep_features);
    std::sort(idx.begin(), idx.end());
    model.kept_features = std::move(idx);
  }

  const auto d = static_cast<Eigen::Index>(model.input_dim());
  const auto n = static_cast<Eigen::Index>(xs.size());
  Mat xbar = Mat::Zero(d + 1, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto x = model.project(xs[static_cast<std::size_t>(k)]);
    for (const auto& e : x.entries()) xbar(e.index, k) = e.value;
    xbar(d, k) = 1.0;
  }

  for (std::size_t layer = 0; layer < opts.layers; ++layer) {
    const bool low_rank =
        opts.solver == MsdaSolver::LowRank || (opts.solver == MsdaSolver::Auto && n < d);
    Mat pre;
    if (low_rank) {
      model.layers.push_back(fit_layer_low_rank(xbar, opts.corruption, opts.ridge, &pre));
    } else {
      model.layers.push_back(fit_layer(xbar, opts.corruption, opts.ridge));
      const auto& W = model.layers.back();
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Wm(
          W.data().data(), d, d + 1);
      pre = Wm * xbar;
    }
    xbar.topRows(d) = pre.array().tanh().matrix();
  }
  return model;
}

DenseVec msda_layer_linear(const DenseMat& layer, std::span<const double> x) {
  if (layer.cols() != x.size() + 1)
    throw DimensionError("msda layer " + layer.shape() + " vs input (" + std::to_string(x.size()) + ")");
  DenseVec out(layer.rows());
  for (std::size_t r = 0; r < layer.rows(); ++r) {
    const auto row = layer.row(r);
    out[r] = dot(row.first(x.size()), x) + row.back();
  }
  return out;
}

DenseVec msda_transform(const MsdaModel& m, const SparseVec& x) {
  const auto px = m.project(x);
  DenseVec out;
  out.reserve(m.output_dim());
  DenseVec cur = px.to_dense();
  out.insert(out.end(), cur.begin(), cur.end());
  for (const auto& layer : m.layers) {
    auto h = msda_layer_linear(layer, cur);
    for (auto& v : h) v = std::tanh(v);
    out.insert(out.end(), h.begin(), h.end());
    cur = std::move(h);
  }
  return out;
}

std::vector<SparseVec> msda_transform(const MsdaModel& m, std::span<const SparseVec> xs) {
  std::vector<SparseVec> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(SparseVec::from_dense(msda_transform(m, x)));
  return out;
}

}  // namespace dann
