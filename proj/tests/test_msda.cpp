#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dann/error.hpp"
#include "dann/msda.hpp"
#include "dann/rng.hpp"

using namespace dann;

namespace {

// Correlated nonnegative data: x = max(0, B z + noise) with a low-dimensional z.
std::vector<SparseVec> correlated(Rng& rng, std::size_t n, std::size_t d, std::size_t k, const DenseMat& B) {
  std::vector<SparseVec> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z(k), x(d);
    for (auto& v : z) v = rng.gauss();
    for (std::size_t j = 0; j < d; ++j) {
      double a = 0.05 * rng.gauss();
      for (std::size_t t = 0; t < k; ++t) a += B(j, t) * z[t];
      x[j] = std::max(0.0, a);
    }
    out.push_back(SparseVec::from_dense(x));
  }
  return out;
}

DenseMat random_basis(Rng& rng, std::size_t d, std::size_t k) {
  DenseMat B(d, k);
  for (auto& v : B.data()) v = rng.gauss();
  return B;
}

// Closed-form layer assembled entry by entry and solved with full-pivot LU.
Eigen::MatrixXd reference_layer(const std::vector<SparseVec>& xs, double p, double ridge) {
  const auto d = static_cast<Eigen::Index>(xs.front().dim());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d + 1, d + 1);
  for (const auto& x : xs) {
    Eigen::VectorXd xb(d + 1);
    const auto dense = x.to_dense();
    for (Eigen::Index j = 0; j < d; ++j) xb(j) = dense[static_cast<std::size_t>(j)];
    xb(d) = 1.0;
    S += xb * xb.transpose();
  }
  Eigen::VectorXd q = Eigen::VectorXd::Constant(d + 1, 1.0 - p);
  q(d) = 1.0;
  Eigen::MatrixXd Q(d + 1, d + 1), P(d, d + 1);
  for (Eigen::Index i = 0; i <= d; ++i)
    for (Eigen::Index j = 0; j <= d; ++j) Q(i, j) = i == j ? S(i, i) * q(i) : S(i, j) * q(i) * q(j);
  for (Eigen::Index i = 0; i < d; ++i) Q(i, i) += ridge;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j <= d; ++j) P(i, j) = S(i, j) * q(j);
  return Q.transpose().fullPivLu().solve(P.transpose()).transpose();
}

double max_rel_diff(const DenseMat& a, const Eigen::MatrixXd& b) {
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      scale = std::max(scale, std::abs(b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      diff = std::max(diff, std::abs(a(i, j) - b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  return diff / std::max(scale, 1e-300);
}

double max_rel_diff(const DenseMat& a, const DenseMat& b) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b(i, j);
  return max_rel_diff(a, e);
}

}  // namespace

TEST_CASE("first layer matches the entrywise closed form") {
  Rng rng(1);
  const auto B = random_basis(rng, 8, 3);
  const auto xs = correlated(rng, 60, 8, 3, B);
  for (auto solver : {MsdaSolver::Dense, MsdaSolver::LowRank}) {
    const auto m = msda_fit(xs, {0.3, 1, 1e-5, 0, solver});
    CHECK(max_rel_diff(m.layers[0], reference_layer(xs, 0.3, 1e-5)) < 1e-8);
  }
}

TEST_CASE("low-rank and dense solvers agree when examples are scarce") {
  Rng rng(2);
  const auto B = random_basis(rng, 30, 4);
  const auto xs = correlated(rng, 12, 30, 4, B);
  const auto dense = msda_fit(xs, {0.5, 3, 1e-3, 0, MsdaSolver::Dense});
  const auto low = msda_fit(xs, {0.5, 3, 1e-3, 0, MsdaSolver::LowRank});
  REQUIRE(dense.num_layers() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(max_rel_diff(low.layers[k], dense.layers[k]) < 1e-7);
}

TEST_CASE("vanishing corruption reconstructs the training data") {
  Rng rng(3);
  const auto B = random_basis(rng, 6, 6);
  const auto xs = correlated(rng, 80, 6, 6, B);
  const auto m = msda_fit(xs, {1e-9, 1, 1e-9, 0, MsdaSolver::Dense});
  for (const auto& x : xs) {
    const auto dense = x.to_dense();
    const auto r = msda_layer_linear(m.layers[0], dense);
    for (std::size_t j = 0; j < dense.size(); ++j) CHECK(r[j] == doctest::Approx(dense[j]).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("learned layer denoises better than the identity") {
  Rng rng(4);
  const double p = 0.5;
  int wins = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const auto B = random_basis(rng, 15, 3);
    const auto train_x = correlated(rng, 300, 15, 3, B);
    const auto m = msda_fit(train_x, {p, 1, 1e-5, 0});
    const auto test_x = correlated(rng, 200, 15, 3, B);
    double err_layer = 0.0, err_identity = 0.0;
    for (const auto& x : test_x) {
      const auto clean = x.to_dense();
      auto noisy = clean;
      for (auto& v : noisy)
        if (rng.uniform(0, 1) < p) v = 0.0;
      const auto r = msda_layer_linear(m.layers[0], noisy);
      for (std::size_t j = 0; j < clean.size(); ++j) {
        err_layer += (r[j] - clean[j]) * (r[j] - clean[j]);
        err_identity += (noisy[j] - clean[j]) * (noisy[j] - clean[j]);
      }
    }
    wins += err_layer < err_identity;
  }
  CHECK(wins >= 19);
}

TEST_CASE("output layout: raw input followed by bounded layer outputs") {
  Rng rng(5);
  const auto B = random_basis(rng, 7, 2);
  const auto xs = correlated(rng, 40, 7, 2, B);
  const auto m = msda_fit(xs, {0.5, 3, 1e-5, 0});
  CHECK(m.output_dim() == 28);
  for (const auto& x : xs) {
    const auto z = msda_transform(m, x);
    REQUIRE(z.size() == 28);
    const auto raw = x.to_dense();
    for (std::size_t j = 0; j < 7; ++j) CHECK(z[j] == raw[j]);
    for (std::size_t j = 7; j < 28; ++j) CHECK(std::abs(z[j]) < 1.0);
  }
  const auto batch = msda_transform(m, std::span<const SparseVec>(xs));
  CHECK(batch.size() == xs.size());
  CHECK(batch[0].dim() == 28);
  CHECK(batch[3].to_dense() == msda_transform(m, xs[3]));
}

TEST_CASE("feature truncation keeps the most frequent features") {
  std::vector<SparseVec> xs;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x(6, 0.0);
    x[1] = 1.0;                  // always present
    if (i % 2) x[4] = 2.0;       // half the time
    if (i % 5 == 0) x[0] = 1.0;  // rarely
    if (i % 3 == 0) x[5] = 1.0;
    xs.push_back(SparseVec::from_dense(x));
  }
  const auto m = msda_fit(xs, {0.5, 2, 1e-3, 3});
  CHECK(m.kept_features == std::vector<std::uint32_t>{1, 4, 5});
  CHECK(m.input_dim() == 3);
  CHECK(m.output_dim() == 9);
  const auto z = msda_transform(m, xs[1]);
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 2.0);
  CHECK(z[2] == 0.0);
}

TEST_CASE("singular systems raise NumericalError") {
  std::vector<SparseVec> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(SparseVec::from_dense(std::vector<double>{1.0 + i, 0.0, 2.0}));
  CHECK_THROWS_AS(msda_fit(xs, {0.5, 1, 0.0, 0, MsdaSolver::Dense}), NumericalError);
  CHECK_THROWS_AS(msda_fit(xs, {0.5, 1, 0.0, 0, MsdaSolver::LowRank}), NumericalError);
  CHECK_NOTHROW(msda_fit(xs, {0.5, 1, 1e-3, 0}));
}

TEST_CASE("argument and dimension errors") {
  std::vector<SparseVec> xs{SparseVec::from_dense(std::vector<double>{1.0, 2.0})};
  CHECK_THROWS_AS(msda_fit({}, MsdaOptions{}), DataError);
  CHECK_THROWS_AS(msda_fit(xs, {0.0, 1, 1e-5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(msda_fit(xs, {1.0, 1, 1e-5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(msda_fit(xs, {0.5, 0, 1e-5, 0}), std::invalid_argument);
  const auto m = msda_fit(xs, {0.5, 1, 1e-3, 0});
  CHECK_THROWS_AS(msda_transform(m, SparseVec(3)), DimensionError);
  CHECK_THROWS_AS(msda_layer_linear(m.layers[0], std::vector<double>{1, 2, 3}), DimensionError);
}
