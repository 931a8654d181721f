#include "dann/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dann/error.hpp"

namespace dann {

double AxisRange::at(std::size_t i) const {
  if (steps <= 1) return min;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

Region bounding_region(std::span<const SparseVec> points, std::size_t steps, double inflate) {
  if (points.empty()) throw DataError("bounding_region: no points");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& p : points) {
    if (p.dim() != 2) throw DimensionError("bounding_region: expected 2D points");
    const auto d = p.to_dense();
    x0 = std::min(x0, d[0]);
    x1 = std::max(x1, d[0]);
    y0 = std::min(y0, d[1]);
    y1 = std::max(y1, d[1]);
  }
  const double px = std::max(x1 - x0, 1e-9) * inflate / 2.0;
  const double py = std::max(y1 - y0, 1e-9) * inflate / 2.0;
  return {{x0 - px, x1 + px, steps}, {y0 - py, y1 + py, steps}};
}

namespace {

template <typename F>
Grid2D eval_grid(const DannParams& p, const Region& region, F&& value_at) {
  if (p.input_dim() != 2)
    throw DimensionError("grid: model input dim is " + std::to_string(p.input_dim()) + ", expected 2");
  if (!(region.x.min < region.x.max) || !(region.y.min < region.y.max) || region.x.steps < 2 ||
      region.y.steps < 2)
    throw std::invalid_argument("grid: invalid region");
  Grid2D g{region.x, region.y, DenseMat(region.y.steps, region.x.steps)};
  for (std::size_t r = 0; r < region.y.steps; ++r)
    for (std::size_t c = 0; c < region.x.steps; ++c) {
      const double pt[2] = {region.x.at(c), region.y.at(r)};
      g.values(r, c) = value_at(SparseVec::from_dense(pt));
    }
  return g;
}

}  // namespace

Grid2D label_boundary_grid(const DannParams& p, const Region& region) {
  return eval_grid(p, region, [&](const SparseVec& x) {
    return forward_output(p, forward_hidden(p, x))[1];
  });
}

Grid2D domain_boundary_grid(const DannParams& p, const Region& region) {
  return eval_grid(p, region, [&](const SparseVec& x) {
    return domain_regressor(p, forward_hidden(p, x));
  });
}

EigenResult jacobi_eigen(const DenseMat& sym, double tol, std::size_t max_sweeps) {
  const std::size_t n = sym.rows();
  if (sym.cols() != n) throw DimensionError("jacobi_eigen: matrix " + sym.shape() + " is not square");
  DenseMat a = sym;
  DenseMat v = DenseMat::identity(n);
  const double total = std::sqrt(dot(a.data(), a.data()));
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  EigenResult res;
  while (res.sweeps < max_sweeps && off_norm() > tol * std::max(total, 1e-300)) {
    ++res.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  res.values.resize(n);
  res.vectors = DenseMat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    res.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) res.vectors(r, k) = v(r, order[k]);
  }
  return res;
}

Pca2D pca2d(std::span<const DenseVec> points) {
  if (points.size() < 3) throw DataError("pca: need at least 3 points");
  const std::size_t dim = points.front().size();
  if (dim < 2) throw DimensionError("pca: need at least 2 dimensions");
  Pca2D out;
  out.mean.assign(dim, 0.0);
  for (const auto& pt : points) {
    if (pt.size() != dim) throw DimensionError("pca: inconsistent point dims");
    axpy(out.mean, 1.0, pt);
  }
  const double n = static_cast<double>(points.size());
  for (auto& m : out.mean) m /= n;

  DenseMat cov(dim, dim);
  DenseVec centred(dim);
  for (const auto& pt : points) {
    for (std::size_t k = 0; k < dim; ++k) centred[k] = pt[k] - out.mean[k];
    add_outer(cov, 1.0 / n, centred, centred);
  }
  const auto eig = jacobi_eigen(cov);
  if (!(eig.values[0] > 1e-15)) throw NumericalError("pca: representation has zero variance");

  for (std::size_t k = 0; k < 2; ++k) {
    DenseVec comp(dim);
    for (std::size_t r = 0; r < dim; ++r) comp[r] = eig.vectors(r, k);
    const auto big = std::max_element(comp.begin(), comp.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*big < 0.0)
      for (auto& c : comp) c = -c;
    out.components.push_back(std::move(comp));
    out.explained_variance.push_back(std::max(eig.values[k], 0.0));
  }
  out.projected.reserve(points.size());
  for (const auto& pt : points) {
    for (std::size_t k = 0; k < dim; ++k) centred[k] = pt[k] - out.mean[k];
    out.projected.push_back({dot(centred, out.components[0]), dot(centred, out.components[1]), 1, -1});
  }
  return out;
}

Pca2D pca_embed(const DannParams& p, const LabeledSet& source, const UnlabeledSet& target,
                std::span<const int> target_labels) {
  if (!target_labels.empty() && target_labels.size() != target.size())
    throw DimensionError("pca_embed: target label count mismatch");
  std::vector<DenseVec> reps;
  reps.reserve(source.size() + target.size());
  for (const auto& x : source.x) reps.push_back(forward_hidden(p, x));
  for (const auto& x : target.x) reps.push_back(forward_hidden(p, x));
  auto out = pca2d(reps);
  for (std::size_t i = 0; i < out.projected.size(); ++i) {
    if (i < source.size()) {
      out.projected[i].domain = 1;
      out.projected[i].label = source.y[i];
    } else {
      out.projected[i].domain = 0;
      out.projected[i].label = target_labels.empty() ? -1 : target_labels[i - source.size()];
    }
  }
  return out;
}

std::vector<LevelSet> hidden_level_sets(const DannParams& p) {
  if (p.input_dim() != 2)
    throw DimensionError("hidden_level_sets: model input dim is " + std::to_string(p.input_dim()));
  std::vector<LevelSet> out;
  for (std::size_t i = 0; i < p.hidden_size(); ++i) {
    LevelSet s{i, p.W(i, 0), p.W(i, 1), p.b[i], false};
    s.degenerate = s.a == 0.0 && s.b == 0.0;
    out.push_back(s);
  }
  return out;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

void write_grid_csv(const Grid2D& grid, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "x,y,value\n";
  for (std::size_t r = 0; r < grid.values.rows(); ++r)
    for (std::size_t c = 0; c < grid.values.cols(); ++c)
      out << grid.x_range.at(c) << ',' << grid.y_range.at(r) << ',' << grid.values(r, c) << '\n';
}

void write_pca_csv(const Pca2D& pca, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "pc1,pc2,domain,label\n";
  for (const auto& pt : pca.projected)
    out << pt.pc1 << ',' << pt.pc2 << ',' << pt.domain << ',' << pt.label << '\n';
}

void write_levelsets_csv(const std::vector<LevelSet>& sets, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "neuron_id,a,b,c,degenerate\n";
  for (const auto& s : sets)
    out << s.neuron << ',' << s.a << ',' << s.b << ',' << s.c << ',' << (s.degenerate ? 1 : 0) << '\n';
}

}  // namespace dann
