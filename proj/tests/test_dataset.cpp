#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "dann/dataset.hpp"
#include "dann/error.hpp"
#include "dann/rng.hpp"

using namespace dann;

namespace {

std::pair<double, double> xy(const SparseVec& v) {
  const auto d = v.to_dense();
  return {d[0], d[1]};
}

std::pair<double, double> centroid(const LabeledSet& s) {
  double cx = 0, cy = 0;
  for (const auto& x : s.x) {
    auto [a, b] = xy(x);
    cx += a;
    cy += b;
  }
  return {cx / s.size(), cy / s.size()};
}

std::string expect_data_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_sparse(in);
  } catch (const DataError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST_CASE("moons sizes and class balance") {
  MoonsConfig cfg;
  const auto d = gen_moons(cfg);
  CHECK(d.source.size() == 300);
  CHECK(d.target.size() == 300);
  CHECK(d.target_truth.size() == 300);
  CHECK(std::count(d.source.y.begin(), d.source.y.end(), 1) == 150);
  CHECK(std::count(d.target_truth.y.begin(), d.target_truth.y.end(), 1) == 150);
  CHECK(d.source.dim == 2);
  CHECK_NOTHROW(d.source.validate());
}

TEST_CASE("noise-free moons lie on their half circles") {
  MoonsConfig cfg;
  cfg.noise_sd = 0.0;
  const auto s = sample_moons(cfg, 3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto [x, y] = xy(s.x[i]);
    if (s.y[i] == 1) {
      CHECK(std::hypot(x, y) == doctest::Approx(cfg.radius));
      CHECK(y >= -1e-12);
    } else {
      CHECK(std::hypot(x - cfg.width, y - cfg.offset) == doctest::Approx(cfg.radius));
      CHECK(y <= cfg.offset + 1e-12);
    }
  }
}

TEST_CASE("target is a fresh draw rotated about its centroid") {
  MoonsConfig cfg;
  const auto d = gen_moons(cfg);
  const auto fresh = sample_moons(cfg, Rng::derive_seed(cfg.seed, 1));
  auto [cx, cy] = centroid(fresh);
  auto [tx, ty] = centroid(d.target_truth);
  CHECK(tx == doctest::Approx(cx).epsilon(1e-12));
  CHECK(ty == doctest::Approx(cy).epsilon(1e-12));
  const double rad = cfg.rotation_deg * M_PI / 180.0;
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    auto [fx, fy] = xy(fresh.x[i]);
    auto [rx, ry] = xy(d.target_truth.x[i]);
    CHECK(rx == doctest::Approx(cx + std::cos(rad) * (fx - cx) - std::sin(rad) * (fy - cy)));
    CHECK(ry == doctest::Approx(cy + std::sin(rad) * (fx - cx) + std::cos(rad) * (fy - cy)));
    CHECK(std::hypot(rx - cx, ry - cy) == doctest::Approx(std::hypot(fx - cx, fy - cy)));
    CHECK(d.target_truth.y[i] == fresh.y[i]);
  }
  CHECK_FALSE(d.source.x == fresh.x);
}

TEST_CASE("rotation preserves pairwise distances and composes") {
  auto [x1, y1] = rotate_point(1.0, 0.0, 0.0, 0.0, 90.0);
  CHECK(x1 == doctest::Approx(0.0).scale(1.0));
  CHECK(y1 == doctest::Approx(1.0));
  auto [a, b] = rotate_point(2.0, 3.0, 1.0, 1.0, 35.0);
  auto [c, d] = rotate_point(a, b, 1.0, 1.0, -35.0);
  CHECK(c == doctest::Approx(2.0));
  CHECK(d == doctest::Approx(3.0));
  MoonsConfig cfg;
  const auto s = sample_moons(cfg, 5);
  const auto r = rotate_about_centroid(s, 35.0);
  for (std::size_t i = 0; i + 1 < s.size(); i += 17) {
    auto [p, q] = xy(s.x[i]);
    auto [u, v] = xy(s.x[i + 1]);
    auto [rp, rq] = xy(r.x[i]);
    auto [ru, rv] = xy(r.x[i + 1]);
    CHECK(std::hypot(rp - ru, rq - rv) == doctest::Approx(std::hypot(p - u, q - v)));
  }
}

TEST_CASE("moons are deterministic and honour an explicit target seed") {
  MoonsConfig cfg;
  cfg.seed = 9;
  CHECK(gen_moons(cfg).source.x == gen_moons(cfg).source.x);
  cfg.target_seed = 123;
  const auto d = gen_moons(cfg);
  CHECK(d.target_truth.x == rotate_about_centroid(sample_moons(cfg, 123), cfg.rotation_deg).x);
  cfg.n_per_moon = 0;
  CHECK_THROWS_AS(gen_moons(cfg), std::invalid_argument);
}

TEST_CASE("sparse format round trip is exact") {
  SparseFile f;
  f.dim = 10;
  f.x = {SparseVec(10, {{0, 0.1}, {7, -3.25e-7}}), SparseVec(10), SparseVec(10, {{9, 1.0 / 3.0}})};
  f.y = {1, -1, 0};
  std::stringstream ss;
  write_sparse(ss, f);
  const auto g = parse_sparse(ss);
  CHECK(g.dim == 10);
  CHECK(g.x == f.x);
  CHECK(g.y == f.y);
  CHECK_FALSE(g.all_labeled());
  CHECK_THROWS_AS(g.labeled(), DataError);
  CHECK(g.unlabeled().size() == 3);

  const auto path = std::filesystem::temp_directory_path() / "dann_sparse_roundtrip.txt";
  save_sparse(f, path);
  CHECK(load_sparse(path).x == f.x);
  std::filesystem::remove(path);
}

TEST_CASE("sparse parser infers the dimension and skips zeros and comments") {
  std::istringstream in("# comment\n1 0:1 4:2\n\n0 2:0 3:5\n");
  const auto f = parse_sparse(in);
  CHECK(f.dim == 5);
  CHECK(f.x.size() == 2);
  CHECK(f.x[1].nnz() == 1);
  CHECK(f.all_labeled());
}

TEST_CASE("sparse parser errors carry line numbers") {
  CHECK(expect_data_error("1 0:1\n2 1:1\n").find("line 2") != std::string::npos);
  CHECK(expect_data_error("1 0:1\n1 3:1 2:1\n").find("line 2") != std::string::npos);
  CHECK(expect_data_error("1 0:1 0:2\n").find("duplicate") != std::string::npos);
  CHECK(expect_data_error("1 1:0 1:3\n").find("duplicate") != std::string::npos);
  CHECK(expect_data_error("1 0-1\n").find("line 1") != std::string::npos);
  CHECK(expect_data_error("1 0:abc\n").find("line 1") != std::string::npos);
  CHECK(expect_data_error("1 0:nan\n") != "no error");
  CHECK(expect_data_error("# dim 2\n1 5:1\n") != "no error");
  CHECK(expect_data_error("x 0:1\n") != "no error");
  CHECK_THROWS_AS(load_sparse("/nonexistent/file.txt"), DataError);
}

TEST_CASE("make_task produces disjoint target subsets of the requested sizes") {
  LabeledSet src{"src", 3, {}, {}}, tgt{"tgt", 3, {}, {}};
  for (int i = 0; i < 50; ++i) {
    src.x.push_back(SparseVec(3, {{0, i + 1.0}}));
    src.y.push_back(i % 2);
  }
  for (int i = 0; i < 40; ++i) {
    tgt.x.push_back(SparseVec(3, {{1, i + 1.0}}));
    tgt.y.push_back(i % 2);
  }
  const auto t = make_task(src, tgt, 30, 20, 5, 7);
  CHECK(t.source.size() == 30);
  CHECK(t.target.size() == 20);
  CHECK(t.target_val.size() == 5);
  CHECK(t.target_test.size() == 15);
  std::set<std::size_t> all;
  for (auto v : {&t.target_indices, &t.val_indices, &t.test_indices}) all.insert(v->begin(), v->end());
  CHECK(all.size() == 40);
  std::set<std::size_t> srcset(t.source_indices.begin(), t.source_indices.end());
  CHECK(srcset.size() == 30);
  for (std::size_t i = 0; i < t.val_indices.size(); ++i) CHECK(t.target_val.x[i] == tgt.x[t.val_indices[i]]);

  const auto again = make_task(src, tgt, 30, 20, 5, 7);
  CHECK(again.test_indices == t.test_indices);
  CHECK_THROWS_AS(make_task(src, tgt, 30, 30, 10, 7), DataError);
  CHECK_THROWS_AS(make_task(src, tgt, 60, 10, 5, 7), DataError);
  LabeledSet other{"o", 4, {SparseVec(4)}, {0}};
  CHECK_THROWS_AS(make_task(src, other, 1, 0, 0, 7), DimensionError);
}

TEST_CASE("labeled sets validate labels and dimensions") {
  LabeledSet s{"s", 2, {SparseVec(2), SparseVec(2)}, {0, 2}};
  CHECK_THROWS_AS(s.validate(), DataError);
  s.y = {0};
  CHECK_THROWS_AS(s.validate(), DataError);
  s.y = {0, 1};
  s.x[1] = SparseVec(3);
  CHECK_THROWS_AS(s.validate(), DataError);
  const auto sub = subset(LabeledSet{"t", 1, {SparseVec(1, {{0, 1.0}}), SparseVec(1, {{0, 2.0}})}, {0, 1}}, {1});
  CHECK(sub.y == std::vector<int>{1});
  CHECK(sub.x[0].entries()[0].value == 2.0);
}

TEST_CASE("word-shift domains use disjoint background vocabularies") {
  WordShiftConfig cfg;
  cfg.n_per_domain = 200;
  const auto d = gen_word_shift(cfg);
  CHECK(d.source.size() == 200);
  CHECK(d.target.size() == 200);
  CHECK(d.source.dim == 5000);
  std::set<std::uint32_t> vs, vt;
  for (const auto& x : d.source.x)
    for (const auto& e : x.entries()) {
      vs.insert(e.index);
      CHECK(e.value == 1.0);
    }
  for (const auto& x : d.target.x)
    for (const auto& e : x.entries()) vt.insert(e.index);
  std::vector<std::uint32_t> common;
  std::set_intersection(vs.begin(), vs.end(), vt.begin(), vt.end(), std::back_inserter(common));
  // Shared sentiment words plus the leaked source positive-class words.
  CHECK(std::all_of(common.begin(), common.end(), [&](std::uint32_t w) {
    return w < 2 * cfg.shared_per_class ||
           (w >= 2 * cfg.shared_per_class + cfg.specific_per_class && w < 2 * cfg.shared_per_class + 2 * cfg.specific_per_class);
  }));
  const auto d2 = gen_word_shift(cfg);
  CHECK(d2.target.x == d.target.x);
  cfg.dim = 10;
  CHECK_THROWS_AS(gen_word_shift(cfg), std::invalid_argument);
}
