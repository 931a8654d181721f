#include "dann/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dann/error.hpp"
#include "dann/rng.hpp"

namespace dann {

void LabeledSet::validate() const {
  if (x.size() != y.size()) throw DataError(name + ": example/label count mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] != 0 && y[i] != 1)
      throw DataError(name + ": label " + std::to_string(y[i]) + " at example " +
                      std::to_string(i) + " is not binary");
    if (x[i].dim() != dim)
      throw DataError(name + ": example " + std::to_string(i) + " has dim " +
                      std::to_string(x[i].dim()) + ", expected " + std::to_string(dim));
  }
}

void UnlabeledSet::validate() const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].dim() != dim)
      throw DataError(name + ": example " + std::to_string(i) + " has dim " +
                      std::to_string(x[i].dim()) + ", expected " + std::to_string(dim));
}

LabeledSet subset(const LabeledSet& set, const std::vector<std::size_t>& indices) {
  LabeledSet out{set.name, set.dim, {}, {}};
  out.x.reserve(indices.size());
  out.y.reserve(indices.size());
  for (auto i : indices) {
    out.x.push_back(set.x.at(i));
    out.y.push_back(set.y.at(i));
  }
  return out;
}

UnlabeledSet strip_labels(const LabeledSet& set) { return {set.name, set.dim, set.x}; }

// ---------------------------------------------------------------------------

void MoonsConfig::validate() const {
  if (n_per_moon < 1) throw std::invalid_argument("moons: n_per_moon must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("moons: radius must be > 0");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("moons: noise_sd must be >= 0");
  if (!std::isfinite(rotation_deg) || !std::isfinite(width) || !std::isfinite(offset))
    throw std::invalid_argument("moons: non-finite geometry");
}

namespace {

SparseVec point2(double a, double b) {
  const double v[2] = {a, b};
  return SparseVec::from_dense(v);
}

}  // namespace

LabeledSet sample_moons(const MoonsConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  LabeledSet out{"moons", 2, {}, {}};
  out.x.reserve(2 * cfg.n_per_moon);
  for (int label : {0, 1}) {
    for (std::size_t i = 0; i < cfg.n_per_moon; ++i) {
      const double t = rng.uniform(0.0, std::numbers::pi);
      double px, py;
      if (label == 1) {
        px = cfg.radius * std::cos(t);
        py = cfg.radius * std::sin(t);
      } else {
        px = cfg.width - cfg.radius * std::cos(t);
        py = cfg.offset - cfg.radius * std::sin(t);
      }
      if (cfg.noise_sd > 0.0) {
        px += cfg.noise_sd * rng.gauss();
        py += cfg.noise_sd * rng.gauss();
      }
      out.x.push_back(point2(px, py));
      out.y.push_back(label);
    }
  }
  return out;
}

std::pair<double, double> rotate_point(double x, double y, double cx, double cy, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double dx = x - cx, dy = y - cy;
  return {cx + c * dx - s * dy, cy + s * dx + c * dy};
}

LabeledSet rotate_about_centroid(const LabeledSet& set, double degrees) {
  if (set.dim != 2) throw DimensionError("rotate_about_centroid: expected 2D data");
  double cx = 0.0, cy = 0.0;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(set.size());
  for (const auto& x : set.x) {
    const auto d = x.to_dense();
    pts.emplace_back(d[0], d[1]);
    cx += d[0];
    cy += d[1];
  }
  cx /= static_cast<double>(set.size());
  cy /= static_cast<double>(set.size());
  LabeledSet out{set.name, 2, {}, set.y};
  out.x.reserve(set.size());
  for (auto [px, py] : pts) {
    auto [rx, ry] = rotate_point(px, py, cx, cy, degrees);
    out.x.push_back(point2(rx, ry));
  }
  return out;
}

MoonsData gen_moons(const MoonsConfig& cfg) {
  MoonsData data;
  data.source = sample_moons(cfg, cfg.seed);
  data.source.name = "moons-source";
  const auto tseed = cfg.target_seed.value_or(Rng::derive_seed(cfg.seed, 1));
  auto fresh = sample_moons(cfg, tseed);
  data.target_truth = rotate_about_centroid(fresh, cfg.rotation_deg);
  data.target_truth.name = "moons-target";
  data.target = strip_labels(data.target_truth);
  return data;
}

void write_moons_csv(const MoonsData& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "x1,x2,label,domain\n";
  auto emit = [&](const LabeledSet& set, int domain) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto d = set.x[i].to_dense();
      out << d[0] << ',' << d[1] << ',' << set.y[i] << ',' << domain << '\n';
    }
  };
  emit(data.source, 1);
  emit(data.target_truth, 0);
}

// ---------------------------------------------------------------------------

void WordShiftConfig::validate() const {
  if (n_per_domain < 2) throw std::invalid_argument("word shift: n_per_domain must be >= 2");
  if (shared_per_class < 1 || specific_per_class < 1)
    throw std::invalid_argument("word shift: sentiment vocabularies must be nonempty");
  const std::size_t fixed = 2 * shared_per_class + 4 * specific_per_class;
  if (dim < fixed + 2) throw std::invalid_argument("word shift: dim too small for the vocabulary layout");
  if (!(shared_purity >= 0.0 && shared_purity <= 1.0))
    throw std::invalid_argument("word shift: shared_purity in [0, 1]");
  if (!(label_noise >= 0.0 && label_noise < 0.5)) throw std::invalid_argument("word shift: label_noise in [0, 0.5)");
}

WordShiftData gen_word_shift(const WordShiftConfig& cfg) {
  cfg.validate();
  const std::size_t shared_base = 0;
  const std::size_t specific_base = 2 * cfg.shared_per_class;
  const std::size_t background_base = specific_base + 4 * cfg.specific_per_class;
  const std::size_t background_size = (cfg.dim - background_base) / 2;

  auto make = [&](int domain, std::uint64_t seed, const std::string& name) {
    Rng rng(seed);
    LabeledSet set{name, cfg.dim, {}, {}};
    for (std::size_t i = 0; i < cfg.n_per_domain; ++i) {
      const int y = static_cast<int>(i % 2);
      std::vector<std::uint32_t> words;
      auto draw = [&](std::size_t base, std::size_t size, std::size_t count) {
        for (std::size_t k = 0; k < count; ++k)
          words.push_back(static_cast<std::uint32_t>(base + rng.uniform_int(0, size - 1)));
      };
      for (std::size_t k = 0; k < cfg.shared_words; ++k) {
        const int cls = rng.uniform(0.0, 1.0) < cfg.shared_purity ? y : 1 - y;
        draw(shared_base + cls * cfg.shared_per_class, cfg.shared_per_class, 1);
      }
      draw(specific_base + (2 * domain + y) * cfg.specific_per_class, cfg.specific_per_class, cfg.specific_words);
      if (domain == 1) draw(specific_base + cfg.specific_per_class, cfg.specific_per_class, cfg.leak_words);
      draw(background_base + domain * background_size, background_size, cfg.background_words);
      std::sort(words.begin(), words.end());
      words.erase(std::unique(words.begin(), words.end()), words.end());
      std::vector<SparseVec::Entry> entries;
      entries.reserve(words.size());
      for (auto w : words) entries.push_back({w, 1.0});
      set.x.emplace_back(cfg.dim, std::move(entries));
      set.y.push_back(rng.uniform(0.0, 1.0) < cfg.label_noise ? 1 - y : y);
    }
    return set;
  };
  return {make(0, Rng::derive_seed(cfg.seed, 0), "synthetic-source"),
          make(1, Rng::derive_seed(cfg.seed, 1), "synthetic-target")};
}

// ---------------------------------------------------------------------------

bool SparseFile::all_labeled() const {
  return std::all_of(y.begin(), y.end(), [](int v) { return v >= 0; });
}

LabeledSet SparseFile::labeled(std::string name) const {
  if (!all_labeled()) throw DataError("sparse file contains unlabeled examples");
  LabeledSet out{std::move(name), dim, x, y};
  out.validate();
  return out;
}

UnlabeledSet SparseFile::unlabeled(std::string name) const {
  return {std::move(name), dim, x};
}

namespace {

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

SparseFile parse_sparse(std::istream& in) {
  SparseFile file;
  std::optional<std::size_t> header_dim;
  std::vector<std::vector<SparseVec::Entry>> rows;
  std::size_t max_index_plus_one = 0;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw DataError("line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      std::size_t n;
      if (hs >> key && key == "dim") {
        if (!(hs >> n)) fail("malformed dim header");
        header_dim = n;
      }
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    int label;
    if (!parse_number(tok, label) || label < -1 || label > 1) fail("bad label '" + tok + "'");
    std::vector<SparseVec::Entry> entries;
    std::optional<std::uint32_t> last;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail("expected idx:val, got '" + tok + "'");
      std::uint32_t idx;
      double val;
      if (!parse_number(std::string_view(tok).substr(0, colon), idx) ||
          !parse_number(std::string_view(tok).substr(colon + 1), val))
        fail("malformed pair '" + tok + "'");
      if (!std::isfinite(val)) fail("non-finite value");
      if (last && *last == idx) fail("duplicate index " + std::to_string(idx));
      if (last && *last > idx) fail("indices not ascending");
      last = idx;
      if (val == 0.0) continue;
      entries.push_back({idx, val});
      max_index_plus_one = std::max<std::size_t>(max_index_plus_one, std::size_t{idx} + 1);
    }
    rows.push_back(std::move(entries));
    file.y.push_back(label);
  }
  file.dim = header_dim.value_or(max_index_plus_one);
  if (file.dim < max_index_plus_one)
    throw DataError("dim header " + std::to_string(file.dim) + " smaller than max index + 1");
  file.x.reserve(rows.size());
  for (auto& r : rows) file.x.emplace_back(file.dim, std::move(r));
  return file;
}

SparseFile load_sparse(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return parse_sparse(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_sparse(std::ostream& out, const SparseFile& file) {
  out << "# dim " << file.dim << '\n';
  char buf[64];
  for (std::size_t i = 0; i < file.x.size(); ++i) {
    out << file.y[i];
    for (const auto& e : file.x[i].entries()) {
      auto res = std::to_chars(buf, buf + sizeof(buf), e.value);
      out << ' ' << e.index << ':' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void save_sparse(const SparseFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_sparse(out, file);
}

void save_sparse(const LabeledSet& set, const std::filesystem::path& path) {
  save_sparse(SparseFile{set.dim, set.x, set.y}, path);
}

void save_sparse(const UnlabeledSet& set, const std::filesystem::path& path) {
  save_sparse(SparseFile{set.dim, set.x, std::vector<int>(set.size(), -1)}, path);
}

// ---------------------------------------------------------------------------

Task make_task(const LabeledSet& source_pool, const LabeledSet& target_pool, std::size_t m,
               std::size_t m_prime, std::size_t val_target, std::uint64_t seed) {
  source_pool.validate();
  target_pool.validate();
  if (source_pool.dim != target_pool.dim)
    throw DimensionError("make_task: source dim " + std::to_string(source_pool.dim) +
                         " vs target dim " + std::to_string(target_pool.dim));
  if (source_pool.size() < m)
    throw DataError("make_task: source pool has " + std::to_string(source_pool.size()) +
                    " examples, need " + std::to_string(m));
  if (target_pool.size() <= m_prime + val_target)
    throw DataError("make_task: target pool of " + std::to_string(target_pool.size()) +
                    " leaves an empty test set");

  Task task;
  std::vector<std::size_t> sidx(source_pool.size());
  std::iota(sidx.begin(), sidx.end(), 0);
  Rng srng(Rng::derive_seed(seed, 0));
  srng.shuffle(std::span(sidx));
  task.source_indices.assign(sidx.begin(), sidx.begin() + static_cast<std::ptrdiff_t>(m));

  std::vector<std::size_t> tidx(target_pool.size());
  std::iota(tidx.begin(), tidx.end(), 0);
  Rng trng(Rng::derive_seed(seed, 1));
  trng.shuffle(std::span(tidx));
  auto it = tidx.begin();
  task.target_indices.assign(it, it + static_cast<std::ptrdiff_t>(m_prime));
  it += static_cast<std::ptrdiff_t>(m_prime);
  task.val_indices.assign(it, it + static_cast<std::ptrdiff_t>(val_target));
  it += static_cast<std::ptrdiff_t>(val_target);
  task.test_indices.assign(it, tidx.end());

  task.source = subset(source_pool, task.source_indices);
  task.target = strip_labels(subset(target_pool, task.target_indices));
  task.target_val = subset(target_pool, task.val_indices);
  task.target_test = subset(target_pool, task.test_indices);
  task.target_val.name = target_pool.name + "-val";
  task.target_test.name = target_pool.name + "-test";
  return task;
}

}  // namespace dann
