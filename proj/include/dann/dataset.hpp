#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dann/tensor.hpp"

namespace dann {

/// Labeled sample: examples x with binary labels y ∈ {0, 1}.
struct LabeledSet {
  std::string name;
  std::size_t dim = 0;
  std::vector<SparseVec> x;
  std::vector<int> y;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
  /// Throws DataError on label or dimension violations.
  void validate() const;
};

/// Unlabeled sample, e.g. the target domain at training time.
struct UnlabeledSet {
  std::string name;
  std::size_t dim = 0;
  std::vector<SparseVec> x;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
  void validate() const;
};

LabeledSet subset(const LabeledSet& set, const std::vector<std::size_t>& indices);
UnlabeledSet strip_labels(const LabeledSet& set);

// ---------------------------------------------------------------------------
// Inter-twinning moons

/// Parameters of the two-moons generator.
///
/// Upper moon (label 1): radius-`radius` half circle centred at the origin,
/// angles in [0, π]. Lower moon (label 0): same radius, centred at
/// (`width`, `offset`), angles in [π, 2π]. Angles are uniform, and
/// isotropic Gaussian noise with sd `noise_sd` is added to each point.
/// The target sample is a fresh draw rotated by `rotation_deg`
/// (counter-clockwise) about its own centroid.
///
/// noise_sd, radius, width, offset and the rotation centre are not fixed by
/// the original experiment; the values here are this project's defaults.
struct MoonsConfig {
  std::size_t n_per_moon = 150;
  double rotation_deg = 35.0;
  double noise_sd = 0.1;
  double radius = 1.0;
  double width = 1.0;
  double offset = 0.5;
  std::uint64_t seed = 1;
  /// Seed of the target draw; defaults to Rng::derive_seed(seed, 1).
  std::optional<std::uint64_t> target_seed;

  void validate() const;
};

struct MoonsData {
  LabeledSet source;
  UnlabeledSet target;
  LabeledSet target_truth;
};

/// Draws 2·n_per_moon labeled points (n_per_moon per class, lower moon
/// first) using `seed`.
LabeledSet sample_moons(const MoonsConfig& cfg, std::uint64_t seed);
MoonsData gen_moons(const MoonsConfig& cfg);

/// Rotates (x, y) about (cx, cy) counter-clockwise by `degrees`.
std::pair<double, double> rotate_point(double x, double y, double cx, double cy, double degrees);

/// Rotates every 2D example about the set's centroid.
LabeledSet rotate_about_centroid(const LabeledSet& set, double degrees);

/// CSV with header "x1,x2,label,domain"; domain 1 = source, 0 = target.
void write_moons_csv(const MoonsData& data, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic bag-of-words domains
//
// Vocabulary layout: shared sentiment words, per-domain sentiment words and
// per-domain background words. A document of class y mixes a few shared
// words of class y, several domain-specific words of class y and background
// words of its domain; features are binary. Each shared token comes from the
// document's class with probability shared_purity, else from the other class.
// Target documents of both classes also carry leak_words tokens from the
// source's positive-class vocabulary.

struct WordShiftConfig {
  std::size_t dim = 5000;
  std::size_t n_per_domain = 2500;
  std::size_t shared_per_class = 25;    // shared sentiment words per class
  std::size_t specific_per_class = 50;  // domain-specific sentiment words per class
  std::size_t shared_words = 2;         // shared sentiment tokens per document
  double shared_purity = 0.75;          // chance a shared token matches the class
  std::size_t specific_words = 6;       // domain-specific sentiment tokens per document
  std::size_t background_words = 30;
  std::size_t leak_words = 2;           // source positive-class tokens in every target document
  double label_noise = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct WordShiftData {
  LabeledSet source;
  LabeledSet target;
};

/// Two labeled pools of n_per_domain documents each.
WordShiftData gen_word_shift(const WordShiftConfig& cfg);

// ---------------------------------------------------------------------------
// Sparse text format
//
// One example per line: "<label> <idx>:<val> <idx>:<val> ...", indices
// 0-based ascending, label -1 for unlabeled examples. An optional header
// line "# dim <n>" fixes the dimension; otherwise it is max index + 1.

struct SparseFile {
  std::size_t dim = 0;
  std::vector<SparseVec> x;
  std::vector<int> y;  // -1 = unlabeled

  bool all_labeled() const;
  /// Throws DataError if any example is unlabeled.
  LabeledSet labeled(std::string name = {}) const;
  UnlabeledSet unlabeled(std::string name = {}) const;
};

SparseFile parse_sparse(std::istream& in);
SparseFile load_sparse(const std::filesystem::path& path);
void write_sparse(std::ostream& out, const SparseFile& file);
void save_sparse(const SparseFile& file, const std::filesystem::path& path);
void save_sparse(const LabeledSet& set, const std::filesystem::path& path);
void save_sparse(const UnlabeledSet& set, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Task construction

struct Task {
  LabeledSet source;         // S, m labeled examples
  UnlabeledSet target;       // T, m' unlabeled examples
  LabeledSet target_val;     // labeled target examples for model selection
  LabeledSet target_test;    // the rest of the target pool
  std::vector<std::size_t> source_indices;
  std::vector<std::size_t> target_indices;
  std::vector<std::size_t> val_indices;
  std::vector<std::size_t> test_indices;
};

/// Splits a labeled source pool and a labeled target pool into a domain
/// adaptation task. Target subsets are disjoint; the test set must be
/// nonempty.
Task make_task(const LabeledSet& source_pool, const LabeledSet& target_pool, std::size_t m,
               std::size_t m_prime, std::size_t val_target, std::uint64_t seed);

}  // namespace dann
