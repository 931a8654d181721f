#pragma once

// Experiment orchestration: task construction, hyper-parameter grid search
// with selection on a small labeled target validation set, PAD sweeps over
// several representations, result tables, and the end-to-end moons run.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dann/dataset.hpp"
#include "dann/divergence.hpp"
#include "dann/msda.hpp"
#include "dann/network.hpp"
#include "dann/serialize.hpp"

namespace dann {

/// Where the data of an experiment comes from.
struct TaskSpec {
  enum class Kind { Moons, Pair, Amazon };
  Kind kind = Kind::Moons;

  MoonsConfig moons;
  std::size_t moons_val_size = 100;  // fresh labeled target draw for selection

  // Pair: one labeled pool per domain in the sparse text format.
  std::filesystem::path source_path;
  std::filesystem::path target_path;
  // Amazon: <data_dir>/<domain>.txt for every ordered pair of domains.
  std::filesystem::path data_dir;
  std::vector<std::string> domains{"books", "dvd", "electronics", "kitchen"};

  std::size_t m = 2000;
  std::size_t m_prime = 2000;
  std::size_t val_target = 100;
};

enum class Algorithm { Dann, Nn, Svm };
enum class Representation { Raw, Msda };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);
std::string to_string(Representation r);
Representation representation_from_string(const std::string& s);

std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct ExperimentConfig {
  TaskSpec task;
  Algorithm algorithm = Algorithm::Dann;
  Representation representation = Representation::Raw;
  std::vector<double> lambda_grid = log_grid(1e-2, 1.0, 9);
  std::vector<std::size_t> hidden_grid{1, 5, 12, 25, 50, 75, 100, 150, 200};
  std::vector<double> c_grid = log_grid(1e-5, 1.0, 10);
  double alpha = 1e-3;
  double alpha_msda = 1e-4;
  std::size_t max_epochs = 500;
  std::size_t patience = 10;
  std::size_t svm_epochs = 50;
  std::vector<std::uint64_t> seeds{0};
  std::size_t jobs = 1;
  std::filesystem::path output_dir = "out";
  MsdaOptions msda;

  // PAD sweep
  std::size_t pad_hidden = 100;
  double pad_lambda = 0.31;
  bool pad_include_msda = false;

  void validate() const;
  /// Learning rate for the configured representation.
  double effective_alpha() const { return representation == Representation::Msda ? alpha_msda : alpha; }
};

json experiment_to_json(const ExperimentConfig& cfg);
/// Missing fields keep their defaults.
ExperimentConfig experiment_from_json(const json& j);

/// A concrete domain adaptation task after splitting.
struct NamedTask {
  std::string name;  // "source → target"
  Task task;
};

/// Materializes every task of `spec` for the given seed.
std::vector<NamedTask> resolve_tasks(const TaskSpec& spec, std::uint64_t seed);

/// Applies an mSDA map fitted on S ∪ T to every subset of the task.
Task msda_task(const Task& task, const MsdaOptions& opts, MsdaModel* fitted = nullptr);

struct ResultRow {
  std::string task;
  std::string algorithm;
  std::string representation;
  std::optional<std::size_t> hidden;
  std::optional<double> lambda;
  std::optional<double> C;
  double val_risk = 0.0;
  double test_risk = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const ResultRow&) const = default;
};

/// One trained grid cell.
struct CellLog {
  std::string task;
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::optional<std::size_t> hidden;
  std::optional<double> lambda;
  std::optional<double> C;
  double val_risk = 1.0;
  bool ok = true;
  std::string error;
};

struct GridResult {
  std::vector<ResultRow> rows;
  std::vector<CellLog> cells;
};

/// Trains every grid cell for every task and seed, selects the cell with the
/// lowest target-validation risk (ties: smaller l, then smaller λ, then
/// smaller C) and evaluates it once on the target test set. Failed cells are
/// logged and skipped.
GridResult run_grid(const ExperimentConfig& cfg);

/// PAD for raw data, the NN representation and the DANN representation
/// (pad_hidden units, DANN at pad_lambda), plus mSDA and mSDA+DANN when
/// enabled. One report per (task, representation, seed).
struct PadSweepRow {
  std::string task;
  std::uint64_t seed = 0;
  PadReport report;
};
std::vector<PadSweepRow> run_pad_sweep(const ExperimentConfig& cfg);

struct Table {
  std::string text;
  std::string csv;
};

inline constexpr const char* kResultsHeader = "task,algo,repr,l,lambda,C,val_risk,test_risk,seed";

/// Fixed columns: task, algo, repr, l, lambda, C, val_risk, test_risk, seed.
Table emit_table(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(const std::string& csv);
std::string cells_csv(const std::vector<CellLog>& cells);
/// Columns: representation_tag, task, pad
std::string pad_csv(const std::vector<PadSweepRow>& rows);

// ---------------------------------------------------------------------------
// Moons pipeline: generate → train → analyze → PAD, written to one directory.

struct MoonsRunConfig {
  MoonsConfig moons;
  TrainConfig train;
  std::size_t grid_steps = 300;
  std::size_t pad_svm_epochs = 50;

  MoonsRunConfig();
};

json moons_run_to_json(const MoonsRunConfig& cfg);
MoonsRunConfig moons_run_from_json(const json& j);

struct MoonsRunSummary {
  double source_risk = 0.0;
  double target_risk = 0.0;
  double domain_accuracy = 0.0;
  PadReport pad_raw;
  PadReport pad_hidden;
};

/// Writes moons.csv, model.json, grids/label.csv, grids/domain.csv, pca.csv,
/// levelsets.csv, pad.csv, results.csv and config.resolved.json.
MoonsRunSummary run_moons_pipeline(const MoonsRunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace dann
