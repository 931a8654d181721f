// dann: command-line front end for training, evaluation, PAD, mSDA and the
// experiment grids.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dann/error.hpp"
#include "dann/harness.hpp"
#include "dann/serialize.hpp"
#include "dann/svm.hpp"

namespace fs = std::filesystem;
using namespace dann;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

constexpr const char* kOutputsHelp = R"(
Output files (CSV headers are fixed):
  results.csv         task,algo,repr,l,lambda,C,val_risk,test_risk,seed
  cells.csv           task,seed,cell,l,lambda,C,val_risk,status
  pad.csv             representation_tag,task,pad
  moons.csv           x1,x2,label,domain        (domain 1 = source, 0 = target)
  grids/label.csv     x,y,value                 (value = P(y = 1 | x))
  grids/domain.csv    x,y,value                 (value = domain regressor output)
  pca.csv             pc1,pc2,domain,label      (label -1 = unknown)
  levelsets.csv       neuron_id,a,b,c,degenerate
  model.json, config.resolved.json

Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.)";

// Flags shared by the training subcommands; unset flags leave the config
// untouched.
struct TrainFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> hidden;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<std::string> mode;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> patience;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--hidden", hidden, "Hidden layer size l");
    app->add_option("--lambda", lambda, "Adaptation weight λ");
    app->add_option("--alpha", alpha, "Learning rate α");
    app->add_option("--mode", mode, "dann | nn | nn-regressor");
    app->add_option("--epochs", epochs, "Maximum number of epochs");
    app->add_option("--patience", patience, "Early-stopping patience in epochs");
  }

  void apply(TrainConfig& c) const {
    if (seed) c.seed = *seed;
    if (hidden) c.hidden_size = *hidden;
    if (lambda) c.lambda = *lambda;
    if (alpha) c.learning_rate = *alpha;
    if (mode) c.mode = mode_from_string(*mode);
    if (epochs) c.max_epochs = *epochs;
    if (patience) c.patience = *patience;
    c.validate();
  }
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stem_name(const fs::path& p) { return p.stem().string(); }

// --------------------------------------------------------------------------

int cmd_moons(const fs::path& config, const TrainFlags& flags, std::optional<std::size_t> grid_steps,
              const fs::path& out) {
  MoonsRunConfig cfg;
  if (!config.empty()) cfg = moons_run_from_json(read_json(config));
  if (flags.seed) cfg.moons.seed = *flags.seed;
  flags.apply(cfg.train);
  if (grid_steps) cfg.grid_steps = *grid_steps;
  const auto s = run_moons_pipeline(cfg, out);
  std::printf("source risk      %.4f\n", s.source_risk);
  std::printf("target risk      %.4f\n", s.target_risk);
  std::printf("domain accuracy  %.4f\n", s.domain_accuracy);
  std::printf("PAD raw          %.4f\n", s.pad_raw.pad_value);
  std::printf("PAD hidden       %.4f\n", s.pad_hidden.pad_value);
  std::printf("outputs written to %s\n", out.string().c_str());
  return kExitOk;
}

int cmd_train(const fs::path& source, const fs::path& target, const fs::path& config, const TrainFlags& flags,
              const fs::path& out) {
  TrainConfig cfg;
  if (!config.empty()) cfg = config_from_json(read_json(config));
  flags.apply(cfg);
  const auto s = load_sparse(source).labeled(stem_name(source));
  UnlabeledSet t;
  if (!target.empty()) {
    auto f = load_sparse(target);
    t = {stem_name(target), f.dim, std::move(f.x)};
  } else if (cfg.mode != Mode::NnPlain) {
    throw std::invalid_argument("--target is required unless --mode nn");
  } else {
    t = {"none", s.dim, {}};
  }
  fs::create_directories(out);
  write_json(config_to_json(cfg), out / "config.resolved.json");
  const auto result = train(s, t, cfg);
  write_json(model_to_json({result.params, cfg, result.report}), out / "model.json");
  std::printf("epochs %zu, best epoch %zu, source validation risk %.4f\n", result.report.epochs_run,
              result.report.best_epoch, result.report.best_val_risk);
  return kExitOk;
}

int cmd_eval(const fs::path& model_path, const fs::path& data) {
  const auto j = read_json(model_path);
  const auto set = load_sparse(data).labeled(stem_name(data));
  double r = 0.0;
  if (j.contains("weights")) {
    r = svm_error(svm_from_json(j), set);
  } else {
    r = risk(model_from_json(j).params, set);
  }
  std::printf("risk %.6f\n", r);
  return kExitOk;
}

int cmd_pad(const fs::path& source, const fs::path& target, const fs::path& model_path, std::uint64_t seed,
            std::size_t jobs, std::size_t svm_epochs, const std::string& tag, const fs::path& out) {
  const auto s = load_sparse(source);
  const auto t = load_sparse(target);
  PadOptions po;
  po.seed = seed;
  po.jobs = jobs;
  po.svm_epochs = svm_epochs;
  PadReport rep;
  if (model_path.empty()) {
    po.tag = tag.empty() ? "raw" : tag;
    rep = compute_pad(s.x, t.x, po);
  } else {
    po.tag = tag.empty() ? "hidden" : tag;
    rep = pad_on_representation(model_from_json(read_json(model_path)).params, s.x, t.x, po);
  }
  fs::create_directories(out);
  write_json(pad_report_to_json(rep), out / "pad.json");
  write_text(out / "pad.csv", pad_csv({{stem_name(source) + " → " + stem_name(target), seed, rep}}));
  std::printf("PAD %.6f (best held-out error %.6f)\n", rep.pad_value, rep.best_epsilon);
  return kExitOk;
}

int cmd_msda_fit(const std::vector<fs::path>& inputs, const MsdaOptions& opts, const fs::path& out) {
  std::vector<SparseVec> pool;
  std::size_t dim = 0;
  for (const auto& p : inputs) {
    auto f = load_sparse(p);
    if (dim != 0 && f.dim != dim)
      throw DimensionError("msda-fit: " + p.string() + " has dim " + std::to_string(f.dim) + ", expected " +
                           std::to_string(dim));
    dim = f.dim;
    pool.insert(pool.end(), f.x.begin(), f.x.end());
  }
  const auto model = msda_fit(pool, opts);
  write_json(msda_to_json(model), out);
  std::printf("mSDA fitted on %zu examples: %zu -> %zu dims\n", pool.size(), model.original_dim,
              model.output_dim());
  return kExitOk;
}

int cmd_msda_transform(const fs::path& model_path, const fs::path& input, const fs::path& output) {
  const auto model = msda_from_json(read_json(model_path));
  auto f = load_sparse(input);
  SparseFile mapped{model.output_dim(), msda_transform(model, f.x), f.y};
  save_sparse(mapped, output);
  return kExitOk;
}

struct GridFlags {
  fs::path config;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> jobs;
  fs::path out;
  std::vector<double> lambda;
  std::vector<std::size_t> hidden;
  std::vector<double> c_grid;
  std::optional<double> alpha;
  std::optional<std::string> mode;
  std::optional<std::string> repr;
  std::optional<std::size_t> epochs;
  fs::path source, target, data_dir;
  bool pad = false;
};

int cmd_grid(const GridFlags& g) {
  ExperimentConfig cfg;
  if (!g.config.empty()) cfg = experiment_from_json(read_json(g.config));
  if (g.seed) cfg.seeds = {*g.seed};
  if (!g.seeds.empty()) cfg.seeds = g.seeds;
  if (g.jobs) cfg.jobs = *g.jobs;
  if (!g.out.empty()) cfg.output_dir = g.out;
  if (!g.lambda.empty()) cfg.lambda_grid = g.lambda;
  if (!g.hidden.empty()) cfg.hidden_grid = g.hidden;
  if (!g.c_grid.empty()) cfg.c_grid = g.c_grid;
  if (g.alpha) {
    cfg.alpha = *g.alpha;
    cfg.alpha_msda = *g.alpha;
  }
  if (g.mode) cfg.algorithm = algorithm_from_string(*g.mode);
  if (g.repr) cfg.representation = representation_from_string(*g.repr);
  if (g.epochs) cfg.max_epochs = *g.epochs;
  if (!g.source.empty() || !g.target.empty()) {
    cfg.task.kind = TaskSpec::Kind::Pair;
    cfg.task.source_path = g.source;
    cfg.task.target_path = g.target;
  }
  if (!g.data_dir.empty()) {
    cfg.task.kind = TaskSpec::Kind::Amazon;
    cfg.task.data_dir = g.data_dir;
  }
  if (g.pad && g.repr && cfg.representation == Representation::Msda) cfg.pad_include_msda = true;
  cfg.validate();

  const auto& out = cfg.output_dir;
  fs::create_directories(out);
  write_json(experiment_to_json(cfg), out / "config.resolved.json");
  if (g.pad) {
    const auto rows = run_pad_sweep(cfg);
    write_text(out / "pad.csv", pad_csv(rows));
    std::cout << pad_csv(rows);
    return kExitOk;
  }
  const auto result = run_grid(cfg);
  const auto table = emit_table(result.rows);
  write_text(out / "results.csv", table.csv);
  write_text(out / "cells.csv", cells_csv(result.cells));
  write_text(out / "table.txt", table.text);
  std::cout << table.text;
  return kExitOk;
}

int cmd_table(const std::vector<fs::path>& inputs, const fs::path& out) {
  std::vector<ResultRow> rows;
  for (const auto& p : inputs) {
    auto r = parse_results_csv(read_text(p));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const auto table = emit_table(rows);
  if (!out.empty()) {
    write_text(out / "results.csv", table.csv);
    write_text(out / "table.txt", table.text);
  }
  std::cout << table.text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain-adversarial training, baselines, PAD and mSDA"};
  app.footer(kOutputsHelp);
  app.require_subcommand(1);

  // moons
  auto* moons = app.add_subcommand("moons", "Generate moons, train, analyze and compute PAD");
  fs::path moons_config, moons_out = "out/moons";
  std::optional<std::size_t> grid_steps;
  TrainFlags moons_flags;
  moons->add_option("--config", moons_config, "JSON run config {moons, train, grid_steps, pad_svm_epochs}");
  moons->add_option("--out", moons_out, "Output directory")->capture_default_str();
  moons->add_option("--grid-steps", grid_steps, "Decision-surface grid resolution per axis");
  moons_flags.add(moons);

  // train
  auto* tr = app.add_subcommand("train", "Train a network on a labeled source file and an unlabeled target file");
  fs::path tr_source, tr_target, tr_config, tr_out = "out/train";
  TrainFlags tr_flags;
  tr->add_option("--source", tr_source, "Labeled source examples (sparse format)")->required()->check(CLI::ExistingFile);
  tr->add_option("--target", tr_target, "Target examples (sparse format; labels ignored)")->check(CLI::ExistingFile);
  tr->add_option("--config", tr_config, "JSON training config");
  tr->add_option("--out", tr_out, "Output directory")->capture_default_str();
  tr_flags.add(tr);

  // eval
  auto* ev = app.add_subcommand("eval", "Misclassification rate of a saved network or SVM");
  fs::path ev_model, ev_data;
  ev->add_option("--model", ev_model, "model.json")->required()->check(CLI::ExistingFile);
  ev->add_option("--data", ev_data, "Labeled examples (sparse format)")->required()->check(CLI::ExistingFile);

  // pad
  auto* pad = app.add_subcommand("pad", "Proxy A-distance between two samples");
  fs::path pad_source, pad_target, pad_model, pad_out = "out/pad";
  std::uint64_t pad_seed = 0;
  std::size_t pad_jobs = 1, pad_epochs = 50;
  std::string pad_tag;
  pad->add_option("--source", pad_source, "Source sample (sparse format)")->required()->check(CLI::ExistingFile);
  pad->add_option("--target", pad_target, "Target sample (sparse format)")->required()->check(CLI::ExistingFile);
  pad->add_option("--model", pad_model, "Map both samples through this network's hidden layer first");
  pad->add_option("--seed", pad_seed, "Split and SVM seed")->capture_default_str();
  pad->add_option("--jobs", pad_jobs, "Parallel SVM fits")->capture_default_str();
  pad->add_option("--epochs", pad_epochs, "SVM epochs")->capture_default_str();
  pad->add_option("--tag", pad_tag, "Representation tag written to pad.csv");
  pad->add_option("--out", pad_out, "Output directory")->capture_default_str();

  // msda-fit
  auto* mf = app.add_subcommand("msda-fit", "Fit an mSDA map on one or more sparse files");
  std::vector<fs::path> mf_inputs;
  fs::path mf_out = "msda.json";
  MsdaOptions mf_opts;
  mf->add_option("--input", mf_inputs, "Sparse files (labels ignored)")->required()->check(CLI::ExistingFile);
  mf->add_option("--layers", mf_opts.layers, "Number of layers")->capture_default_str();
  mf->add_option("--corruption", mf_opts.corruption, "Feature drop probability")->capture_default_str();
  mf->add_option("--ridge", mf_opts.ridge, "Ridge added to the scatter diagonal")->capture_default_str();
  mf->add_option("--keep", mf_opts.keep_features, "Keep only the most frequent features (0 = all)");
  mf->add_option("--out", mf_out, "Output model path")->capture_default_str();

  // msda-transform
  auto* mt = app.add_subcommand("msda-transform", "Map a sparse file through a fitted mSDA");
  fs::path mt_model, mt_input, mt_output;
  mt->add_option("--model", mt_model, "Fitted mSDA json")->required()->check(CLI::ExistingFile);
  mt->add_option("--input", mt_input, "Sparse file")->required()->check(CLI::ExistingFile);
  mt->add_option("--output", mt_output, "Output sparse file")->required();

  // grid
  auto* gr = app.add_subcommand("grid", "Grid search with target-validation selection");
  GridFlags gf;
  gr->add_option("--config", gf.config, "JSON experiment config");
  gr->add_option("--seed", gf.seed, "Single master seed");
  gr->add_option("--seeds", gf.seeds, "Several master seeds");
  gr->add_option("--jobs", gf.jobs, "Concurrent grid cells");
  gr->add_option("--out", gf.out, "Output directory");
  gr->add_option("--lambda", gf.lambda, "λ grid");
  gr->add_option("--hidden", gf.hidden, "Hidden size grid");
  gr->add_option("--C", gf.c_grid, "SVM C grid");
  gr->add_option("--alpha", gf.alpha, "Learning rate (both representations)");
  gr->add_option("--mode", gf.mode, "dann | nn | svm");
  gr->add_option("--repr", gf.repr, "raw | msda");
  gr->add_option("--epochs", gf.epochs, "Maximum epochs per cell");
  gr->add_option("--source", gf.source, "Labeled source pool (pair task)");
  gr->add_option("--target", gf.target, "Labeled target pool (pair task)");
  gr->add_option("--data-dir", gf.data_dir, "Directory with <domain>.txt for every domain");
  gr->add_flag("--pad", gf.pad, "Run the PAD sweep instead of the grid");

  // table
  auto* tb = app.add_subcommand("table", "Assemble results.csv files into one table");
  std::vector<fs::path> tb_inputs;
  fs::path tb_out;
  tb->add_option("--input", tb_inputs, "results.csv files")->required()->check(CLI::ExistingFile);
  tb->add_option("--out", tb_out, "Write merged results.csv and table.txt here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*moons) return cmd_moons(moons_config, moons_flags, grid_steps, moons_out);
    if (*tr) return cmd_train(tr_source, tr_target, tr_config, tr_flags, tr_out);
    if (*ev) return cmd_eval(ev_model, ev_data);
    if (*pad) return cmd_pad(pad_source, pad_target, pad_model, pad_seed, pad_jobs, pad_epochs, pad_tag, pad_out);
    if (*mf) return cmd_msda_fit(mf_inputs, mf_opts, mf_out);
    if (*mt) return cmd_msda_transform(mt_model, mt_input, mt_output);
    if (*gr) return cmd_grid(gf);
    if (*tb) return cmd_table(tb_inputs, tb_out);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
