#include "dann/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "dann/analysis.hpp"
#include "dann/error.hpp"
#include "dann/rng.hpp"
#include "dann/svm.hpp"

namespace dann {
namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

template <typename T>
std::string fmt_opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return fmt(*v);
  } else {
    return std::to_string(*v);
  }
}

// Stream ids for Rng::derive_seed.
constexpr std::uint64_t kTaskStream = 0x7a5c;
constexpr std::uint64_t kMoonsValStream = 0x7a5d;
constexpr std::uint64_t kPadStream = 0x9ad;
constexpr std::uint64_t kPadNnStream = 0x9ae;
constexpr std::uint64_t kPadDannStream = 0x9af;

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Dann: return "dann";
    case Algorithm::Nn: return "nn";
    case Algorithm::Svm: return "svm";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "dann") return Algorithm::Dann;
  if (s == "nn") return Algorithm::Nn;
  if (s == "svm") return Algorithm::Svm;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected dann, nn, svm)");
}

std::string to_string(Representation r) { return r == Representation::Raw ? "raw" : "msda"; }

Representation representation_from_string(const std::string& s) {
  if (s == "raw") return Representation::Raw;
  if (s == "msda") return Representation::Msda;
  throw std::invalid_argument("unknown representation '" + s + "' (expected raw, msda)");
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_grid: bad range");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t k = 0; k < count; ++k)
    g[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  return g;
}

void ExperimentConfig::validate() const {
  if (lambda_grid.empty() || hidden_grid.empty() || c_grid.empty())
    throw std::invalid_argument("experiment: grids must be nonempty");
  if (!(alpha > 0.0) || !(alpha_msda > 0.0)) throw std::invalid_argument("experiment: alpha must be > 0");
  if (seeds.empty()) throw std::invalid_argument("experiment: need at least one seed");
  for (double l : lambda_grid)
    if (!(l >= 0.0)) throw std::invalid_argument("experiment: lambda values must be >= 0");
  for (double c : c_grid)
    if (!(c > 0.0)) throw std::invalid_argument("experiment: C values must be > 0");
  for (auto h : hidden_grid)
    if (h < 1) throw std::invalid_argument("experiment: hidden sizes must be >= 1");
}

namespace {

std::string kind_name(TaskSpec::Kind k) {
  switch (k) {
    case TaskSpec::Kind::Moons: return "moons";
    case TaskSpec::Kind::Pair: return "pair";
    case TaskSpec::Kind::Amazon: return "amazon";
  }
  return "?";
}

json moons_to_json(const MoonsConfig& m) {
  json j = {{"n_per_moon", m.n_per_moon}, {"rotation_deg", m.rotation_deg}, {"noise_sd", m.noise_sd},
            {"radius", m.radius},         {"width", m.width},               {"offset", m.offset},
            {"seed", m.seed},             {"rotation_center", "centroid"}};
  j["target_seed"] = m.target_seed ? json(*m.target_seed) : json(nullptr);
  // Geometry values chosen here rather than taken from a published setup.
  j["assumed_defaults"] = {"noise_sd", "radius", "width", "offset", "rotation_center"};
  return j;
}

MoonsConfig moons_from_json(const json& j) {
  MoonsConfig m;
  m.n_per_moon = j.value("n_per_moon", m.n_per_moon);
  m.rotation_deg = j.value("rotation_deg", m.rotation_deg);
  m.noise_sd = j.value("noise_sd", m.noise_sd);
  m.radius = j.value("radius", m.radius);
  m.width = j.value("width", m.width);
  m.offset = j.value("offset", m.offset);
  m.seed = j.value("seed", m.seed);
  if (j.contains("target_seed") && !j["target_seed"].is_null())
    m.target_seed = j["target_seed"].get<std::uint64_t>();
  m.validate();
  return m;
}

}  // namespace

json experiment_to_json(const ExperimentConfig& c) {
  json task = {{"kind", kind_name(c.task.kind)},
               {"moons", moons_to_json(c.task.moons)},
               {"moons_val_size", c.task.moons_val_size},
               {"source_path", c.task.source_path.string()},
               {"target_path", c.task.target_path.string()},
               {"data_dir", c.task.data_dir.string()},
               {"domains", c.task.domains},
               {"m", c.task.m},
               {"m_prime", c.task.m_prime},
               {"val_target", c.task.val_target}};
  return {{"task", task},
          {"algorithm", to_string(c.algorithm)},
          {"representation", to_string(c.representation)},
          {"lambda_grid", c.lambda_grid},
          {"hidden_grid", c.hidden_grid},
          {"c_grid", c.c_grid},
          {"alpha", c.alpha},
          {"alpha_msda", c.alpha_msda},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"svm_epochs", c.svm_epochs},
          {"seeds", c.seeds},
          {"jobs", c.jobs},
          {"output_dir", c.output_dir.string()},
          {"msda",
           {{"corruption", c.msda.corruption},
            {"layers", c.msda.layers},
            {"ridge", c.msda.ridge},
            {"keep_features", c.msda.keep_features}}},
          {"pad", {{"hidden", c.pad_hidden}, {"lambda", c.pad_lambda}, {"include_msda", c.pad_include_msda}}}};
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("task")) {
      const auto& t = j["task"];
      const auto kind = t.value("kind", std::string("moons"));
      if (kind == "moons") c.task.kind = TaskSpec::Kind::Moons;
      else if (kind == "pair") c.task.kind = TaskSpec::Kind::Pair;
      else if (kind == "amazon") c.task.kind = TaskSpec::Kind::Amazon;
      else throw std::invalid_argument("unknown task kind '" + kind + "'");
      if (t.contains("moons")) c.task.moons = moons_from_json(t["moons"]);
      c.task.moons_val_size = t.value("moons_val_size", c.task.moons_val_size);
      c.task.source_path = t.value("source_path", std::string{});
      c.task.target_path = t.value("target_path", std::string{});
      c.task.data_dir = t.value("data_dir", std::string{});
      c.task.domains = t.value("domains", c.task.domains);
      c.task.m = t.value("m", c.task.m);
      c.task.m_prime = t.value("m_prime", c.task.m_prime);
      c.task.val_target = t.value("val_target", c.task.val_target);
    }
    c.algorithm = algorithm_from_string(j.value("algorithm", to_string(c.algorithm)));
    c.representation = representation_from_string(j.value("representation", to_string(c.representation)));
    c.lambda_grid = j.value("lambda_grid", c.lambda_grid);
    c.hidden_grid = j.value("hidden_grid", c.hidden_grid);
    c.c_grid = j.value("c_grid", c.c_grid);
    c.alpha = j.value("alpha", c.alpha);
    c.alpha_msda = j.value("alpha_msda", c.alpha_msda);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.svm_epochs = j.value("svm_epochs", c.svm_epochs);
    c.seeds = j.value("seeds", c.seeds);
    c.jobs = j.value("jobs", c.jobs);
    c.output_dir = j.value("output_dir", c.output_dir.string());
    if (j.contains("msda")) {
      const auto& m = j["msda"];
      c.msda.corruption = m.value("corruption", c.msda.corruption);
      c.msda.layers = m.value("layers", c.msda.layers);
      c.msda.ridge = m.value("ridge", c.msda.ridge);
      c.msda.keep_features = m.value("keep_features", c.msda.keep_features);
    }
    if (j.contains("pad")) {
      const auto& p = j["pad"];
      c.pad_hidden = p.value("hidden", c.pad_hidden);
      c.pad_lambda = p.value("lambda", c.pad_lambda);
      c.pad_include_msda = p.value("include_msda", c.pad_include_msda);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

std::vector<NamedTask> resolve_tasks(const TaskSpec& spec, std::uint64_t seed) {
  std::vector<NamedTask> out;
  switch (spec.kind) {
    case TaskSpec::Kind::Moons: {
      auto mc = spec.moons;
      mc.seed = seed;
      auto data = gen_moons(mc);
      Task t;
      t.source = data.source;
      t.target = data.target;
      t.target_test = data.target_truth;
      auto vc = mc;
      vc.n_per_moon = std::max<std::size_t>(1, (spec.moons_val_size + 1) / 2);
      t.target_val = rotate_about_centroid(sample_moons(vc, Rng::derive_seed(seed, kMoonsValStream)),
                                           mc.rotation_deg);
      t.target_val.name = "moons-target-val";
      out.push_back({"moons-source → moons-target", std::move(t)});
      break;
    }
    case TaskSpec::Kind::Pair: {
      auto s = load_sparse(spec.source_path).labeled(spec.source_path.stem().string());
      auto t = load_sparse(spec.target_path).labeled(spec.target_path.stem().string());
      out.push_back({s.name + " → " + t.name,
                     make_task(s, t, spec.m, spec.m_prime, spec.val_target,
                               Rng::derive_seed(seed, kTaskStream))});
      break;
    }
    case TaskSpec::Kind::Amazon: {
      std::map<std::string, LabeledSet> pools;
      for (const auto& d : spec.domains)
        pools[d] = load_sparse(spec.data_dir / (d + ".txt")).labeled(d);
      for (const auto& s : spec.domains)
        for (const auto& t : spec.domains) {
          if (s == t) continue;
          out.push_back({s + " → " + t, make_task(pools[s], pools[t], spec.m, spec.m_prime, spec.val_target,
                                                   Rng::derive_seed(seed, kTaskStream))});
        }
      break;
    }
  }
  return out;
}

Task msda_task(const Task& task, const MsdaOptions& opts, MsdaModel* fitted) {
  std::vector<SparseVec> pool = task.source.x;
  pool.insert(pool.end(), task.target.x.begin(), task.target.x.end());
  auto model = msda_fit(pool, opts);
  auto map_labeled = [&](const LabeledSet& s) {
    return LabeledSet{s.name, model.output_dim(), msda_transform(model, s.x), s.y};
  };
  Task out = task;
  out.source = map_labeled(task.source);
  out.target = {task.target.name, model.output_dim(), msda_transform(model, task.target.x)};
  out.target_val = map_labeled(task.target_val);
  out.target_test = map_labeled(task.target_test);
  if (fitted) *fitted = std::move(model);
  return out;
}

namespace {

struct Cell {
  std::optional<std::size_t> hidden;
  std::optional<double> lambda;
  std::optional<double> C;
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  switch (cfg.algorithm) {
    case Algorithm::Dann:
      for (auto l : cfg.hidden_grid)
        for (double lam : cfg.lambda_grid) cells.push_back({l, lam, std::nullopt});
      break;
    case Algorithm::Nn:
      for (auto l : cfg.hidden_grid) cells.push_back({l, std::nullopt, std::nullopt});
      break;
    case Algorithm::Svm:
      for (double c : cfg.c_grid) cells.push_back({std::nullopt, std::nullopt, c});
      break;
  }
  return cells;
}

// Strict weak order: lower validation risk, then smaller capacity, then
// enumeration order.
bool better(const CellLog& a, const CellLog& b) {
  if (a.val_risk != b.val_risk) return a.val_risk < b.val_risk;
  if (a.hidden != b.hidden) return a.hidden.value_or(0) < b.hidden.value_or(0);
  if (a.lambda != b.lambda) return a.lambda.value_or(0) < b.lambda.value_or(0);
  if (a.C != b.C) return a.C.value_or(0) < b.C.value_or(0);
  return a.index < b.index;
}

template <typename F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

GridResult run_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  GridResult result;
  const auto cells = enumerate_cells(cfg);
  for (auto seed : cfg.seeds) {
    for (auto& named : resolve_tasks(cfg.task, seed)) {
      const Task task = cfg.representation == Representation::Msda ? msda_task(named.task, cfg.msda)
                                                                   : std::move(named.task);
      std::vector<CellLog> logs(cells.size());
      std::optional<std::size_t> best;
      std::optional<DannParams> best_net;
      std::optional<SvmModel> best_svm;
      std::mutex mu;

      parallel_for(cells.size(), cfg.jobs, [&](std::size_t k) {
        const auto& cell = cells[k];
        CellLog log{named.name, seed, k, cell.hidden, cell.lambda, cell.C, 1.0, true, {}};
        const auto cell_seed = Rng::derive_seed(seed, 1 + k);
        std::optional<DannParams> net;
        std::optional<SvmModel> svm;
        try {
          if (cfg.algorithm == Algorithm::Svm) {
            svm = svm_train(task.source, {*cell.C, cfg.svm_epochs, cell_seed});
            log.val_risk = svm_error(*svm, task.target_val);
          } else {
            TrainConfig tc;
            tc.hidden_size = *cell.hidden;
            tc.lambda = cell.lambda.value_or(0.0);
            tc.learning_rate = cfg.effective_alpha();
            tc.seed = cell_seed;
            tc.mode = cfg.algorithm == Algorithm::Dann ? Mode::Dann : Mode::NnPlain;
            tc.max_epochs = cfg.max_epochs;
            tc.patience = cfg.patience;
            net = train(task.source, task.target, tc).params;
            log.val_risk = risk(*net, task.target_val);
          }
        } catch (const std::exception& e) {
          log.ok = false;
          log.error = e.what();
          std::cerr << "warning: grid cell " << k << " of " << named.name << " failed: " << e.what() << '\n';
        }
        std::lock_guard lock(mu);
        logs[k] = log;
        if (log.ok && (!best || better(log, logs[*best]))) {
          best = k;
          best_net = std::move(net);
          best_svm = std::move(svm);
        }
      });

      result.cells.insert(result.cells.end(), logs.begin(), logs.end());
      if (!best) {
        std::cerr << "warning: every grid cell failed for " << named.name << '\n';
        continue;
      }
      const auto& chosen = logs[*best];
      ResultRow row{named.name, to_string(cfg.algorithm), to_string(cfg.representation),
                    chosen.hidden, chosen.lambda, chosen.C, chosen.val_risk, 0.0, seed};
      row.test_risk = best_svm ? svm_error(*best_svm, task.target_test) : risk(*best_net, task.target_test);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::vector<PadSweepRow> run_pad_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<PadSweepRow> rows;
  for (auto seed : cfg.seeds) {
    for (const auto& named : resolve_tasks(cfg.task, seed)) {
      PadOptions po;
      po.c_grid = cfg.c_grid;
      po.seed = Rng::derive_seed(seed, kPadStream);
      po.svm_epochs = cfg.svm_epochs;
      po.jobs = cfg.jobs;
      auto pad_of = [&](const Task& t, const std::string& tag) {
        po.tag = tag;
        rows.push_back({named.name, seed, compute_pad(t.source.x, t.target.x, po)});
      };
      auto net_pad = [&](const Task& t, Mode mode, double lambda, double alpha, std::uint64_t stream,
                         const std::string& tag) {
        TrainConfig tc;
        tc.hidden_size = cfg.pad_hidden;
        tc.lambda = lambda;
        tc.learning_rate = alpha;
        tc.mode = mode;
        tc.seed = Rng::derive_seed(seed, stream);
        tc.max_epochs = cfg.max_epochs;
        tc.patience = cfg.patience;
        const auto net = train(t.source, t.target, tc).params;
        po.tag = tag;
        rows.push_back({named.name, seed, pad_on_representation(net, t.source.x, t.target.x, po)});
      };

      const auto& task = named.task;
      pad_of(task, "raw");
      net_pad(task, Mode::NnPlain, 0.0, cfg.alpha, kPadNnStream, "nn");
      net_pad(task, Mode::Dann, cfg.pad_lambda, cfg.alpha, kPadDannStream, "dann");
      if (cfg.pad_include_msda) {
        const auto mt = msda_task(task, cfg.msda);
        pad_of(mt, "msda");
        net_pad(mt, Mode::Dann, cfg.pad_lambda, cfg.alpha_msda, kPadDannStream, "msda+dann");
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

Table emit_table(const std::vector<ResultRow>& input) {
  auto rows = input;
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.task, a.representation, a.algorithm, a.seed) <
           std::tie(b.task, b.representation, b.algorithm, b.seed);
  });

  Table t;
  std::ostringstream csv;
  csv << kResultsHeader << '\n';
  for (const auto& r : rows)
    csv << r.task << ',' << r.algorithm << ',' << r.representation << ',' << fmt_opt(r.hidden) << ','
        << fmt_opt(r.lambda) << ',' << fmt_opt(r.C) << ',' << fmt(r.val_risk) << ',' << fmt(r.test_risk)
        << ',' << r.seed << '\n';
  t.csv = csv.str();

  // Text layout: one line per task, mean test risk over seeds, grouped by
  // representation then algorithm.
  std::vector<std::string> tasks;
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
    auto& a = acc[{r.task, r.representation, r.algorithm}];
    a.first += r.test_risk;
    a.second += 1;
  }
  std::ostringstream txt;
  char line[256];
  std::snprintf(line, sizeof(line), "%-32s | %-23s | %-23s\n", "", "Original data", "mSDA representation");
  txt << line;
  std::snprintf(line, sizeof(line), "%-32s | %-7s %-7s %-7s | %-7s %-7s %-7s\n", "source → target", "DANN", "NN",
                "SVM", "DANN", "NN", "SVM");
  txt << line;
  for (const auto& task : tasks) {
    std::string cellsv[6];
    int k = 0;
    for (const char* repr : {"raw", "msda"})
      for (const char* algo : {"dann", "nn", "svm"}) {
        auto it = acc.find({task, repr, algo});
        if (it == acc.end()) {
          cellsv[k++] = "-";
        } else {
          char v[32];
          std::snprintf(v, sizeof(v), "%.3f", it->second.first / it->second.second);
          cellsv[k++] = v;
        }
      }
    std::snprintf(line, sizeof(line), "%-32s | %-7s %-7s %-7s | %-7s %-7s %-7s\n", task.c_str(),
                  cellsv[0].c_str(), cellsv[1].c_str(), cellsv[2].c_str(), cellsv[3].c_str(), cellsv[4].c_str(),
                  cellsv[5].c_str());
    txt << line;
  }
  t.text = txt.str();
  return t;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_field(const std::string& s, std::size_t lineno) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("results csv line " + std::to_string(lineno) + ": bad field '" + s + "'");
  return v;
}

template <typename T>
std::optional<T> parse_opt(const std::string& s, std::size_t lineno) {
  if (s.empty()) return std::nullopt;
  return parse_field<T>(s, lineno);
}

}  // namespace

std::vector<ResultRow> parse_results_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t lineno = 0;
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kResultsHeader) throw DataError("results csv: unexpected header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 9) throw DataError("results csv line " + std::to_string(lineno) + ": expected 9 fields");
    rows.push_back({f[0], f[1], f[2], parse_opt<std::size_t>(f[3], lineno), parse_opt<double>(f[4], lineno),
                    parse_opt<double>(f[5], lineno), parse_field<double>(f[6], lineno),
                    parse_field<double>(f[7], lineno), parse_field<std::uint64_t>(f[8], lineno)});
  }
  return rows;
}

std::string cells_csv(const std::vector<CellLog>& cells) {
  std::ostringstream out;
  out << "task,seed,cell,l,lambda,C,val_risk,status\n";
  for (const auto& c : cells)
    out << c.task << ',' << c.seed << ',' << c.index << ',' << fmt_opt(c.hidden) << ',' << fmt_opt(c.lambda) << ','
        << fmt_opt(c.C) << ',' << (c.ok ? fmt(c.val_risk) : std::string{}) << ',' << (c.ok ? "ok" : "failed")
        << '\n';
  return out.str();
}

std::string pad_csv(const std::vector<PadSweepRow>& rows) {
  std::ostringstream out;
  out << "representation_tag,task,pad\n";
  for (const auto& r : rows) out << r.report.representation_tag << ',' << r.task << ',' << fmt(r.report.pad_value) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

MoonsRunConfig::MoonsRunConfig() {
  train.hidden_size = 15;
  train.lambda = 6.0;
  train.learning_rate = 1e-3;
  train.mode = Mode::Dann;
  train.max_epochs = 500;
}

json moons_run_to_json(const MoonsRunConfig& cfg) {
  return {{"moons", moons_to_json(cfg.moons)},
          {"train", config_to_json(cfg.train)},
          {"grid_steps", cfg.grid_steps},
          {"pad_svm_epochs", cfg.pad_svm_epochs},
          {"pca", "centred, unscaled"}};
}

MoonsRunConfig moons_run_from_json(const json& j) {
  MoonsRunConfig cfg;
  if (j.contains("moons")) cfg.moons = moons_from_json(j["moons"]);
  if (j.contains("train")) {
    // Unspecified training fields keep the moons defaults.
    auto merged = config_to_json(cfg.train);
    merged.update(j["train"]);
    cfg.train = config_from_json(merged);
  }
  cfg.grid_steps = j.value("grid_steps", cfg.grid_steps);
  cfg.pad_svm_epochs = j.value("pad_svm_epochs", cfg.pad_svm_epochs);
  return cfg;
}

MoonsRunSummary run_moons_pipeline(const MoonsRunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "grids");
  write_json(moons_run_to_json(cfg), out_dir / "config.resolved.json");

  const auto data = gen_moons(cfg.moons);
  write_moons_csv(data, out_dir / "moons.csv");

  const auto trained = train(data.source, data.target, cfg.train);
  const auto& p = trained.params;
  write_json(model_to_json({p, cfg.train, trained.report}), out_dir / "model.json");

  std::vector<SparseVec> all = data.source.x;
  all.insert(all.end(), data.target.x.begin(), data.target.x.end());
  const auto region = bounding_region(all, cfg.grid_steps);
  write_grid_csv(label_boundary_grid(p, region), out_dir / "grids" / "label.csv");
  write_grid_csv(domain_boundary_grid(p, region), out_dir / "grids" / "domain.csv");
  write_pca_csv(pca_embed(p, data.source, data.target, data.target_truth.y), out_dir / "pca.csv");
  write_levelsets_csv(hidden_level_sets(p), out_dir / "levelsets.csv");

  MoonsRunSummary s;
  s.source_risk = risk(p, data.source);
  s.target_risk = risk(p, data.target_truth);
  s.domain_accuracy = domain_accuracy(p, data.source.x, data.target.x);

  PadOptions po;
  po.seed = Rng::derive_seed(cfg.moons.seed, kPadStream);
  po.svm_epochs = cfg.pad_svm_epochs;
  po.tag = "raw";
  s.pad_raw = compute_pad(data.source.x, data.target.x, po);
  po.tag = to_string(cfg.train.mode);
  s.pad_hidden = pad_on_representation(p, data.source.x, data.target.x, po);
  const std::string task = "moons-source → moons-target";
  {
    std::ofstream out(out_dir / "pad.csv");
    out << pad_csv({{task, cfg.moons.seed, s.pad_raw}, {task, cfg.moons.seed, s.pad_hidden}});
  }

  ResultRow row{task,
                to_string(cfg.train.mode),
                "raw",
                cfg.train.hidden_size,
                cfg.train.effective_lambda(),
                std::nullopt,
                trained.report.best_val_risk,
                s.target_risk,
                cfg.train.seed};
  {
    std::ofstream out(out_dir / "results.csv");
    out << emit_table({row}).csv;
  }
  return s;
}

}  // namespace dann
