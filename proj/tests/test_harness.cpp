#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <tuple>

#include "dann/error.hpp"
#include "dann/harness.hpp"

using namespace dann;

namespace {

ExperimentConfig tiny_moons() {
  ExperimentConfig cfg;
  cfg.task.moons.n_per_moon = 30;
  cfg.task.moons_val_size = 20;
  cfg.hidden_grid = {3, 4};
  cfg.lambda_grid = {0.1, 1.0};
  cfg.c_grid = {1e-2, 1.0};
  cfg.max_epochs = 5;
  cfg.patience = 2;
  cfg.svm_epochs = 5;
  cfg.seeds = {3};
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("log grid endpoints and spacing") {
  const auto g = log_grid(1e-2, 1.0, 9);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(1.0));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] / g[k - 1] == doctest::Approx(g[1] / g[0]));
  CHECK(log_grid(0.5, 2.0, 1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(log_grid(1.0, 0.5, 3), std::invalid_argument);
}

TEST_CASE("enum names round trip") {
  for (auto a : {Algorithm::Dann, Algorithm::Nn, Algorithm::Svm}) CHECK(algorithm_from_string(to_string(a)) == a);
  for (auto r : {Representation::Raw, Representation::Msda})
    CHECK(representation_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(algorithm_from_string("tree"), std::invalid_argument);
}

TEST_CASE("experiment config json round trip") {
  auto cfg = tiny_moons();
  cfg.algorithm = Algorithm::Svm;
  cfg.representation = Representation::Msda;
  cfg.msda.layers = 2;
  cfg.msda.corruption = 0.8;
  cfg.pad_include_msda = true;
  cfg.task.moons.target_seed = 77;
  const auto back = experiment_from_json(json::parse(experiment_to_json(cfg).dump()));
  CHECK(experiment_to_json(back) == experiment_to_json(cfg));
  CHECK(back.algorithm == Algorithm::Svm);
  CHECK(back.task.moons.target_seed == std::optional<std::uint64_t>(77));
  CHECK(back.msda.layers == 2);
  CHECK(back.effective_alpha() == cfg.alpha_msda);

  const auto partial = experiment_from_json(json::object({{"max_epochs", 3}}));
  CHECK(partial.max_epochs == 3);
  CHECK(partial.hidden_grid == ExperimentConfig{}.hidden_grid);
}

TEST_CASE("experiment validation") {
  auto cfg = tiny_moons();
  CHECK_NOTHROW(cfg.validate());
  cfg.lambda_grid = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_moons();
  cfg.seeds = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_moons();
  cfg.c_grid = {0.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("moons task resolution") {
  const auto cfg = tiny_moons();
  const auto tasks = resolve_tasks(cfg.task, 3);
  REQUIRE(tasks.size() == 1);
  const auto& t = tasks[0].task;
  CHECK(t.source.size() == 60);
  CHECK(t.target.size() == 60);
  CHECK(t.target_test.size() == 60);
  CHECK(t.target_val.size() == 20);
  CHECK(resolve_tasks(cfg.task, 3)[0].task.target_val.x == t.target_val.x);
  CHECK_FALSE(resolve_tasks(cfg.task, 4)[0].task.source.x == t.source.x);
}

TEST_CASE("amazon resolution with no domains yields nothing") {
  TaskSpec spec;
  spec.kind = TaskSpec::Kind::Amazon;
  spec.domains = {};
  CHECK(resolve_tasks(spec, 0).empty());
  spec.domains = {"a", "b"};
  spec.data_dir = "/nonexistent";
  CHECK_THROWS_AS(resolve_tasks(spec, 0), DataError);
}

TEST_CASE("pair tasks load both pools") {
  const auto dir = std::filesystem::temp_directory_path() / "dann_pair_task";
  std::filesystem::create_directories(dir);
  WordShiftConfig ws;
  ws.n_per_domain = 60;
  ws.dim = 400;
  ws.shared_per_class = 5;
  ws.specific_per_class = 10;
  ws.background_words = 10;
  const auto data = gen_word_shift(ws);
  auto dump = [](const LabeledSet& s, const std::filesystem::path& p) {
    SparseFile f;
    f.dim = s.dim;
    f.x = s.x;
    f.y = s.y;
    save_sparse(f, p);
  };
  dump(data.source, dir / "src.txt");
  dump(data.target, dir / "tgt.txt");
  TaskSpec spec;
  spec.kind = TaskSpec::Kind::Pair;
  spec.source_path = dir / "src.txt";
  spec.target_path = dir / "tgt.txt";
  spec.m = 40;
  spec.m_prime = 30;
  spec.val_target = 10;
  const auto tasks = resolve_tasks(spec, 1);
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0].name == "src → tgt");
  CHECK(tasks[0].task.source.size() == 40);
  CHECK(tasks[0].task.target_test.size() == 20);

  MsdaModel model;
  const auto mapped = msda_task(tasks[0].task, MsdaOptions{0.5, 2, 1e-5, 50}, &model);
  CHECK(model.input_dim() == 50);
  CHECK(mapped.source.dim == 150);
  CHECK(mapped.target_test.size() == 20);
  std::filesystem::remove_all(dir);
}

TEST_CASE("grid search picks the validation argmin with the documented tie-break") {
  auto cfg = tiny_moons();
  const auto res = run_grid(cfg);
  REQUIRE(res.rows.size() == 1);
  REQUIRE(res.cells.size() == 4);
  const auto best = std::min_element(res.cells.begin(), res.cells.end(), [](const CellLog& a, const CellLog& b) {
    return std::tie(a.val_risk, a.hidden, a.lambda) < std::tie(b.val_risk, b.hidden, b.lambda);
  });
  const auto& row = res.rows[0];
  CHECK(row.val_risk == best->val_risk);
  CHECK(row.hidden == best->hidden);
  CHECK(row.lambda == best->lambda);
  CHECK(row.algorithm == "dann");
  CHECK(row.representation == "raw");
  CHECK(row.seed == 3);
  CHECK(row.test_risk >= 0.0);
  CHECK(row.test_risk <= 1.0);
}

TEST_CASE("grid search is deterministic and independent of the worker count") {
  auto cfg = tiny_moons();
  const auto a = run_grid(cfg);
  cfg.jobs = 3;
  const auto b = run_grid(cfg);
  CHECK(a.rows == b.rows);
  CHECK(cells_csv(a.cells) == cells_csv(b.cells));
}

TEST_CASE("DANN at lambda 0 reproduces the NN grid") {
  auto cfg = tiny_moons();
  cfg.hidden_grid = {4};
  cfg.lambda_grid = {0.0};
  const auto dann = run_grid(cfg);
  cfg.algorithm = Algorithm::Nn;
  const auto nn = run_grid(cfg);
  REQUIRE(dann.rows.size() == 1);
  REQUIRE(nn.rows.size() == 1);
  CHECK(dann.rows[0].val_risk == nn.rows[0].val_risk);
  CHECK(dann.rows[0].test_risk == nn.rows[0].test_risk);
  CHECK_FALSE(nn.rows[0].lambda.has_value());
}

TEST_CASE("svm grid covers every C") {
  auto cfg = tiny_moons();
  cfg.algorithm = Algorithm::Svm;
  const auto res = run_grid(cfg);
  CHECK(res.cells.size() == cfg.c_grid.size());
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].C.has_value());
  CHECK_FALSE(res.rows[0].hidden.has_value());
}

TEST_CASE("results csv round trip and table layout") {
  std::vector<ResultRow> rows{
      {"b → a", "nn", "raw", 5, std::nullopt, std::nullopt, 0.25, 1.0 / 3.0, 1},
      {"a → b", "dann", "raw", 5, 0.1, std::nullopt, 0.2, 0.3, 0},
      {"a → b", "svm", "msda", std::nullopt, std::nullopt, 1e-3, 0.1, 0.2, 0},
      {"a → b", "dann", "raw", 5, 0.1, std::nullopt, 0.2, 0.1, 1},
  };
  const auto t = emit_table(rows);
  const auto back = parse_results_csv(t.csv);
  REQUIRE(back.size() == 4);
  CHECK(back[0].task == "a → b");
  CHECK(back[0].seed == 0);
  CHECK(back[3].test_risk == 1.0 / 3.0);
  CHECK(emit_table(back).csv == t.csv);
  CHECK(t.text.find("0.200") != std::string::npos);  // mean of 0.3 and 0.1
  CHECK(t.text.find("Original data") != std::string::npos);

  const auto empty = emit_table({});
  CHECK(empty.csv == std::string(kResultsHeader) + "\n");
  CHECK(parse_results_csv(empty.csv).empty());
  CHECK_THROWS_AS(parse_results_csv("nope\n"), DataError);
  CHECK_THROWS_AS(parse_results_csv(std::string(kResultsHeader) + "\na,b\n"), DataError);
}

TEST_CASE("pad sweep covers raw, nn and dann representations") {
  auto cfg = tiny_moons();
  cfg.pad_hidden = 5;
  cfg.svm_epochs = 3;
  cfg.c_grid = {1.0};
  const auto rows = run_pad_sweep(cfg);
  std::vector<std::string> tags;
  for (const auto& r : rows) {
    tags.push_back(r.report.representation_tag);
    CHECK_NOTHROW(r.report.check());
  }
  CHECK(tags == std::vector<std::string>{"raw", "nn", "dann"});
  const auto csv = pad_csv(rows);
  CHECK(csv.rfind("representation_tag,task,pad\n", 0) == 0);

  cfg.task.kind = TaskSpec::Kind::Amazon;
  cfg.task.domains = {};
  CHECK(run_pad_sweep(cfg).empty());
}

TEST_CASE("moons pipeline writes every artefact") {
  const auto dir = std::filesystem::temp_directory_path() / "dann_moons_pipeline";
  std::filesystem::remove_all(dir);
  MoonsRunConfig cfg;
  cfg.moons.n_per_moon = 25;
  cfg.train.max_epochs = 3;
  cfg.train.hidden_size = 4;
  cfg.grid_steps = 8;
  cfg.pad_svm_epochs = 3;
  const auto summary = run_moons_pipeline(cfg, dir);
  for (const char* f : {"moons.csv", "model.json", "grids/label.csv", "grids/domain.csv", "pca.csv",
                        "levelsets.csv", "pad.csv", "results.csv", "config.resolved.json"})
    CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
  CHECK(summary.domain_accuracy >= 0.0);
  CHECK(summary.pad_hidden.representation_tag != summary.pad_raw.representation_tag);
  const auto resolved = moons_run_from_json(read_json(dir / "config.resolved.json"));
  CHECK(moons_run_to_json(resolved) == moons_run_to_json(cfg));
  const auto model = model_from_json(read_json(dir / "model.json"));
  CHECK(model.params.hidden_size() == 4);
  const auto first = slurp(dir / "grids/label.csv");
  run_moons_pipeline(cfg, dir);
  CHECK(slurp(dir / "grids/label.csv") == first);
  std::filesystem::remove_all(dir);
}
