#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "dann/error.hpp"
#include "dann/rng.hpp"
#include "dann/serialize.hpp"

using namespace dann;

namespace {

// Through text, as on disk.
json reparse(const json& j) { return json::parse(j.dump()); }

DannParams awkward_params() {
  Rng rng(17);
  auto p = DannParams::random_init(3, 4, rng);
  for (auto& v : p.b) v = rng.uniform(-1.0, 1.0) * 1e-300;
  p.c = {0.1, 1.0 / 3.0};
  p.w = {std::numeric_limits<double>::denorm_min(), -0.0, 1e308, -2.5e-17};
  p.d = std::nextafter(1.0, 2.0);
  return p;
}

}  // namespace

TEST_CASE("model round trip is bit-exact") {
  ModelFile m;
  m.params = awkward_params();
  const auto back = model_from_json(reparse(model_to_json(m)));
  CHECK(back.params == m.params);
  CHECK(std::signbit(back.params.w[1]));
  CHECK_FALSE(back.config.has_value());
  CHECK_FALSE(back.report.has_value());
}

TEST_CASE("model round trip keeps config and report") {
  ModelFile m;
  m.params = awkward_params();
  TrainConfig cfg;
  cfg.hidden_size = 4;
  cfg.lambda = 0.31;
  cfg.learning_rate = 0.1 + 0.2;
  cfg.seed = 0xffffffffffffffffULL;
  cfg.mode = Mode::NnWithRegressor;
  cfg.max_epochs = 7;
  cfg.patience = 3;
  cfg.val_fraction = 0.25;
  cfg.shuffle = false;
  m.config = cfg;
  m.report = TrainReport{7, 4, 1.0 / 7.0, {0.5, 0.25, 1.0 / 7.0}, {2, 0, 1}, {3}};
  const auto back = model_from_json(reparse(model_to_json(m)));
  REQUIRE(back.config.has_value());
  const auto& c = *back.config;
  CHECK(c.hidden_size == 4);
  CHECK(c.lambda == 0.31);
  CHECK(c.learning_rate == 0.1 + 0.2);
  CHECK(c.seed == cfg.seed);
  CHECK(c.mode == Mode::NnWithRegressor);
  CHECK(c.max_epochs == 7);
  CHECK(c.patience == 3);
  CHECK(c.val_fraction == 0.25);
  CHECK_FALSE(c.shuffle);
  CHECK(back.report == m.report);
}

TEST_CASE("config defaults fill missing keys") {
  const auto cfg = config_from_json(json::object({{"hidden_size", 9}}));
  CHECK(cfg.hidden_size == 9);
  CHECK(cfg.lambda == TrainConfig{}.lambda);
  CHECK(cfg.mode == Mode::Dann);
  CHECK_THROWS(config_from_json(json::object({{"mode", "bogus"}})));
  CHECK_THROWS(config_from_json(json::object({{"hidden_size", 0}})));
}

TEST_CASE("malformed model documents raise DataError") {
  ModelFile m;
  m.params = awkward_params();
  auto j = model_to_json(m);
  auto missing = j;
  missing.erase("V");
  CHECK_THROWS_AS(model_from_json(missing), DataError);
  auto short_w = j;
  short_w["W"].erase(0);
  CHECK_THROWS_AS(model_from_json(short_w), DataError);
  auto wrong_type = j;
  wrong_type["d"] = "x";
  CHECK_THROWS_AS(model_from_json(wrong_type), DataError);
  auto bad_b = j;
  bad_b["b"].push_back(1.0);
  CHECK_THROWS_AS(model_from_json(bad_b), DimensionError);
}

TEST_CASE("svm round trip") {
  SvmModel s{{0.1, -3e-9, 0.0}, 1.0 / 3.0, 1e-5};
  CHECK(svm_from_json(reparse(svm_to_json(s))) == s);
  auto j = svm_to_json(s);
  j["n"] = 5;
  CHECK_THROWS_AS(svm_from_json(j), DataError);
}

TEST_CASE("msda round trip, with and without truncation") {
  MsdaModel m;
  m.original_dim = 5;
  m.corruption = 0.7;
  m.ridge = 1e-7;
  m.kept_features = {1, 4};
  DenseMat layer(2, 3);
  layer(0, 0) = 0.1;
  layer(1, 2) = -1.0 / 3.0;
  m.layers = {layer, layer};
  CHECK(msda_from_json(reparse(msda_to_json(m))) == m);
  m.kept_features.clear();
  m.layers = {DenseMat(5, 6, 0.25)};
  CHECK(msda_from_json(reparse(msda_to_json(m))) == m);
  auto j = msda_to_json(m);
  j["layers"][0].erase(0);
  CHECK_THROWS_AS(msda_from_json(j), DataError);
}

TEST_CASE("pad report round trip re-checks the arithmetic") {
  PadReport r;
  r.split_seed = 99;
  r.split_attempts = 2;
  r.train_size = 51;
  r.test_size = 50;
  r.per_c_errors = {{1e-5, 0.3}, {1.0, 0.12}};
  r.best_epsilon = 0.12;
  r.pad_value = pad_from_error(0.12);
  r.representation_tag = "dann";
  CHECK(pad_report_from_json(reparse(pad_report_to_json(r))) == r);
  auto j = pad_report_to_json(r);
  j["pad_value"] = 1.0;
  CHECK_THROWS_AS(pad_report_from_json(j), DataError);
  j = pad_report_to_json(r);
  j["best_epsilon"] = 0.3;
  CHECK_THROWS_AS(pad_report_from_json(j), DataError);
}

TEST_CASE("json files on disk") {
  const auto path = std::filesystem::temp_directory_path() / "dann_serialize.json";
  ModelFile m;
  m.params = awkward_params();
  write_json(model_to_json(m), path);
  CHECK(model_from_json(read_json(path)).params == m.params);
  {
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.back() == '\n');
  }
  {
    std::ofstream out(path);
    out << "{\"n\": 2,";
  }
  CHECK_THROWS_AS(read_json(path), DataError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_json(path), DataError);
  CHECK_THROWS_AS(write_json(json::object(), "/nonexistent/dir/x.json"), DataError);
}
