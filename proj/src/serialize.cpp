#include "dann/serialize.hpp"

#include <fstream>

#include "dann/error.hpp"

namespace dann {
namespace {

DenseMat mat_from(const json& j, std::size_t rows, std::size_t cols, const char* name) {
  auto data = j.at(name).get<std::vector<double>>();
  if (data.size() != rows * cols)
    throw DataError(std::string("model json: ") + name + " has " + std::to_string(data.size()) +
                    " entries, expected " + std::to_string(rows * cols));
  return DenseMat(rows, cols, std::move(data));
}

}  // namespace

json config_to_json(const TrainConfig& cfg) {
  return {{"hidden_size", cfg.hidden_size},     {"lambda", cfg.lambda},
          {"learning_rate", cfg.learning_rate}, {"seed", cfg.seed},
          {"mode", to_string(cfg.mode)},        {"max_epochs", cfg.max_epochs},
          {"patience", cfg.patience},           {"val_fraction", cfg.val_fraction},
          {"shuffle", cfg.shuffle}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.hidden_size = j.value("hidden_size", cfg.hidden_size);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.mode = mode_from_string(j.value("mode", to_string(cfg.mode)));
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  cfg.patience = j.value("patience", cfg.patience);
  cfg.val_fraction = j.value("val_fraction", cfg.val_fraction);
  cfg.shuffle = j.value("shuffle", cfg.shuffle);
  cfg.validate();
  return cfg;
}

json report_to_json(const TrainReport& r) {
  return {{"epochs_run", r.epochs_run},
          {"best_epoch", r.best_epoch},
          {"best_val_risk", r.best_val_risk},
          {"val_risk_history", r.val_risk_history},
          {"train_indices", r.train_indices},
          {"val_indices", r.val_indices}};
}

TrainReport report_from_json(const json& j) {
  TrainReport r;
  r.epochs_run = j.at("epochs_run").get<std::size_t>();
  r.best_epoch = j.at("best_epoch").get<std::size_t>();
  r.best_val_risk = j.at("best_val_risk").get<double>();
  r.val_risk_history = j.at("val_risk_history").get<std::vector<double>>();
  r.train_indices = j.value("train_indices", std::vector<std::size_t>{});
  r.val_indices = j.value("val_indices", std::vector<std::size_t>{});
  return r;
}

json model_to_json(const ModelFile& m) {
  const auto& p = m.params;
  json j = {{"n", p.input_dim()}, {"l", p.hidden_size()}, {"W", p.W.data()}, {"b", p.b},
            {"V", p.V.data()},    {"c", p.c},             {"w", p.w},        {"d", p.d}};
  j["config"] = m.config ? config_to_json(*m.config) : json(nullptr);
  j["report"] = m.report ? report_to_json(*m.report) : json(nullptr);
  return j;
}

ModelFile model_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto l = j.at("l").get<std::size_t>();
    ModelFile m;
    auto& p = m.params;
    p.W = mat_from(j, l, n, "W");
    p.V = mat_from(j, 2, l, "V");
    p.b = j.at("b").get<DenseVec>();
    p.c = j.at("c").get<DenseVec>();
    p.w = j.at("w").get<DenseVec>();
    p.d = j.at("d").get<double>();
    p.check_shapes();
    if (j.contains("config") && !j["config"].is_null()) m.config = config_from_json(j["config"]);
    if (j.contains("report") && !j["report"].is_null()) m.report = report_from_json(j["report"]);
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("model json: ") + e.what());
  }
}

json svm_to_json(const SvmModel& m) {
  return {{"n", m.dim()}, {"weights", m.weights}, {"bias", m.bias}, {"C", m.c_param}};
}

SvmModel svm_from_json(const json& j) {
  try {
    SvmModel m{j.at("weights").get<DenseVec>(), j.at("bias").get<double>(), j.at("C").get<double>()};
    if (m.dim() != j.at("n").get<std::size_t>()) throw DataError("svm json: weight count != n");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("svm json: ") + e.what());
  }
}

json msda_to_json(const MsdaModel& m) {
  json layers = json::array();
  for (const auto& layer : m.layers) layers.push_back(layer.data());
  return {{"original_dim", m.original_dim}, {"kept_features", m.kept_features},
          {"corruption", m.corruption},     {"ridge", m.ridge},
          {"num_layers", m.num_layers()},   {"input_dim", m.input_dim()},
          {"layers", layers}};
}

MsdaModel msda_from_json(const json& j) {
  try {
    MsdaModel m;
    m.original_dim = j.at("original_dim").get<std::size_t>();
    m.kept_features = j.at("kept_features").get<std::vector<std::uint32_t>>();
    m.corruption = j.at("corruption").get<double>();
    m.ridge = j.at("ridge").get<double>();
    const auto d = m.input_dim();
    for (const auto& layer : j.at("layers")) {
      auto data = layer.get<std::vector<double>>();
      if (data.size() != d * (d + 1)) throw DataError("msda json: layer size mismatch");
      m.layers.emplace_back(d, d + 1, std::move(data));
    }
    if (m.num_layers() != j.at("num_layers").get<std::size_t>())
      throw DataError("msda json: layer count mismatch");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("msda json: ") + e.what());
  }
}

json pad_report_to_json(const PadReport& r) {
  json per_c = json::array();
  for (const auto& [c, e] : r.per_c_errors) per_c.push_back({{"C", c}, {"epsilon", e}});
  return {{"split_seed", r.split_seed},   {"split_attempts", r.split_attempts},
          {"train_size", r.train_size},   {"test_size", r.test_size},
          {"svm", {{"algorithm", "pegasos-linear"}, {"epochs", r.svm_epochs}}},
          {"per_c_errors", per_c},        {"best_epsilon", r.best_epsilon},
          {"pad_value", r.pad_value},     {"representation_tag", r.representation_tag}};
}

PadReport pad_report_from_json(const json& j) {
  try {
    PadReport r;
    r.split_seed = j.at("split_seed").get<std::uint64_t>();
    r.split_attempts = j.value("split_attempts", std::size_t{1});
    r.train_size = j.value("train_size", std::size_t{0});
    r.test_size = j.value("test_size", std::size_t{0});
    if (j.contains("svm")) r.svm_epochs = j["svm"].value("epochs", r.svm_epochs);
    for (const auto& e : j.at("per_c_errors"))
      r.per_c_errors.emplace_back(e.at("C").get<double>(), e.at("epsilon").get<double>());
    r.best_epsilon = j.at("best_epsilon").get<double>();
    r.pad_value = j.at("pad_value").get<double>();
    r.representation_tag = j.value("representation_tag", std::string{});
    r.check();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("pad json: ") + e.what());
  }
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dann
