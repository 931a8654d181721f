#include <algorithm>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dann/error.hpp"
#include "dann/harness.hpp"
#include "dann/serialize.hpp"
#include "dann/svm.hpp"

namespace py = pybind11;
using namespace dann;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<int, py::array::c_style | py::array::forcecast>;

std::vector<SparseVec> rows_of(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array, got " + std::to_string(a.ndim()) + "-d");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto d = static_cast<std::size_t>(a.shape(1));
  std::vector<SparseVec> out;
  out.reserve(n);
  const double* p = a.data();
  for (std::size_t i = 0; i < n; ++i) out.push_back(SparseVec::from_dense({p + i * d, d}));
  return out;
}

std::vector<int> labels_of(const Labels& y, std::size_t n) {
  if (y.ndim() != 1 || static_cast<std::size_t>(y.shape(0)) != n)
    throw DimensionError("labels must be a 1-d array of length " + std::to_string(n));
  return {y.data(), y.data() + n};
}

py::array_t<int> to_labels(const std::vector<int>& y) {
  py::array_t<int> out(static_cast<py::ssize_t>(y.size()));
  std::copy(y.begin(), y.end(), out.mutable_data());
  return out;
}

LabeledSet labeled(const Array& x, const Labels& y) {
  auto rows = rows_of(x);
  LabeledSet s{"array", static_cast<std::size_t>(x.shape(1)), std::move(rows), labels_of(y, x.shape(0))};
  s.validate();
  return s;
}

Array to_array(std::span<const SparseVec> rows, std::size_t dim) {
  Array out({rows.size(), dim});
  auto* p = out.mutable_data();
  std::fill(p, p + rows.size() * dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& e : rows[i].entries()) p[i * dim + e.index] = e.value;
  return out;
}

Array mat_array(const DenseMat& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array vec_array(const DenseVec& v) {
  Array out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict pad_dict(const PadReport& r) { return py::module_::import("json").attr("loads")(pad_report_to_json(r).dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Domain-adversarial neural networks, linear SVM, proxy A-distance and mSDA";

  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  py::enum_<Mode>(m, "Mode")
      .value("DANN", Mode::Dann)
      .value("NN_PLAIN", Mode::NnPlain)
      .value("NN_WITH_REGRESSOR", Mode::NnWithRegressor);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("hidden_size", &TrainConfig::hidden_size)
      .def_readwrite("lambda_", &TrainConfig::lambda)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("mode", &TrainConfig::mode)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("val_fraction", &TrainConfig::val_fraction)
      .def_readwrite("shuffle", &TrainConfig::shuffle)
      .def("validate", &TrainConfig::validate)
      .def("to_json", [](const TrainConfig& c) { return config_to_json(c).dump(); });

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("epochs_run", &TrainReport::epochs_run)
      .def_readonly("best_epoch", &TrainReport::best_epoch)
      .def_readonly("best_val_risk", &TrainReport::best_val_risk)
      .def_readonly("val_risk_history", &TrainReport::val_risk_history)
      .def_readonly("train_indices", &TrainReport::train_indices)
      .def_readonly("val_indices", &TrainReport::val_indices);

  py::class_<DannParams>(m, "Network")
      .def_property_readonly("input_dim", &DannParams::input_dim)
      .def_property_readonly("hidden_size", &DannParams::hidden_size)
      .def_property_readonly("W", [](const DannParams& p) { return mat_array(p.W); })
      .def_property_readonly("b", [](const DannParams& p) { return vec_array(p.b); })
      .def_property_readonly("V", [](const DannParams& p) { return mat_array(p.V); })
      .def_property_readonly("c", [](const DannParams& p) { return vec_array(p.c); })
      .def_property_readonly("w", [](const DannParams& p) { return vec_array(p.w); })
      .def_property_readonly("d", [](const DannParams& p) { return p.d; })
      .def("predict",
           [](const DannParams& p, const Array& x) {
             auto rows = rows_of(x);
             std::vector<int> out;
             out.reserve(rows.size());
             for (const auto& r : rows) out.push_back(predict(p, r));
             return to_labels(out);
           })
      .def("predict_proba",
           [](const DannParams& p, const Array& x) {
             auto rows = rows_of(x);
             Array out({rows.size(), std::size_t{2}});
             auto* q = out.mutable_data();
             for (std::size_t i = 0; i < rows.size(); ++i) {
               const auto f = forward_output(p, forward_hidden(p, rows[i]));
               q[2 * i] = f[0];
               q[2 * i + 1] = f[1];
             }
             return out;
           })
      .def("domain_proba",
           [](const DannParams& p, const Array& x) {
             auto rows = rows_of(x);
             Array out(rows.size());
             auto* q = out.mutable_data();
             for (std::size_t i = 0; i < rows.size(); ++i) q[i] = domain_regressor(p, forward_hidden(p, rows[i]));
             return out;
           })
      .def("hidden",
           [](const DannParams& p, const Array& x) {
             auto rows = rows_of(x);
             return to_array(hidden_representation(p, rows), p.hidden_size());
           })
      .def("risk", [](const DannParams& p, const Array& x, const Labels& y) { return risk(p, labeled(x, y)); })
      .def("domain_accuracy",
           [](const DannParams& p, const Array& xs, const Array& xt) {
             return domain_accuracy(p, rows_of(xs), rows_of(xt));
           })
      .def("to_json", [](const DannParams& p) { return model_to_json({p, std::nullopt, std::nullopt}).dump(); })
      .def_static("from_json", [](const std::string& s) { return model_from_json(json::parse(s)).params; })
      .def(py::self == py::self);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("network", &TrainResult::params)
      .def_readonly("report", &TrainResult::report);

  m.def(
      "train",
      [](const Array& xs, const Labels& ys, std::optional<Array> xt, const TrainConfig& cfg) {
        const auto s = labeled(xs, ys);
        UnlabeledSet t{"target", s.dim, xt ? rows_of(*xt) : std::vector<SparseVec>{}};
        py::gil_scoped_release release;
        return train(s, t, cfg);
      },
      py::arg("xs"), py::arg("ys"), py::arg("xt") = py::none(), py::arg("config") = TrainConfig{});

  py::class_<SvmModel>(m, "SvmModel")
      .def_property_readonly("weights", [](const SvmModel& s) { return vec_array(s.weights); })
      .def_readonly("bias", &SvmModel::bias)
      .def_readonly("C", &SvmModel::c_param)
      .def("decision",
           [](const SvmModel& s, const Array& x) {
             auto rows = rows_of(x);
             Array out(rows.size());
             for (std::size_t i = 0; i < rows.size(); ++i) out.mutable_data()[i] = svm_decision(s, rows[i]);
             return out;
           })
      .def("predict",
           [](const SvmModel& s, const Array& x) {
             auto rows = rows_of(x);
             std::vector<int> out;
             for (const auto& r : rows) out.push_back(svm_predict(s, r));
             return to_labels(out);
           })
      .def("error", [](const SvmModel& s, const Array& x, const Labels& y) { return svm_error(s, labeled(x, y)); });

  m.def(
      "svm_train",
      [](const Array& x, const Labels& y, double C, std::size_t epochs, std::uint64_t seed) {
        return svm_train(labeled(x, y), {C, epochs, seed});
      },
      py::arg("x"), py::arg("y"), py::arg("C") = 1.0, py::arg("epochs") = 50, py::arg("seed") = 0);

  m.def("pad_from_error", &pad_from_error, py::arg("epsilon"));
  m.def("empirical_h_divergence", &empirical_h_divergence, py::arg("err_source_as_1"), py::arg("err_target_as_0"));
  m.def("default_c_grid", &default_c_grid, py::arg("count") = 10);
  m.def(
      "proxy_a_distance",
      [](const Array& xs, const Array& xt, std::uint64_t seed, std::optional<std::vector<double>> c_grid,
         std::size_t svm_epochs, std::size_t jobs) {
        PadOptions po;
        if (c_grid) po.c_grid = *c_grid;
        po.seed = seed;
        po.svm_epochs = svm_epochs;
        po.jobs = jobs;
        auto s = rows_of(xs);
        auto t = rows_of(xt);
        PadReport r;
        {
          py::gil_scoped_release release;
          r = compute_pad(s, t, po);
        }
        return pad_dict(r);
      },
      py::arg("xs"), py::arg("xt"), py::arg("seed") = 0, py::arg("c_grid") = py::none(), py::arg("svm_epochs") = 50,
      py::arg("jobs") = 1);

  py::class_<MsdaModel>(m, "MsdaModel")
      .def_property_readonly("input_dim", &MsdaModel::input_dim)
      .def_property_readonly("output_dim", &MsdaModel::output_dim)
      .def_property_readonly("num_layers", &MsdaModel::num_layers)
      .def("layer", [](const MsdaModel& s, std::size_t k) { return mat_array(s.layers.at(k)); })
      .def("transform",
           [](const MsdaModel& s, const Array& x) {
             auto rows = rows_of(x);
             return to_array(msda_transform(s, rows), s.output_dim());
           })
      .def("to_json", [](const MsdaModel& s) { return msda_to_json(s).dump(); })
      .def_static("from_json", [](const std::string& s) { return msda_from_json(json::parse(s)); });

  m.def(
      "msda_fit",
      [](const Array& x, double corruption, std::size_t layers, double ridge, std::size_t keep_features) {
        return msda_fit(rows_of(x), {corruption, layers, ridge, keep_features});
      },
      py::arg("x"), py::arg("corruption") = 0.5, py::arg("layers") = 5, py::arg("ridge") = 1e-5,
      py::arg("keep_features") = 0);

  m.def(
      "gen_moons",
      [](std::size_t n_per_moon, double rotation_deg, double noise_sd, std::uint64_t seed) {
        MoonsConfig mc;
        mc.n_per_moon = n_per_moon;
        mc.rotation_deg = rotation_deg;
        mc.noise_sd = noise_sd;
        mc.seed = seed;
        const auto d = gen_moons(mc);
        return py::make_tuple(to_array(d.source.x, 2), to_labels(d.source.y),
                              to_array(d.target.x, 2),
                              to_labels(d.target_truth.y));
      },
      py::arg("n_per_moon") = 150, py::arg("rotation_deg") = 35.0, py::arg("noise_sd") = 0.1, py::arg("seed") = 1);

  m.def(
      "run_moons_pipeline",
      [](const std::filesystem::path& out_dir, std::uint64_t seed, std::optional<TrainConfig> cfg) {
        MoonsRunConfig rc;
        rc.moons.seed = seed;
        if (cfg) rc.train = *cfg;
        MoonsRunSummary s;
        {
          py::gil_scoped_release release;
          s = run_moons_pipeline(rc, out_dir);
        }
        py::dict d;
        d["source_risk"] = s.source_risk;
        d["target_risk"] = s.target_risk;
        d["domain_accuracy"] = s.domain_accuracy;
        d["pad_raw"] = s.pad_raw.pad_value;
        d["pad_hidden"] = s.pad_hidden.pad_value;
        return d;
      },
      py::arg("out_dir"), py::arg("seed") = 1, py::arg("config") = py::none());
}
