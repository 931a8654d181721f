#pragma once

// JSON documents for models and reports. Doubles are written in shortest
// round-trip form, so save → load is bit-exact for finite values.

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "dann/divergence.hpp"
#include "dann/msda.hpp"
#include "dann/network.hpp"
#include "dann/svm.hpp"

namespace dann {

using json = nlohmann::json;

json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const json& j);

json report_to_json(const TrainReport& r);
TrainReport report_from_json(const json& j);

/// Model document {n, l, W, b, V, c, w, d, config, report}; W and V row-major.
struct ModelFile {
  DannParams params;
  std::optional<TrainConfig> config;
  std::optional<TrainReport> report;
};

json model_to_json(const ModelFile& m);
ModelFile model_from_json(const json& j);

json svm_to_json(const SvmModel& m);
SvmModel svm_from_json(const json& j);

json msda_to_json(const MsdaModel& m);
MsdaModel msda_from_json(const json& j);

json pad_report_to_json(const PadReport& r);
/// Re-checks the PAD arithmetic invariant.
PadReport pad_report_from_json(const json& j);

json read_json(const std::filesystem::path& path);
/// Writes `j` indented by 2, with a trailing newline.
void write_json(const json& j, const std::filesystem::path& path);

}  // namespace dann
