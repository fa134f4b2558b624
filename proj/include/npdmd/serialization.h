#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "npdmd/classifier.h"
#include "npdmd/metrics.h"

namespace npdmd {

inline constexpr const char* kSchemaVersion = "1";

// Self-describing model document. Doubles are written with round-trip
// precision, so a reloaded model predicts bit-identically.
nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

// Keys: confusion, ccr, mwe, auc, angle_deg, piling_index (null when unset).
nlohmann::json report_to_json(const EvalReport& report);

void write_roc_csv(const std::vector<RocPoint>& points, std::ostream& out);

}  // namespace npdmd
