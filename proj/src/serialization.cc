#include "npdmd/serialization.h"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "npdmd/error.h"

namespace npdmd {

namespace {

using nlohmann::json;

json to_array(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector from_array(const json& doc, const char* key) {
  const json& arr = doc.at(key);
  Vector v(static_cast<Index>(arr.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = arr.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json model_to_json(const TrainedModel& model) {
  json support = json::array();
  for (Index i : model.support_indices) support.push_back(i);
  return json{
      {"schema_version", kSchemaVersion},
      {"kind", "npdmd-linear-model"},
      {"method", to_string(model.method)},
      {"dim", model.dim()},
      {"w", to_array(model.w)},
      {"b", model.b},
      {"center", to_array(model.center)},
      {"alpha", to_array(model.alpha)},
      {"support_indices", support},
      {"hyperparams",
       {{"lambda_fraction", model.hyperparams.lambda_fraction},
        {"c0", model.hyperparams.c0},
        {"tol", model.hyperparams.tol},
        {"max_passes", model.hyperparams.max_passes}}},
      {"lambda", model.lambda},
      {"source", model.source},
      {"converged", model.converged},
      {"kkt_violation", model.kkt_violation},
      {"dual_objective", model.dual_objective},
      {"iterations", model.iterations},
      {"degenerate", model.degenerate},
  };
}

TrainedModel model_from_json(const json& doc) {
  try {
    if (doc.at("schema_version").get<std::string>() != kSchemaVersion) {
      throw Error(ErrorCode::kBadModel, "unsupported schema_version");
    }
    TrainedModel m;
    m.method = parse_method(doc.at("method").get<std::string>());
    m.w = from_array(doc, "w");
    m.b = doc.at("b").get<double>();
    m.center = from_array(doc, "center");
    m.alpha = from_array(doc, "alpha");
    for (const auto& i : doc.at("support_indices")) m.support_indices.push_back(i.get<Index>());
    const json& hp = doc.at("hyperparams");
    m.hyperparams.lambda_fraction = hp.at("lambda_fraction").get<double>();
    m.hyperparams.c0 = hp.at("c0").get<double>();
    m.hyperparams.tol = hp.at("tol").get<double>();
    m.hyperparams.max_passes = hp.at("max_passes").get<long>();
    m.lambda = doc.at("lambda").get<double>();
    m.source = doc.value("source", std::string{});
    m.converged = doc.value("converged", true);
    m.kkt_violation = doc.value("kkt_violation", 0.0);
    m.dual_objective = doc.value("dual_objective", 0.0);
    m.iterations = doc.value("iterations", 0L);
    m.degenerate = doc.value("degenerate", false);
    if (m.w.size() == 0 || (m.center.size() != 0 && m.center.size() != m.w.size())) {
      throw Error(ErrorCode::kBadModel, "direction and center lengths are inconsistent");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadModel, e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kBadModel, "cannot open model " + path.string());
  try {
    return model_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadModel, path.string() + ": " + e.what());
  }
}

json report_to_json(const EvalReport& r) {
  return json{
      {"schema_version", kSchemaVersion},
      {"confusion", {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}}},
      {"ccr", r.ccr},
      {"mwe", r.mwe},
      {"auc", r.auc},
      {"angle_deg", optional_number(r.angle_deg)},
      {"piling_index", optional_number(r.piling_index)},
  };
}

void write_roc_csv(const std::vector<RocPoint>& points, std::ostream& out) {
  out << "fpr,tpr,threshold\n" << std::setprecision(17);
  for (const RocPoint& p : points) out << p.fpr << ',' << p.tpr << ',' << p.threshold << '\n';
}

}  // namespace npdmd
