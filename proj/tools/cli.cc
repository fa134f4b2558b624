#include "cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <thread>

#include "CLI11.hpp"
#include "npdmd/classifier.h"
#include "npdmd/dataset.h"
#include "npdmd/error.h"
#include "npdmd/metrics.h"
#include "npdmd/serialization.h"
#include "npdmd/simulation.h"
#include "npdmd/tuning.h"

namespace npdmd::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitInternal = 4;

struct DataOptions {
  std::string data;
  std::string labels_col = "last";
  std::string format = "csv";
};

struct SolverOptions {
  double lambda_frac = Hyperparams{}.lambda_fraction;
  double c0 = Hyperparams{}.c0;
  double tol = Hyperparams{}.tol;
  long max_passes = 0;

  Hyperparams hyperparams() const {
    Hyperparams hp;
    hp.lambda_fraction = lambda_frac;
    hp.c0 = c0;
    hp.tol = tol;
    hp.max_passes = max_passes;
    return hp;
  }
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool required = true) {
  auto* opt = cmd->add_option("--data", o.data, "Input table (CSV or libsvm)");
  if (required) opt->required();
  cmd->add_option("--labels-col", o.labels_col,
                  "Label column: last, first, 0-based index or header name")
      ->capture_default_str();
  cmd->add_option("--format", o.format, "Input format")
      ->check(CLI::IsMember({"csv", "libsvm"}))
      ->capture_default_str();
}

void add_solver_options(CLI::App* cmd, SolverOptions& o) {
  cmd->add_option("--lambda-frac", o.lambda_frac, "Scatter weight as a fraction of its bound")
      ->capture_default_str();
  cmd->add_option("--c0", o.c0, "Slack penalty")->capture_default_str();
  cmd->add_option("--tol", o.tol, "KKT tolerance of the dual solver")->capture_default_str();
  cmd->add_option("--max-passes", o.max_passes, "Pair-update budget (0: 10^4 * n)")
      ->capture_default_str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

// Writes to `path` when given, standard output otherwise.
template <typename Fn>
void emit(const std::string& path, std::ostream& stdout_stream, Fn&& fn) {
  if (path.empty()) {
    fn(stdout_stream);
  } else {
    std::ofstream file = open_output(path);
    fn(file);
  }
}

Dataset load(const DataOptions& o) {
  return load_table(o.data, parse_format(o.format), o.labels_col);
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

void add_confusion(Confusion& into, const Confusion& c) {
  for (int r = 0; r < 2; ++r) {
    for (int col = 0; col < 2; ++col) into[r][col] += c[r][col];
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum-dispersion linear classification for high-dimension low-sample-size data"};
  app.require_subcommand(1);

  DataOptions data;
  SolverOptions solver;
  std::string out_path;
  std::string out_format;
  std::uint64_t seed = 0;

  // train
  auto* train = app.add_subcommand("train", "Fit a model and write it as JSON");
  add_data_options(train, data);
  add_solver_options(train, solver);
  std::string method_name = "npdmd";
  train->add_option("--method", method_name, "npdmd, svm or md")
      ->check(CLI::IsMember({"npdmd", "svm", "md"}))
      ->capture_default_str();
  train->add_option("--out", out_path, "Model file")->required();

  // predict
  std::string model_path;
  auto* predict_cmd = app.add_subcommand("predict", "Score a table with a saved model");
  add_data_options(predict_cmd, data);
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--out", out_path, "Prediction CSV (default: stdout)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Report CCR, MWE, AUC and piling");
  add_data_options(evaluate_cmd, data);
  add_solver_options(evaluate_cmd, solver);
  std::string test_path;
  std::string roc_path;
  bool ovr_mode = false;
  int cv_folds = 0;
  int folds = 3;
  int repeats = 1;
  std::vector<double> grid_lambda = default_lambda_grid();
  std::vector<double> grid_c0 = default_c0_grid();
  evaluate_cmd->add_option("--model", model_path, "Model file");
  evaluate_cmd->add_option("--test", test_path, "Held-out table for --one-vs-rest");
  evaluate_cmd->add_flag("--one-vs-rest", ovr_mode,
                         "Train each class against the rest on --data, score --test");
  evaluate_cmd->add_option("--cv", cv_folds, "Outer folds for tuned cross-validation");
  evaluate_cmd->add_option("--folds", folds, "Inner tuning folds")->capture_default_str();
  evaluate_cmd->add_option("--repeats", repeats, "Outer cross-validation repeats")
      ->capture_default_str();
  evaluate_cmd->add_option("--grid-lambda", grid_lambda)->delimiter(',');
  evaluate_cmd->add_option("--grid-c0", grid_c0)->delimiter(',');
  evaluate_cmd->add_option("--seed", seed)->capture_default_str();
  evaluate_cmd->add_option("--roc-out", roc_path, "ROC points CSV");
  evaluate_cmd->add_option("--out", out_path, "Report JSON (default: stdout)");

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Grid search by k-fold cross-validation");
  add_data_options(tune_cmd, data);
  add_solver_options(tune_cmd, solver);
  tune_cmd->add_option("--folds", folds)->capture_default_str();
  tune_cmd->add_option("--repeats", repeats)->capture_default_str();
  tune_cmd->add_option("--grid-lambda", grid_lambda)->delimiter(',');
  tune_cmd->add_option("--grid-c0", grid_c0)->delimiter(',');
  tune_cmd->add_option("--seed", seed)->capture_default_str();
  tune_cmd->add_option("--out", out_path, "Fold-by-fold CV table (CSV)");

  // simulate
  SimSpec sim;
  int replication = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Write one Gaussian train/test draw");
  simulate_cmd->add_option("--dim", sim.d)->required();
  simulate_cmd->add_option("--n-plus", sim.n_plus)->capture_default_str();
  simulate_cmd->add_option("--n-minus", sim.n_minus)->capture_default_str();
  simulate_cmd->add_option("--n-test", sim.n_test_per_class, "Test samples per class")
      ->capture_default_str();
  simulate_cmd->add_option("--mahalanobis", sim.mahalanobis)->capture_default_str();
  simulate_cmd->add_option("--seed", seed)->capture_default_str();
  simulate_cmd->add_option("--replication", replication)->capture_default_str();
  simulate_cmd->add_option("--out", out_path, "Output directory")->required();

  // study
  StudyConfig study;
  std::vector<Index> dims = default_dimensions();
  std::vector<std::string> method_names = {"npdmd", "svm", "md"};
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool no_timing = false;
  std::string summary_path;
  auto* study_cmd = app.add_subcommand("study", "Dimension sweep over simulated data");
  study_cmd->add_option("--dims", dims)->delimiter(',');
  study_cmd->add_option("--methods", method_names, "npdmd, svm, md, bayes")->delimiter(',');
  study_cmd->add_option("--reps", study.base.replications)->capture_default_str();
  study_cmd->add_option("--n-plus", study.base.n_plus)->capture_default_str();
  study_cmd->add_option("--n-minus", study.base.n_minus)->capture_default_str();
  study_cmd->add_option("--n-test", study.base.n_test_per_class)->capture_default_str();
  study_cmd->add_option("--mahalanobis", study.base.mahalanobis)->capture_default_str();
  study_cmd->add_option("--folds", folds)->capture_default_str();
  study_cmd->add_option("--grid-lambda", grid_lambda)->delimiter(',');
  study_cmd->add_option("--grid-c0", grid_c0)->delimiter(',');
  study_cmd->add_option("--seed", seed)->capture_default_str();
  study_cmd->add_option("--jobs", jobs)->capture_default_str();
  study_cmd->add_flag("--no-timing", no_timing, "Write 0 for train_seconds");
  study_cmd->add_option("--out", out_path, "Per-cell CSV")->required();
  study_cmd->add_option("--summary-out", summary_path, "Per-(d, method) means (default: stdout)");

  for (auto* cmd : {train, predict_cmd, evaluate_cmd, tune_cmd, simulate_cmd, study_cmd}) {
    cmd->add_option("--out-format", out_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitData;
  }

  try {
    if (train->parsed()) {
      const Dataset ds = load(data);
      const auto start = std::chrono::steady_clock::now();
      TrainedModel model;
      if (method_name == "md") {
        model = train_md(ds);
      } else if (method_name == "svm") {
        model = train_svm(ds, solver.hyperparams());
      } else {
        model = train_npdmd(ds, solver.hyperparams());
      }
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      save_model(model, out_path);
      out << json{{"schema_version", kSchemaVersion},
                  {"method", to_string(model.method)},
                  {"n", ds.size()},
                  {"d", ds.dim()},
                  {"support_vectors", model.support_indices.size()},
                  {"kkt_violation", model.kkt_violation},
                  {"converged", model.converged},
                  {"iterations", model.iterations},
                  {"lambda", model.lambda},
                  {"b", model.b},
                  {"seconds", seconds}}
                 .dump()
          << '\n';
      if (!model.converged) {
        err << "solver did not converge within the pass budget; model written with flag set\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }

    if (predict_cmd->parsed()) {
      const TrainedModel model = load_model(model_path);
      const RawTable table = load_raw_table(data.data, parse_format(data.format), data.labels_col);
      const Prediction pred = predict(model, table.features);
      emit(out_path, out, [&](std::ostream& s) {
        if (out_format == "json") {
          json rows = json::array();
          for (Index i = 0; i < pred.scores.size(); ++i) {
            rows.push_back({{"row", i}, {"score", pred.scores[i]}, {"label", static_cast<int>(pred.labels[i])}});
          }
          s << json{{"schema_version", kSchemaVersion}, {"predictions", rows}}.dump() << '\n';
          return;
        }
        s << "row,score,label\n" << std::setprecision(17);
        for (Index i = 0; i < pred.scores.size(); ++i) {
          s << i << ',' << pred.scores[i] << ',' << (pred.labels[i] > 0 ? "+1" : "-1") << '\n';
        }
      });
      return kExitOk;
    }

    if (evaluate_cmd->parsed()) {
      if (ovr_mode) {
        if (test_path.empty()) throw Error(ErrorCode::kInvalidArgument, "--one-vs-rest needs --test");
        const auto fmt = parse_format(data.format);
        const RawTable train_table = load_raw_table(data.data, fmt, data.labels_col);
        const RawTable test_table = load_raw_table(test_path, fmt, data.labels_col);
        Confusion pooled{};
        json per_class = json::array();
        double mwe_sum = 0.0;
        bool converged = true;
        for (const std::string& label : distinct_labels(train_table)) {
          const Dataset tr = one_vs_rest(train_table, label);
          const Dataset te = one_vs_rest(test_table, label);
          const TrainedModel model = train_npdmd(tr, solver.hyperparams());
          converged = converged && model.converged;
          const Prediction pred = predict(model, te.features());
          const Confusion c = confusion_matrix(te.labels(), pred.labels);
          add_confusion(pooled, c);
          json entry{{"class", label}, {"ccr", correct_rate(te.labels(), pred.labels)}};
          if (te.has_both_classes()) {
            const EvalReport r = evaluate(te.labels(), pred.labels, pred.scores);
            mwe_sum += r.mwe;
            entry["mwe"] = r.mwe;
            entry["auc"] = r.auc;
          }
          entry["confusion"] = {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}};
          per_class.push_back(entry);
        }
        const double total = static_cast<double>(pooled[0][0] + pooled[0][1] + pooled[1][0] + pooled[1][1]);
        const json doc{{"schema_version", kSchemaVersion},
                       {"mode", "one-vs-rest"},
                       {"pooled_confusion", {{pooled[0][0], pooled[0][1]}, {pooled[1][0], pooled[1][1]}}},
                       {"pooled_cell_ccr", static_cast<double>(pooled[0][0] + pooled[1][1]) / total},
                       {"mean_class_mwe", mwe_sum / static_cast<double>(per_class.size())},
                       {"classes", per_class}};
        emit(out_path, out, [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
        return converged ? kExitOk : kExitNotConverged;
      }

      const Dataset ds = load(data);
      if (cv_folds > 0) {
        TuneOptions inner;
        inner.lambda_grid = grid_lambda;
        inner.c0_grid = grid_c0;
        inner.folds = folds;
        inner.base = solver.hyperparams();
        const NestedCvResult r = nested_cross_validation(ds, cv_folds, repeats, inner, seed);
        const auto& p = r.pooled;
        const json doc{{"schema_version", kSchemaVersion},
                       {"mode", "cross-validation"},
                       {"outer_folds", cv_folds},
                       {"repeats", repeats},
                       {"confusion", {{p[0][0], p[0][1]}, {p[1][0], p[1][1]}}},
                       {"ccr", r.pooled_ccr},
                       {"mwe", r.mean_mwe},
                       {"fold_ccr", r.fold_ccr}};
        emit(out_path, out, [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
        return kExitOk;
      }

      if (model_path.empty()) throw Error(ErrorCode::kInvalidArgument, "evaluate needs --model");
      const TrainedModel model = load_model(model_path);
      const Prediction pred = predict(model, ds.features());
      EvalReport report = evaluate(ds.labels(), pred.labels, pred.scores);
      if (!model.degenerate) report.piling_index = piling_index(model, ds);
      if (!roc_path.empty()) {
        std::ofstream roc = open_output(roc_path);
        write_roc_csv(roc_curve(ds.labels(), pred.scores), roc);
      }
      emit(out_path, out, [&](std::ostream& s) { s << report_to_json(report).dump(2) << '\n'; });
      return kExitOk;
    }

    if (tune_cmd->parsed()) {
      const Dataset ds = load(data);
      TuneOptions options;
      options.lambda_grid = grid_lambda;
      options.c0_grid = grid_c0;
      options.folds = folds;
      options.repeats = repeats;
      options.seed = seed;
      options.base = solver.hyperparams();
      const TuneResult result = tune(ds, options);
      if (!out_path.empty()) {
        std::ofstream table = open_output(out_path);
        table << "repeat,fold,lambda_frac,c0,ccr,mwe\n" << std::setprecision(17);
        for (const CvRow& r : result.table) {
          table << r.repeat << ',' << r.fold << ',' << r.lambda_fraction << ',' << r.c0 << ','
                << r.ccr << ',' << r.mwe << '\n';
        }
      }
      out << json{{"schema_version", kSchemaVersion},
                  {"lambda_frac", result.best.lambda_fraction},
                  {"c0", result.best.c0},
                  {"mean_cv_ccr", result.best_mean_ccr},
                  {"folds", folds},
                  {"rows", result.table.size()}}
                 .dump()
          << '\n';
      return kExitOk;
    }

    if (simulate_cmd->parsed()) {
      sim.seed = seed;
      const SimulatedData draw = generate(sim, replication);
      const std::filesystem::path dir(out_path);
      std::filesystem::create_directories(dir);
      write_table(draw.train, dir / "train.csv");
      write_table(draw.test, dir / "test.csv");
      std::ofstream oracle = open_output((dir / "oracle.json").string());
      std::vector<double> w(draw.oracle.w.data(), draw.oracle.w.data() + draw.oracle.w.size());
      oracle << json{{"schema_version", kSchemaVersion},
                     {"c", sim.c()},
                     {"imbalance", sim.imbalance()},
                     {"w", w},
                     {"b", draw.oracle.b}}
                    .dump()
             << '\n';
      return kExitOk;
    }

    if (study_cmd->parsed()) {
      study.dims = dims;
      study.methods = parse_methods(method_names);
      study.base.seed = seed;
      study.tuning.lambda_grid = grid_lambda;
      study.tuning.c0_grid = grid_c0;
      study.tuning.folds = folds;
      study.jobs = jobs;
      study.record_timing = !no_timing;
      const std::vector<StudyRow> rows = run_study(study);
      {
        std::ofstream cells = open_output(out_path);
        write_study_csv(rows, cells);
      }
      const auto summary = summarize(rows);
      emit(summary_path, out, [&](std::ostream& s) {
        if (out_format == "json") {
          json doc = json::array();
          for (const auto& r : summary) {
            doc.push_back({{"d", r.d}, {"method", to_string(r.method)}, {"succeeded", r.succeeded},
                           {"failed", r.failed}, {"ccr", r.ccr}, {"ccr_sd", r.ccr_sd}, {"mwe", r.mwe},
                           {"angle_deg", r.angle_deg}, {"piling_index", r.piling_index},
                           {"train_seconds", r.train_seconds}});
          }
          s << json{{"schema_version", kSchemaVersion}, {"summary", doc}}.dump(2) << '\n';
        } else {
          write_summary_csv(summary, s);
        }
      });
      bool any_ok = false;
      for (const StudyRow& r : rows) {
        if (!r.ok) err << "cell d=" << r.d << " method=" << to_string(r.method) << " rep=" << r.replication
                       << " failed: " << r.error << '\n';
        any_ok = any_ok || r.ok;
      }
      return any_ok ? kExitOk : kExitData;
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace npdmd::cli
