#include "npdmd/simulation.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include "npdmd/error.h"
#include "npdmd/metrics.h"
#include "npdmd/random.h"

namespace npdmd {

namespace {

enum class Role : std::uint64_t { kTrain = 0, kTest = 1 };

void fill_class(Matrix& x, Vector& y, Index offset, Index count, double mean, double label,
                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = offset; i < offset + count; ++i) {
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = mean + normal(rng);
    y[i] = label;
  }
}

Dataset draw(const SimSpec& spec, int replication, Role role, Index n_plus, Index n_minus) {
  Matrix x(n_plus + n_minus, spec.d);
  Vector y(n_plus + n_minus);
  const auto rep = static_cast<std::uint64_t>(replication);
  const auto r = static_cast<std::uint64_t>(role);
  fill_class(x, y, 0, n_plus, spec.c(), 1.0, derive_seed(spec.seed, {rep, r, 0}));
  fill_class(x, y, n_plus, n_minus, -spec.c(), -1.0, derive_seed(spec.seed, {rep, r, 1}));
  const std::string source = "simulation(d=" + std::to_string(spec.d) +
                             ", seed=" + std::to_string(spec.seed) +
                             ", replication=" + std::to_string(replication) + ", " +
                             (role == Role::kTrain ? "train" : "test") + ")";
  return Dataset(std::move(x), std::move(y), {}, source);
}

StudyRow run_cell(const StudyConfig& config, const SimulatedData& data, Index d, Method method,
                  int replication) {
  StudyRow row;
  row.d = d;
  row.method = method;
  row.replication = replication;
  try {
    const auto start = std::chrono::steady_clock::now();
    TrainedModel model;
    switch (method) {
      case Method::kNpdmd:
      case Method::kSvm: {
        TuneOptions options = config.tuning;
        if (method == Method::kSvm) options.lambda_grid = {0.0};
        options.seed = derive_seed(config.base.seed, {static_cast<std::uint64_t>(d),
                                                      static_cast<std::uint64_t>(replication),
                                                      0x7475ULL});
        const TuneResult tuned = tune(data.train, options);
        model = method == Method::kSvm ? train_svm(data.train, tuned.best)
                                       : train_npdmd(data.train, tuned.best);
        row.chosen = tuned.best;
        break;
      }
      case Method::kMd:
        model = train_md(data.train);
        break;
      case Method::kBayes:
        model = make_linear_model(Method::kBayes, data.oracle);
        break;
    }
    const auto stop = std::chrono::steady_clock::now();
    if (config.record_timing) {
      row.train_seconds = std::chrono::duration<double>(stop - start).count();
    }
    const Prediction pred = predict(model, data.test.features());
    const EvalReport report = evaluate(data.test.labels(), pred.labels, pred.scores);
    row.ccr = report.ccr;
    row.mwe = report.mwe;
    row.angle_deg = angle_between(model.w, data.oracle.w);
    row.piling_index = piling_index(model, data.test);
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

double SimSpec::c() const { return mahalanobis / (2.0 * std::sqrt(static_cast<double>(d))); }

double SimSpec::imbalance() const {
  const double hi = static_cast<double>(std::max(n_plus, n_minus));
  const double lo = static_cast<double>(std::min(n_plus, n_minus));
  return hi / lo;
}

void SimSpec::validate() const {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (n_plus < 1 || n_minus < 1 || n_test_per_class < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sample counts must be >= 1");
  }
  if (!(mahalanobis > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mahalanobis must be > 0");
  if (replications < 1) throw Error(ErrorCode::kInvalidArgument, "replications must be >= 1");
}

const std::vector<Index>& default_dimensions() {
  static const std::vector<Index> dims{80, 150, 240, 650, 900, 1500, 2400};
  return dims;
}

SimulatedData generate(const SimSpec& spec, int replication) {
  spec.validate();
  SimulatedData out{draw(spec, replication, Role::kTrain, spec.n_plus, spec.n_minus),
                    draw(spec, replication, Role::kTest, spec.n_test_per_class,
                         spec.n_test_per_class),
                    {}};
  // Identity covariance: Σ^{-1}(μ+ - μ-) = 2c·1 and the intercept vanishes.
  out.oracle.w = Vector::Constant(spec.d, 2.0 * spec.c());
  out.oracle.b = 0.0;
  return out;
}

std::vector<StudyRow> run_study(const StudyConfig& config) {
  config.base.validate();
  if (config.dims.empty() || config.methods.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "study needs at least one dimension and method");
  }
  const int reps = config.base.replications;
  const std::size_t n_methods = config.methods.size();
  std::vector<StudyRow> rows(config.dims.size() * n_methods * static_cast<std::size_t>(reps));

  // One task per (d, replication): the simulated data is shared by all methods.
  const std::size_t tasks = config.dims.size() * static_cast<std::size_t>(reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t di = t / static_cast<std::size_t>(reps);
      const int rep = static_cast<int>(t % static_cast<std::size_t>(reps));
      SimSpec spec = config.base;
      spec.d = config.dims[di];
      std::optional<SimulatedData> data;
      std::string failure;
      try {
        data = generate(spec, rep);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        const std::size_t slot = (di * n_methods + mi) * static_cast<std::size_t>(reps) +
                                 static_cast<std::size_t>(rep);
        if (data) {
          rows[slot] = run_cell(config, *data, spec.d, config.methods[mi], rep);
        } else {
          rows[slot].d = spec.d;
          rows[slot].method = config.methods[mi];
          rows[slot].replication = rep;
          rows[slot].error = failure;
        }
      }
    }
  };
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return rows;
}

std::vector<StudySummary> summarize(const std::vector<StudyRow>& rows) {
  std::vector<StudySummary> out;
  std::map<std::pair<Index, Method>, std::size_t> slot;
  std::vector<std::vector<double>> ccrs;
  for (const StudyRow& row : rows) {
    auto [it, inserted] = slot.try_emplace({row.d, row.method}, out.size());
    if (inserted) {
      out.push_back({});
      out.back().d = row.d;
      out.back().method = row.method;
      ccrs.emplace_back();
    }
    StudySummary& s = out[it->second];
    if (!row.ok) {
      ++s.failed;
      continue;
    }
    ++s.succeeded;
    s.ccr += row.ccr;
    s.mwe += row.mwe;
    s.angle_deg += row.angle_deg;
    s.piling_index += row.piling_index;
    s.train_seconds += row.train_seconds;
    ccrs[it->second].push_back(row.ccr);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    StudySummary& s = out[i];
    if (s.succeeded == 0) continue;
    const double k = s.succeeded;
    s.ccr /= k;
    s.mwe /= k;
    s.angle_deg /= k;
    s.piling_index /= k;
    s.train_seconds /= k;
    double ss = 0.0;
    for (double v : ccrs[i]) ss += (v - s.ccr) * (v - s.ccr);
    s.ccr_sd = s.succeeded > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  }
  return out;
}

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out) {
  out << "d,method,replication,ccr,mwe,angle_deg,piling_index,train_seconds\n";
  out << std::setprecision(12);
  for (const StudyRow& r : rows) {
    out << r.d << ',' << to_string(r.method) << ',' << r.replication << ',';
    if (r.ok) {
      out << r.ccr << ',' << r.mwe << ',' << r.angle_deg << ',' << r.piling_index << ','
          << r.train_seconds << '\n';
    } else {
      out << "nan,nan,nan,nan,nan\n";
    }
  }
}

void write_summary_csv(const std::vector<StudySummary>& summary, std::ostream& out) {
  out << "d,method,succeeded,failed,ccr,ccr_sd,mwe,angle_deg,piling_index,train_seconds\n";
  out << std::setprecision(12);
  for (const StudySummary& s : summary) {
    out << s.d << ',' << to_string(s.method) << ',' << s.succeeded << ',' << s.failed << ','
        << s.ccr << ',' << s.ccr_sd << ',' << s.mwe << ',' << s.angle_deg << ','
        << s.piling_index << ',' << s.train_seconds << '\n';
  }
}

}  // namespace npdmd
