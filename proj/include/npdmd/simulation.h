#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "npdmd/classifier.h"
#include "npdmd/tuning.h"

namespace npdmd {

/// Two Gaussian classes N(±c·1_d, I_d) with c chosen so that the
/// Mahalanobis distance between the class means, 2c·sqrt(d), is fixed.
struct SimSpec {
  Index d = 100;
  Index n_plus = 120;
  Index n_minus = 90;
  double mahalanobis = 2.7;
  Index n_test_per_class = 1500;
  std::uint64_t seed = 0;
  int replications = 5;

  double c() const;
  double imbalance() const;  // majority / minority
  void validate() const;
};

const std::vector<Index>& default_dimensions();  // {80, 150, 240, 650, 900, 1500, 2400}

struct SimulatedData {
  Dataset train;
  Dataset test;
  LinearRule oracle;
};

// Deterministic per (seed, replication); each (role, class) block has its own stream.
SimulatedData generate(const SimSpec& spec, int replication);

struct StudyConfig {
  std::vector<Index> dims = default_dimensions();
  std::vector<Method> methods = {Method::kNpdmd, Method::kSvm, Method::kMd};
  SimSpec base;  // d is overridden per row
  TuneOptions tuning;
  int jobs = 1;
  bool record_timing = true;
};

struct StudyRow {
  Index d = 0;
  Method method = Method::kNpdmd;
  int replication = 0;
  bool ok = false;
  std::string error;
  double ccr = 0.0;
  double mwe = 0.0;
  double angle_deg = 0.0;
  double piling_index = 0.0;
  double train_seconds = 0.0;
  Hyperparams chosen;
};

struct StudySummary {
  Index d = 0;
  Method method = Method::kNpdmd;
  int succeeded = 0;
  int failed = 0;
  double ccr = 0.0;
  double ccr_sd = 0.0;
  double mwe = 0.0;
  double angle_deg = 0.0;
  double piling_index = 0.0;
  double train_seconds = 0.0;
};

// Rows come back in (d, method, replication) order whatever the job count.
std::vector<StudyRow> run_study(const StudyConfig& config);

std::vector<StudySummary> summarize(const std::vector<StudyRow>& rows);

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out);
void write_summary_csv(const std::vector<StudySummary>& summary, std::ostream& out);

}  // namespace npdmd
