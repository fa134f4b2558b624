#pragma once

#include <cstdint>
#include <vector>

#include "npdmd/classifier.h"
#include "npdmd/metrics.h"

namespace npdmd {

std::vector<double> default_lambda_grid();  // {0, 0.3, 0.6, 0.9, 0.99}
std::vector<double> default_c0_grid();      // {0.1, 1, 10, 100}

struct TuneOptions {
  std::vector<double> lambda_grid = default_lambda_grid();
  std::vector<double> c0_grid = default_c0_grid();
  int folds = 3;
  int repeats = 1;
  bool stratified = true;
  std::uint64_t seed = 0;
  // Solver settings; lambda_fraction and c0 are overwritten per grid point.
  Hyperparams base;
};

struct CvRow {
  int repeat = 0;
  int fold = 0;
  double lambda_fraction = 0.0;
  double c0 = 0.0;
  double ccr = 0.0;
  double mwe = 0.0;  // NaN when the held-out fold has a single class
};

struct TuneResult {
  Hyperparams best;
  double best_mean_ccr = 0.0;
  std::vector<CvRow> table;
};

/// Grid search by k-fold cross-validation. The winner maximizes mean CCR
/// over all folds and repeats; ties go to the smaller lambda fraction and
/// then the smaller C0.
TuneResult tune(const Dataset& ds, const TuneOptions& options);

struct NestedCvResult {
  Confusion pooled{};
  double pooled_ccr = 0.0;
  double mean_mwe = 0.0;
  std::vector<double> fold_ccr;
};

// Outer k-fold evaluation with `inner` tuning inside every training split.
NestedCvResult nested_cross_validation(const Dataset& ds, int outer_folds, int repeats,
                                       const TuneOptions& inner, std::uint64_t seed);

}  // namespace npdmd
