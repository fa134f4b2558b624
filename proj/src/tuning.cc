#include "npdmd/tuning.h"

#include <cmath>
#include <limits>
#include <map>

#include "npdmd/error.h"
#include "npdmd/random.h"

namespace npdmd {

std::vector<double> default_lambda_grid() { return {0.0, 0.3, 0.6, 0.9, 0.99}; }
std::vector<double> default_c0_grid() { return {0.1, 1.0, 10.0, 100.0}; }

TuneResult tune(const Dataset& ds, const TuneOptions& options) {
  if (options.lambda_grid.empty() || options.c0_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "tuning grid is empty");
  }
  if (options.repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  ds.require_both_classes();

  TuneResult result;
  for (int rep = 0; rep < options.repeats; ++rep) {
    const std::uint64_t split_seed =
        options.repeats == 1 ? options.seed
                             : derive_seed(options.seed, {static_cast<std::uint64_t>(rep)});
    const SplitPlan plan = make_splits(ds, options.folds, options.stratified, split_seed);
    for (int fold = 0; fold < options.folds; ++fold) {
      const auto train_idx = plan.train_indices(fold);
      const auto test_idx = plan.test_indices(fold);
      const Dataset train = ds.subset(train_idx);
      const Dataset test = ds.subset(test_idx);
      NpdmdTrainer trainer(train);
      for (double fraction : options.lambda_grid) {
        for (double c0 : options.c0_grid) {
          Hyperparams hp = options.base;
          hp.lambda_fraction = fraction;
          hp.c0 = c0;
          const TrainedModel model = trainer.train(hp);
          const Prediction pred = predict(model, test.features());
          CvRow row;
          row.repeat = rep;
          row.fold = fold;
          row.lambda_fraction = fraction;
          row.c0 = c0;
          row.ccr = correct_rate(test.labels(), pred.labels);
          row.mwe = test.has_both_classes()
                        ? mean_within_group_error(confusion_matrix(test.labels(), pred.labels))
                        : std::numeric_limits<double>::quiet_NaN();
          result.table.push_back(row);
        }
      }
    }
  }

  std::map<std::pair<double, double>, std::pair<double, int>> totals;
  for (const CvRow& row : result.table) {
    auto& [sum, count] = totals[{row.lambda_fraction, row.c0}];
    sum += row.ccr;
    ++count;
  }
  // std::map iterates by (lambda, c0) ascending, so strict > keeps the tie-break.
  bool first = true;
  for (const auto& [key, acc] : totals) {
    const double mean = acc.first / acc.second;
    if (first || mean > result.best_mean_ccr) {
      result.best_mean_ccr = mean;
      result.best = options.base;
      result.best.lambda_fraction = key.first;
      result.best.c0 = key.second;
      first = false;
    }
  }
  return result;
}

NestedCvResult nested_cross_validation(const Dataset& ds, int outer_folds, int repeats,
                                       const TuneOptions& inner, std::uint64_t seed) {
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  NestedCvResult out;
  double mwe_sum = 0.0;
  int mwe_count = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    const std::uint64_t rep_seed = derive_seed(seed, {static_cast<std::uint64_t>(rep)});
    const SplitPlan plan = make_splits(ds, outer_folds, true, rep_seed);
    for (int fold = 0; fold < outer_folds; ++fold) {
      const auto train_idx = plan.train_indices(fold);
      const auto test_idx = plan.test_indices(fold);
      const Dataset train = ds.subset(train_idx);
      const Dataset test = ds.subset(test_idx);
      TuneOptions inner_options = inner;
      inner_options.seed = derive_seed(rep_seed, {static_cast<std::uint64_t>(fold)});
      const TuneResult tuned = tune(train, inner_options);
      const TrainedModel model = train_npdmd(train, tuned.best);
      const Prediction pred = predict(model, test.features());
      const Confusion c = confusion_matrix(test.labels(), pred.labels);
      for (int r = 0; r < 2; ++r) {
        for (int col = 0; col < 2; ++col) out.pooled[r][col] += c[r][col];
      }
      out.fold_ccr.push_back(correct_rate(test.labels(), pred.labels));
      if (test.has_both_classes()) {
        mwe_sum += mean_within_group_error(c);
        ++mwe_count;
      }
    }
  }
  const auto& p = out.pooled;
  out.pooled_ccr = static_cast<double>(p[0][0] + p[1][1]) /
                   static_cast<double>(p[0][0] + p[0][1] + p[1][0] + p[1][1]);
  out.mean_mwe = mwe_count > 0 ? mwe_sum / mwe_count : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace npdmd
