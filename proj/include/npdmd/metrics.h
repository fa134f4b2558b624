#pragma once

#include <array>
#include <optional>
#include <vector>

#include "npdmd/classifier.h"
#include "npdmd/dataset.h"

namespace npdmd {

// Rows are the true class, columns the prediction; index 0 is +1, 1 is -1.
using Confusion = std::array<std::array<long, 2>, 2>;

struct EvalReport {
  Confusion confusion{};
  double ccr = 0.0;
  double mwe = 0.0;
  double auc = 0.0;
  std::optional<double> angle_deg;
  std::optional<double> piling_index;

  long total() const;
};

Confusion confusion_matrix(const Vector& y_true, const Vector& y_pred);
double correct_rate(const Vector& y_true, const Vector& y_pred);

// Unweighted mean of the two per-class error rates.
double mean_within_group_error(const Confusion& confusion);

// Mann-Whitney statistic over average ranks; tied pairs count one half.
double auc(const Vector& y_true, const Vector& scores);

/// Confusion counts, CCR, MWE and AUC. Throws SingleClass when y_true holds
/// only one label; correct_rate() is available for that case.
EvalReport evaluate(const Vector& y_true, const Vector& y_pred, const Vector& scores);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;
};

// Points for thresholds at each distinct score, descending, predicting +1
// when score >= threshold. The first point is (0, 0) at +infinity.
std::vector<RocPoint> roc_curve(const Vector& y_true, const Vector& scores);

double angle_between(const Vector& w, const Vector& w_ref);

struct ProjectionSpread {
  double pooled_sd = 0.0;  // sqrt of within-class sum of squares over n
  double gap = 0.0;        // |mean+ - mean-|
};

ProjectionSpread projection_spread(const Vector& w, const Dataset& ds);

/// Pooled within-class spread of unit-direction projections divided by the
/// class-mean gap (or by 1 when the gap vanishes). Values near zero mean the
/// classes have piled onto two points.
double piling_index(const Vector& w, const Dataset& ds);
double piling_index(const TrainedModel& model, const Dataset& ds);

}  // namespace npdmd
