#include "npdmd/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "npdmd/error.h"

namespace npdmd {

namespace {

void require_same_length(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "label and prediction lengths differ");
  }
}

}  // namespace

long EvalReport::total() const {
  return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
}

Confusion confusion_matrix(const Vector& y_true, const Vector& y_pred) {
  require_same_length(y_true, y_pred);
  Confusion c{};
  for (Index i = 0; i < y_true.size(); ++i) {
    ++c[y_true[i] > 0 ? 0 : 1][y_pred[i] > 0 ? 0 : 1];
  }
  return c;
}

double correct_rate(const Vector& y_true, const Vector& y_pred) {
  const Confusion c = confusion_matrix(y_true, y_pred);
  const long total = c[0][0] + c[0][1] + c[1][0] + c[1][1];
  if (total == 0) throw Error(ErrorCode::kTooFewSamples, "nothing to evaluate");
  // Written as 1 - error rate so that balanced sets give ccr == 1 - mwe exactly.
  return 1.0 - static_cast<double>(c[0][1] + c[1][0]) / static_cast<double>(total);
}

double mean_within_group_error(const Confusion& c) {
  const long plus = c[0][0] + c[0][1];
  const long minus = c[1][0] + c[1][1];
  if (plus == 0 || minus == 0) {
    throw Error(ErrorCode::kSingleClass, "within-group error needs both classes");
  }
  if (plus == minus) {
    return static_cast<double>(c[0][1] + c[1][0]) / static_cast<double>(plus + minus);
  }
  return 0.5 * (static_cast<double>(c[0][1]) / static_cast<double>(plus) +
                static_cast<double>(c[1][0]) / static_cast<double>(minus));
}

double auc(const Vector& y_true, const Vector& scores) {
  require_same_length(y_true, scores);
  const Index n = y_true.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  long n_plus = 0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);  // average 1-based rank
    for (std::size_t t = start; t < end; ++t) {
      if (y_true[order[t]] > 0) {
        rank_sum += rank;
        ++n_plus;
      }
    }
    start = end;
  }
  const long n_minus = n - n_plus;
  if (n_plus == 0 || n_minus == 0) {
    throw Error(ErrorCode::kSingleClass, "AUC needs both classes");
  }
  const double np = static_cast<double>(n_plus);
  return (rank_sum - 0.5 * np * (np + 1.0)) / (np * static_cast<double>(n_minus));
}

EvalReport evaluate(const Vector& y_true, const Vector& y_pred, const Vector& scores) {
  require_same_length(y_true, y_pred);
  require_same_length(y_true, scores);
  EvalReport r;
  r.confusion = confusion_matrix(y_true, y_pred);
  r.ccr = correct_rate(y_true, y_pred);
  r.mwe = mean_within_group_error(r.confusion);
  r.auc = auc(y_true, scores);
  return r;
}

std::vector<RocPoint> roc_curve(const Vector& y_true, const Vector& scores) {
  require_same_length(y_true, scores);
  const double n_plus = static_cast<double>((y_true.array() > 0).count());
  const double n_minus = static_cast<double>(y_true.size()) - n_plus;
  if (n_plus == 0 || n_minus == 0) throw Error(ErrorCode::kSingleClass, "ROC needs both classes");

  std::vector<Index> order(static_cast<std::size_t>(y_true.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      (y_true[order[end]] > 0 ? tp : fp) += 1.0;
      ++end;
    }
    points.push_back({fp / n_minus, tp / n_plus, scores[order[start]]});
    start = end;
  }
  return points;
}

double angle_between(const Vector& w, const Vector& w_ref) {
  if (w.size() != w_ref.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "angle between vectors of different length");
  }
  const double nw = w.norm();
  const double nr = w_ref.norm();
  if (nw == 0.0 || nr == 0.0) throw Error(ErrorCode::kZeroVector, "angle with a zero vector");
  const double cosine = std::clamp(w.dot(w_ref) / (nw * nr), -1.0, 1.0);
  return std::acos(cosine) * 180.0 / std::numbers::pi;
}

ProjectionSpread projection_spread(const Vector& w, const Dataset& ds) {
  ds.require_both_classes();
  if (w.size() != ds.dim()) throw Error(ErrorCode::kDimensionMismatch, "direction length differs");
  const double norm = w.norm();
  if (norm == 0.0) throw Error(ErrorCode::kZeroVector, "projection onto a zero direction");
  const Vector s = ds.features() * (w / norm);
  const Vector& y = ds.labels();

  double sum[2] = {0.0, 0.0};
  double count[2] = {0.0, 0.0};
  for (Index i = 0; i < s.size(); ++i) {
    const int c = y[i] > 0 ? 0 : 1;
    sum[c] += s[i];
    count[c] += 1.0;
  }
  const double mean[2] = {sum[0] / count[0], sum[1] / count[1]};
  double ss = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    const double dev = s[i] - mean[y[i] > 0 ? 0 : 1];
    ss += dev * dev;
  }
  ProjectionSpread out;
  out.pooled_sd = std::sqrt(ss / static_cast<double>(s.size()));
  out.gap = std::abs(mean[0] - mean[1]);
  return out;
}

double piling_index(const Vector& w, const Dataset& ds) {
  const ProjectionSpread p = projection_spread(w, ds);
  return p.pooled_sd / (p.gap > 0.0 ? p.gap : 1.0);
}

double piling_index(const TrainedModel& model, const Dataset& ds) {
  return piling_index(model.w, ds);
}

}  // namespace npdmd
