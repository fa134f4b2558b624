#include "npdmd/classifier.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "npdmd/error.h"

namespace npdmd {

std::string to_string(Method method) {
  switch (method) {
    case Method::kNpdmd: return "npdmd";
    case Method::kSvm: return "svm";
    case Method::kMd: return "md";
    case Method::kBayes: return "bayes";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "npdmd") return Method::kNpdmd;
  if (name == "svm") return Method::kSvm;
  if (name == "md") return Method::kMd;
  if (name == "bayes" || name == "bayes-oracle") return Method::kBayes;
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + name + "'");
}

namespace {

void check_hyperparams(const Hyperparams& hp) {
  if (!(hp.lambda_fraction >= 0.0 && hp.lambda_fraction < 1.0)) {
    throw Error(ErrorCode::kLambdaOutOfRange, "lambda fraction must lie in [0, 1)");
  }
  if (!(hp.c0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C0 must be positive");
  if (!(hp.tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
}

std::pair<Dataset, Vector> checked_center(const Dataset& ds) {
  ds.require_both_classes();
  return center(ds);
}

}  // namespace

NpdmdTrainer::NpdmdTrainer(const Dataset& ds) : NpdmdTrainer(checked_center(ds)) {}

NpdmdTrainer::NpdmdTrainer(std::pair<Dataset, Vector> centered)
    : centered_(std::move(centered.first)),
      mean_(std::move(centered.second)),
      scatter_(build_scatter(centered_)) {}

double NpdmdTrainer::absolute_lambda(double fraction) const {
  const double bound = lambda_bound(scatter_);
  // S_W = 0 leaves I - λS_W = I for every λ.
  return std::isfinite(bound) ? fraction * bound : 0.0;
}

TrainedModel NpdmdTrainer::train(const Hyperparams& hp) {
  check_hyperparams(hp);
  const double lambda = absolute_lambda(hp.lambda_fraction);
  const std::pair<double, Index> key{hp.lambda_fraction, hp.dense_limit};
  if (!cached_key_ || *cached_key_ != key) {
    cached_problem_ = build_H(centered_, scatter_, lambda, hp.dense_limit);
    cached_key_ = key;
  }
  DualProblem dp = cached_problem_;
  dp.c0 = hp.c0;
  dp.tol = hp.tol;
  dp.max_passes = hp.max_passes;
  const DualSolution sol = solve_dual(dp);

  const Matrix& x = centered_.features();
  const Vector& y = centered_.labels();
  TrainedModel model;
  model.method = Method::kNpdmd;
  model.alpha = sol.alpha;
  model.w = ScatterInverse(scatter_, lambda).apply(x.transpose() * y.cwiseProduct(sol.alpha));
  model.b = fit_intercept(x * model.w, y);
  for (Index i = 0; i < sol.alpha.size(); ++i) {
    if (sol.alpha[i] > hp.tol) model.support_indices.push_back(i);
  }
  model.center = mean_;
  model.hyperparams = hp;
  model.lambda = lambda;
  model.source = centered_.source();
  model.converged = sol.converged;
  model.kkt_violation = sol.kkt_violation;
  model.dual_objective = sol.objective;
  model.iterations = sol.iterations;
  model.degenerate = model.w.squaredNorm() == 0.0;
  return model;
}

TrainedModel train_npdmd(const Dataset& ds, const Hyperparams& hp) {
  check_hyperparams(hp);
  NpdmdTrainer trainer(ds);
  return trainer.train(hp);
}

TrainedModel train_svm(const Dataset& ds, Hyperparams hp) {
  hp.lambda_fraction = 0.0;
  TrainedModel model = train_npdmd(ds, hp);
  model.method = Method::kSvm;
  return model;
}

double fit_intercept(const Vector& scores, const Vector& labels) {
  if (scores.size() < 1 || scores.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scores and labels must be non-empty and equal in length");
  }
  struct Threshold {
    double value;
    int plus;
    int minus;
  };
  std::vector<Threshold> cuts;
  cuts.reserve(static_cast<std::size_t>(scores.size()));
  for (Index i = 0; i < scores.size(); ++i) {
    cuts.push_back({-scores[i], labels[i] > 0 ? 1 : 0, labels[i] > 0 ? 0 : 1});
  }
  std::sort(cuts.begin(), cuts.end(),
            [](const Threshold& a, const Threshold& b) { return a.value < b.value; });
  std::vector<Threshold> merged;
  for (const auto& c : cuts) {
    if (!merged.empty() && merged.back().value == c.value) {
      merged.back().plus += c.plus;
      merged.back().minus += c.minus;
    } else {
      merged.push_back(c);
    }
  }

  // Interval r lies between merged[r-1] and merged[r]; r = 0 and r = size
  // are unbounded. Errors for b inside interval r: positives whose threshold
  // is >= b plus negatives whose threshold is <= b.
  const std::size_t k = merged.size();
  std::vector<long> errors(k + 1);
  long current = 0;
  for (const auto& c : merged) current += c.plus;
  errors[0] = current;
  for (std::size_t r = 0; r < k; ++r) {
    current += merged[r].minus - merged[r].plus;
    errors[r + 1] = current;
  }
  const long best = *std::min_element(errors.begin(), errors.end());

  const double lo = merged.front().value;
  const double hi = merged.back().value;
  const double offset = hi > lo ? 0.5 * (hi - lo) : 1.0;

  bool have = false;
  bool have_bounded = false;
  double best_width = 0.0;
  double best_mid = 0.0;
  auto consider = [&](bool bounded, double width, double mid) {
    bool better;
    if (!have) {
      better = true;
    } else if (bounded != have_bounded) {
      better = bounded;
    } else if (bounded && width != best_width) {
      better = width > best_width;
    } else if (std::abs(mid) != std::abs(best_mid)) {
      better = std::abs(mid) < std::abs(best_mid);
    } else {
      better = mid > best_mid;
    }
    if (better) {
      have = true;
      have_bounded = bounded;
      best_width = width;
      best_mid = mid;
    }
  };
  for (std::size_t r = 0; r <= k; ++r) {
    if (errors[r] != best) continue;
    if (r == 0) {
      consider(false, 0.0, lo - offset);
    } else if (r == k) {
      consider(false, 0.0, hi + offset);
    } else {
      const double a = merged[r - 1].value;
      const double b = merged[r].value;
      consider(true, b - a, a + 0.5 * (b - a));
    }
  }
  return best_mid;
}

Prediction predict(const TrainedModel& model, const Matrix& x) {
  if (x.cols() != model.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(model.dim()) + " features, got " +
                    std::to_string(x.cols()));
  }
  Prediction out;
  if (model.center.size() == model.dim()) {
    out.scores = (x.rowwise() - model.center.transpose()) * model.w;
  } else {
    out.scores = x * model.w;
  }
  out.scores.array() += model.b;
  out.labels = out.scores.unaryExpr([](double s) { return s >= 0.0 ? 1.0 : -1.0; });
  return out;
}

TrainedModel train_md(const Dataset& ds) {
  ds.require_both_classes();
  Vector mean_plus = Vector::Zero(ds.dim());
  Vector mean_minus = Vector::Zero(ds.dim());
  for (Index i = 0; i < ds.size(); ++i) {
    (ds.labels()[i] > 0 ? mean_plus : mean_minus) += ds.features().row(i).transpose();
  }
  mean_plus /= static_cast<double>(ds.count(+1));
  mean_minus /= static_cast<double>(ds.count(-1));

  LinearRule rule;
  rule.w = mean_plus - mean_minus;
  rule.b = -0.5 * rule.w.dot(mean_plus + mean_minus);
  TrainedModel model = make_linear_model(Method::kMd, rule);
  model.source = ds.source();
  return model;
}

LinearRule bayes_rule(const Vector& mu_plus, const Vector& mu_minus, const Matrix& sigma) {
  const Index d = mu_plus.size();
  if (mu_minus.size() != d || sigma.rows() != d || sigma.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "mean and covariance sizes differ");
  }
  if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
    throw Error(ErrorCode::kSingularCovariance, "covariance is not symmetric");
  }
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance, "covariance is not positive definite");
  }
  LinearRule rule;
  rule.w = llt.solve(mu_plus - mu_minus);
  rule.b = -0.5 * rule.w.dot(mu_plus + mu_minus);
  return rule;
}

TrainedModel make_linear_model(Method method, const LinearRule& rule) {
  TrainedModel model;
  model.method = method;
  model.w = rule.w;
  model.b = rule.b;
  model.center = Vector::Zero(rule.w.size());
  model.degenerate = rule.w.squaredNorm() == 0.0;
  return model;
}

Vector reconstruct_direction(const Dataset& train, const TrainedModel& model) {
  if (model.alpha.size() != train.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "model has no dual weights for this dataset");
  }
  const Dataset centered = center_with(train, model.center);
  const ScatterModel sm = build_scatter(centered);
  const Vector v = centered.features().transpose() * centered.labels().cwiseProduct(model.alpha);
  return smw_apply(sm, model.lambda, v);
}

}  // namespace npdmd
