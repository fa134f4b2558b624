#pragma once

#include <optional>
#include <string>
#include <vector>

#include "npdmd/dataset.h"
#include "npdmd/dual_qp.h"
#include "npdmd/scatter.h"

namespace npdmd {

enum class Method { kNpdmd, kSvm, kMd, kBayes };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// Training knobs. The scatter weight is given as a fraction of the spectral
/// bound 1/lambda_max(S_W), so the same grid means the same thing on every
/// dataset.
struct Hyperparams {
  double lambda_fraction = 0.0;
  double c0 = 1.0;
  double tol = 1e-6;
  long max_passes = 0;
  Index dense_limit = kDenseHessianLimit;
};

struct TrainedModel {
  Method method = Method::kNpdmd;
  Vector w;
  double b = 0.0;
  Vector alpha;
  std::vector<Index> support_indices;
  // Subtracted from samples before scoring.
  Vector center;
  Hyperparams hyperparams;
  double lambda = 0.0;
  std::string source;

  bool converged = true;
  double kkt_violation = 0.0;
  double dual_objective = 0.0;
  long iterations = 0;
  // Zero direction: every sample gets the same score.
  bool degenerate = false;

  Index dim() const { return w.size(); }
};

/// Reusable training state for one dataset: the centered samples and the
/// scatter factorization are built once and shared across hyperparameters.
/// The dual Hessian for the most recent lambda fraction is cached.
class NpdmdTrainer {
 public:
  explicit NpdmdTrainer(const Dataset& ds);

  TrainedModel train(const Hyperparams& hp);

  const Dataset& centered() const { return centered_; }
  const Vector& mean() const { return mean_; }
  const ScatterModel& scatter() const { return scatter_; }
  double absolute_lambda(double fraction) const;

 private:
  explicit NpdmdTrainer(std::pair<Dataset, Vector> centered);

  Dataset centered_;
  Vector mean_;
  ScatterModel scatter_;
  std::optional<std::pair<double, Index>> cached_key_;
  DualProblem cached_problem_;
};

TrainedModel train_npdmd(const Dataset& ds, const Hyperparams& hp);

// λ = 0 special case, tagged as SVM.
TrainedModel train_svm(const Dataset& ds, Hyperparams hp);

/// Intercept minimizing the number of samples with y_i (s_i + b) <= 0.
///
/// Candidate values of b form open intervals between the sorted thresholds
/// -s_i. Among the intervals with the fewest errors the widest bounded one
/// wins; ties go to the midpoint closest to zero and then to the larger
/// midpoint. If only an unbounded interval is optimal, the result sits half
/// the threshold range (or 1 when all thresholds coincide) past its finite
/// end.
double fit_intercept(const Vector& scores, const Vector& labels);

struct Prediction {
  Vector scores;
  Vector labels;  // +1 when score >= 0
};

Prediction predict(const TrainedModel& model, const Matrix& x);

// Mean difference baseline: w = u+ - u-, b = -wᵀ(u+ + u-)/2.
TrainedModel train_md(const Dataset& ds);

struct LinearRule {
  Vector w;
  double b = 0.0;
};

LinearRule bayes_rule(const Vector& mu_plus, const Vector& mu_minus, const Matrix& sigma);

TrainedModel make_linear_model(Method method, const LinearRule& rule);

// Rebuilds w from the stored dual weights on the original training data.
Vector reconstruct_direction(const Dataset& train, const TrainedModel& model);

}  // namespace npdmd
