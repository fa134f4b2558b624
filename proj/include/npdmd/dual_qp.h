#pragma once

#include <memory>

#include "npdmd/dataset.h"
#include "npdmd/scatter.h"

namespace npdmd {

/// Read-only access to the dual Hessian H = Y X (I - λS_W)^{-1} Xᵀ Y.
/// Implementations are immutable; row() must be safe to call concurrently.
class Hessian {
 public:
  virtual ~Hessian() = default;
  virtual Index size() const = 0;
  virtual double diagonal(Index i) const = 0;
  virtual void row(Index i, Eigen::Ref<Vector> out) const = 0;
  // Non-null only for materialized matrices.
  virtual const Matrix* dense() const { return nullptr; }
};

class DenseHessian final : public Hessian {
 public:
  explicit DenseHessian(Matrix h);
  Index size() const override { return h_.rows(); }
  double diagonal(Index i) const override { return h_(i, i); }
  void row(Index i, Eigen::Ref<Vector> out) const override { out = h_.row(i).transpose(); }
  const Matrix* dense() const override { return &h_; }

 private:
  Matrix h_;
};

// Computes rows on demand: row i = y_i y ∘ (X (I - λS_W)^{-1} x_i).
class ImplicitHessian final : public Hessian {
 public:
  ImplicitHessian(Matrix x, Vector y, std::shared_ptr<const ScatterModel> sm, double lambda);
  Index size() const override { return x_.rows(); }
  double diagonal(Index i) const override { return diag_[i]; }
  void row(Index i, Eigen::Ref<Vector> out) const override;

 private:
  Matrix x_;
  Vector y_;
  std::shared_ptr<const ScatterModel> sm_;
  ScatterInverse inverse_;
  Vector diag_;
};

struct DualProblem {
  std::shared_ptr<const Hessian> hessian;
  Vector labels;
  double c0 = 1.0;
  double tol = 1e-6;
  // 0 selects the default budget of 10^4 · n pair updates.
  long max_passes = 0;

  Index size() const { return labels.size(); }
};

struct DualSolution {
  Vector alpha;
  double objective = 0.0;
  double kkt_violation = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Per-term KKT residuals of a dual point.
///
/// `stationarity` is half the gap between the largest lower bound and the
/// smallest upper bound that the box-constrained gradient conditions place
/// on the equality multiplier, so it is zero exactly at a KKT point.
/// `multiplier` is the midpoint of that range (the KKT intercept).
struct KktResidual {
  double stationarity = 0.0;
  double equality = 0.0;
  double box = 0.0;
  double multiplier = 0.0;

  double worst() const;
};

inline constexpr Index kDenseHessianLimit = 4096;

/// Assembles the dual problem at absolute scatter weight `lambda`. H is
/// materialized when n <= dense_limit and computed row-wise otherwise.
DualProblem build_H(const Dataset& ds, const ScatterModel& sm, double lambda,
                    Index dense_limit = kDenseHessianLimit);

DualProblem make_dual_problem(Matrix h, Vector labels, double c0);

// Pairwise coordinate ascent on the maximal violating pair.
DualSolution solve_dual(const DualProblem& dp);

KktResidual kkt_report(const DualProblem& dp, const Vector& alpha);

double dual_objective(const DualProblem& dp, const Vector& alpha);

}  // namespace npdmd
