#include "npdmd/scatter.h"

#include <Eigen/Eigenvalues>

#include "npdmd/error.h"

namespace npdmd {

ScatterModel build_scatter(const Dataset& ds) {
  ds.require_both_classes();
  const Matrix& x = ds.features();
  const Vector& y = ds.labels();
  const Index n = ds.size();
  const double n_plus = static_cast<double>(ds.count(+1));
  const double n_minus = static_cast<double>(ds.count(-1));

  ScatterModel sm;
  sm.mean_plus = Vector::Zero(ds.dim());
  sm.mean_minus = Vector::Zero(ds.dim());
  for (Index i = 0; i < n; ++i) {
    if (y[i] > 0) {
      sm.mean_plus += x.row(i).transpose();
    } else {
      sm.mean_minus += x.row(i).transpose();
    }
  }
  sm.mean_plus /= n_plus;
  sm.mean_minus /= n_minus;

  sm.deviations.resize(n, ds.dim());
  sm.k_diag.resize(n);
  for (Index i = 0; i < n; ++i) {
    const bool plus = y[i] > 0;
    sm.deviations.row(i) = x.row(i) - (plus ? sm.mean_plus : sm.mean_minus).transpose();
    sm.k_diag[i] = 1.0 / (plus ? n_plus : n_minus);
  }
  sm.gram = sm.deviations * sm.deviations.transpose();

  // Nonzero spectrum of Bᵀ K B equals that of K^{1/2} B Bᵀ K^{1/2}.
  const Vector root_k = sm.k_diag.cwiseSqrt();
  const Matrix scaled = root_k.asDiagonal() * sm.gram * root_k.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scaled, Eigen::EigenvaluesOnly);
  sm.lambda_max = std::max(0.0, eig.eigenvalues().maxCoeff());
  return sm;
}

double lambda_bound(const ScatterModel& sm) {
  return sm.lambda_max > 0.0 ? 1.0 / sm.lambda_max : kUnboundedLambda;
}

ScatterInverse::ScatterInverse(const ScatterModel& sm, double lambda)
    : sm_(&sm), lambda_(lambda) {
  if (!(lambda >= 0.0) || !(lambda < lambda_bound(sm))) {
    throw Error(ErrorCode::kLambdaOutOfRange,
                "lambda " + std::to_string(lambda) + " outside [0, " +
                    std::to_string(lambda_bound(sm)) + ")");
  }
  if (lambda == 0.0) return;

  // (-λK)^{-1} + B Bᵀ is negative definite below the bound; factor its negation.
  Matrix core = -sm.gram;
  core.diagonal().array() += 1.0 / (lambda * sm.k_diag.array());
  factor_.compute(core);
  if (factor_.info() != Eigen::Success) {
    const double jitter = 1e-10 * core.trace() / static_cast<double>(core.rows());
    core.diagonal().array() += jitter;
    factor_.compute(core);
    if (factor_.info() != Eigen::Success) {
      throw Error(ErrorCode::kLambdaOutOfRange,
                  "I - lambda*S_W is not positive definite at lambda " + std::to_string(lambda));
    }
  }
}

Matrix ScatterInverse::apply(const Matrix& v) const {
  if (v.rows() != sm_->dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "operand row count differs from feature dimension");
  }
  if (lambda_ == 0.0) return v;
  const Matrix& b = sm_->deviations;
  return v + b.transpose() * factor_.solve(b * v);
}

Matrix smw_apply(const ScatterModel& sm, double lambda, const Matrix& v) {
  return ScatterInverse(sm, lambda).apply(v);
}

}  // namespace npdmd
