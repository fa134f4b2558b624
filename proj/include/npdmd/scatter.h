#pragma once

#include <limits>

#include <Eigen/Cholesky>

#include "npdmd/dataset.h"

namespace npdmd {

/// Within-class scatter S_W = Bᵀ diag(k) B kept in factored form.
///
/// Row i of `deviations` is x_i minus the mean of its class and
/// `k_diag[i] = 1 / n_class(i)`, so the d×d matrix is never formed.
struct ScatterModel {
  Vector mean_plus;
  Vector mean_minus;
  Matrix deviations;  // B, n×d
  Vector k_diag;
  Matrix gram;        // B Bᵀ, n×n
  double lambda_max = 0.0;

  Index size() const { return deviations.rows(); }
  Index dim() const { return deviations.cols(); }
};

inline constexpr double kUnboundedLambda = std::numeric_limits<double>::infinity();

ScatterModel build_scatter(const Dataset& ds);

// 1 / lambda_max, or kUnboundedLambda when S_W vanishes.
double lambda_bound(const ScatterModel& sm);

/// Factored (I - λ S_W)^{-1} for one λ. Only an n×n system is factored;
/// applying it costs two n×d products per right-hand side.
class ScatterInverse {
 public:
  ScatterInverse(const ScatterModel& sm, double lambda);

  Matrix apply(const Matrix& v) const;
  double lambda() const { return lambda_; }

 private:
  const ScatterModel* sm_;
  double lambda_;
  Eigen::LLT<Matrix> factor_;
};

Matrix smw_apply(const ScatterModel& sm, double lambda, const Matrix& v);

}  // namespace npdmd
