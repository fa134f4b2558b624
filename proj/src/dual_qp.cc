#include "npdmd/dual_qp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "npdmd/error.h"

namespace npdmd {

namespace {

constexpr double kCurvatureFloor = 1e-12;

// LRU row cache for implicit Hessians. Owned by a single solve.
class RowCache {
 public:
  RowCache(const Hessian& h, Index capacity) : h_(h), capacity_(std::max<Index>(capacity, 2)) {}

  const Vector& row(Index i) {
    if (const Matrix* dense = h_.dense()) {
      scratch_ = dense->row(i).transpose();
      return scratch_;
    }
    if (auto it = index_.find(i); it != index_.end()) {
      order_.splice(order_.begin(), order_, it->second);
      return it->second->second;
    }
    if (static_cast<Index>(order_.size()) >= capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
    order_.emplace_front(i, Vector(h_.size()));
    h_.row(i, order_.front().second);
    index_[i] = order_.begin();
    return order_.front().second;
  }

 private:
  const Hessian& h_;
  Index capacity_;
  Vector scratch_;
  std::list<std::pair<Index, Vector>> order_;
  std::unordered_map<Index, std::list<std::pair<Index, Vector>>::iterator> index_;
};

bool in_up(double y, double a, double c) { return y > 0 ? a < c : a > 0; }
bool in_low(double y, double a, double c) { return y > 0 ? a > 0 : a < c; }

void require_two_labels(const Vector& y) {
  const bool plus = (y.array() > 0).any();
  const bool minus = (y.array() < 0).any();
  if (!plus || !minus) {
    throw Error(ErrorCode::kSingleClass,
                "the equality constraint forces alpha = 0 when only one label is present");
  }
}

Vector gradient(const DualProblem& dp, const Vector& alpha) {
  const Hessian& h = *dp.hessian;
  if (const Matrix* dense = h.dense()) return Vector::Ones(alpha.size()) - *dense * alpha;
  Vector g = Vector::Ones(alpha.size());
  Vector row(alpha.size());
  for (Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    h.row(i, row);
    g -= alpha[i] * row;  // H symmetric: column i equals row i
  }
  return g;
}

}  // namespace

DenseHessian::DenseHessian(Matrix h) : h_(std::move(h)) {
  if (h_.rows() != h_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "Hessian must be square");
  }
}

ImplicitHessian::ImplicitHessian(Matrix x, Vector y, std::shared_ptr<const ScatterModel> sm,
                                 double lambda)
    : x_(std::move(x)), y_(std::move(y)), sm_(std::move(sm)), inverse_(*sm_, lambda) {
  diag_.resize(x_.rows());
  for (Index i = 0; i < x_.rows(); ++i) {
    const Vector z = inverse_.apply(x_.row(i).transpose());
    diag_[i] = x_.row(i).dot(z);
  }
}

void ImplicitHessian::row(Index i, Eigen::Ref<Vector> out) const {
  const Vector z = inverse_.apply(x_.row(i).transpose());
  out = y_[i] * (y_.array() * (x_ * z).array()).matrix();
}

double KktResidual::worst() const { return std::max({stationarity, equality, box}); }

DualProblem build_H(const Dataset& ds, const ScatterModel& sm, double lambda, Index dense_limit) {
  if (sm.size() != ds.size() || sm.dim() != ds.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "scatter model does not match dataset");
  }
  const ScatterInverse inverse(sm, lambda);
  DualProblem dp;
  dp.labels = ds.labels();
  if (ds.size() <= dense_limit) {
    const Matrix& x = ds.features();
    Matrix h = x * inverse.apply(x.transpose());
    h = ds.labels().asDiagonal() * h * ds.labels().asDiagonal();
    h = 0.5 * (h + h.transpose()).eval();
    dp.hessian = std::make_shared<DenseHessian>(std::move(h));
  } else {
    dp.hessian = std::make_shared<ImplicitHessian>(ds.features(), ds.labels(),
                                                   std::make_shared<ScatterModel>(sm), lambda);
  }
  return dp;
}

DualProblem make_dual_problem(Matrix h, Vector labels, double c0) {
  if (h.rows() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "Hessian and label sizes differ");
  }
  DualProblem dp;
  dp.hessian = std::make_shared<DenseHessian>(std::move(h));
  dp.labels = std::move(labels);
  dp.c0 = c0;
  return dp;
}

double dual_objective(const DualProblem& dp, const Vector& alpha) {
  const Vector g = gradient(dp, alpha);
  return 0.5 * alpha.dot(Vector::Ones(alpha.size()) + g);
}

KktResidual kkt_report(const DualProblem& dp, const Vector& alpha) {
  const Vector& y = dp.labels;
  const double c = dp.c0;
  const Vector g = gradient(dp, alpha);

  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  KktResidual r;
  for (Index i = 0; i < alpha.size(); ++i) {
    const double a = std::clamp(alpha[i], 0.0, c);
    r.box = std::max({r.box, -alpha[i], alpha[i] - c});
    const double yg = y[i] * g[i];
    if (in_up(y[i], a, c)) lower = std::max(lower, yg);
    if (in_low(y[i], a, c)) upper = std::min(upper, yg);
  }
  r.equality = std::abs(alpha.dot(y));
  if (std::isfinite(lower) && std::isfinite(upper)) {
    r.stationarity = std::max(0.0, 0.5 * (lower - upper));
    r.multiplier = 0.5 * (lower + upper);
  } else if (std::isfinite(lower)) {
    r.multiplier = lower;
  } else if (std::isfinite(upper)) {
    r.multiplier = upper;
  }
  return r;
}

DualSolution solve_dual(const DualProblem& dp) {
  if (!dp.hessian || dp.hessian->size() != dp.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "dual problem Hessian missing or mis-sized");
  }
  if (!(dp.c0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C0 must be positive");
  const Vector& y = dp.labels;
  require_two_labels(y);

  const Index n = dp.size();
  const double c = dp.c0;
  const long budget = dp.max_passes > 0 ? dp.max_passes : 10000L * static_cast<long>(n);
  const Index cache_rows = std::max<Index>(2, (Index{1} << 25) / std::max<Index>(n, 1));
  RowCache cache(*dp.hessian, cache_rows);

  DualSolution sol;
  sol.alpha = Vector::Zero(n);
  Vector& alpha = sol.alpha;
  Vector g = Vector::Ones(n);

  while (true) {
    Index i = -1;
    Index j = -1;
    double m = -std::numeric_limits<double>::infinity();
    double big_m = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      const double yg = y[t] * g[t];
      if (in_up(y[t], alpha[t], c) && yg > m) {
        m = yg;
        i = t;
      }
      if (in_low(y[t], alpha[t], c) && yg < big_m) {
        big_m = yg;
        j = t;
      }
    }
    if (i < 0 || j < 0 || 0.5 * (m - big_m) <= dp.tol) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= budget) break;

    const Vector hi = cache.row(i);
    const Vector& hj = cache.row(j);
    double curvature = hi[i] + hj[j] - 2.0 * y[i] * y[j] * hi[j];
    curvature = std::max(curvature, kCurvatureFloor);

    const double room_i = y[i] > 0 ? c - alpha[i] : alpha[i];
    const double room_j = y[j] > 0 ? alpha[j] : c - alpha[j];
    const double step = std::min({(m - big_m) / curvature, room_i, room_j});

    alpha[i] += y[i] * step;
    alpha[j] -= y[j] * step;
    if (step == room_i) alpha[i] = y[i] > 0 ? c : 0.0;
    if (step == room_j) alpha[j] = y[j] > 0 ? 0.0 : c;
    g.noalias() -= step * (y[i] * hi - y[j] * hj);
    ++sol.iterations;
  }

  sol.objective = dual_objective(dp, alpha);
  sol.kkt_violation = kkt_report(dp, alpha).worst();
  return sol;
}

}  // namespace npdmd
