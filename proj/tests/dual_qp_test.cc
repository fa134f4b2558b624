#include <gtest/gtest.h>

#include <numeric>

#include "npdmd/dual_qp.h"
#include "npdmd/error.h"
#include "oracles.h"

namespace npdmd {
namespace {

Dataset two_points() {
  Matrix x(2, 1);
  x << 1, -1;
  Vector y(2);
  y << 1, -1;
  return Dataset(x, y);
}

DualProblem problem_for(const Dataset& ds, double fraction, double c0,
                        Index dense_limit = kDenseHessianLimit) {
  const ScatterModel sm = build_scatter(ds);
  const double bound = lambda_bound(sm);
  const double lambda = std::isfinite(bound) ? fraction * bound : 0.0;
  DualProblem dp = build_H(ds, sm, lambda, dense_limit);
  dp.c0 = c0;
  return dp;
}

TEST(BuildHTest, OrthogonalRowsGiveIdentity) {
  Matrix x(2, 2);
  x << 1, 0, 0, 1;
  Vector y(2);
  y << 1, -1;
  const Dataset ds(x, y);
  const DualProblem dp = build_H(ds, build_scatter(ds), 0.0);
  EXPECT_EQ((*dp.hessian->dense() - Matrix::Identity(2, 2)).norm(), 0.0);
}

TEST(BuildHTest, ZeroLambdaIsSignedGram) {
  const Dataset ds = oracle::random_dataset(2, 4, 5, 11);
  const DualProblem dp = build_H(ds, build_scatter(ds), 0.0);
  const Matrix& x = ds.features();
  const Vector& y = ds.labels();
  const Matrix want = (y * y.transpose()).cwiseProduct(x * x.transpose());
  EXPECT_LT((*dp.hessian->dense() - want).norm(), 1e-12 * want.norm());
}

TEST(BuildHTest, MatchesDenseOracle) {
  const Dataset ds = oracle::random_dataset(6, 3, 3, 25);
  const ScatterModel sm = build_scatter(ds);
  const double lambda = 0.4 * lambda_bound(sm);
  const DualProblem dp = build_H(ds, sm, lambda);
  const Matrix& x = ds.features();
  const Matrix yx = ds.labels().asDiagonal() * x;
  const Matrix want =
      yx * oracle::dense_inverse_apply(oracle::dense_scatter(ds), lambda, yx.transpose());
  EXPECT_LT((*dp.hessian->dense() - want).norm(), 1e-8 * want.norm());
  const Matrix& h = *dp.hessian->dense();
  EXPECT_EQ((h - h.transpose()).norm(), 0.0);
}

TEST(BuildHTest, ImplicitRowsMatchDense) {
  const Dataset ds = oracle::random_dataset(9, 6, 5, 30);
  const ScatterModel sm = build_scatter(ds);
  const double lambda = 0.7 * lambda_bound(sm);
  const DualProblem dense = build_H(ds, sm, lambda);
  const DualProblem implicit = build_H(ds, sm, lambda, 0);
  ASSERT_EQ(implicit.hessian->dense(), nullptr);
  Vector row(ds.size());
  for (Index i = 0; i < ds.size(); ++i) {
    implicit.hessian->row(i, row);
    EXPECT_LT((row - dense.hessian->dense()->row(i).transpose()).norm(), 1e-10);
    EXPECT_NEAR(implicit.hessian->diagonal(i), (*dense.hessian->dense())(i, i), 1e-10);
  }
}

TEST(BuildHTest, LambdaOutOfRange) {
  const Dataset ds = oracle::random_dataset(1, 3, 3, 4);
  const ScatterModel sm = build_scatter(ds);
  EXPECT_THROW(build_H(ds, sm, lambda_bound(sm)), Error);
}

TEST(SolveDualTest, AnalyticInterior) {
  const DualSolution sol = solve_dual(problem_for(two_points(), 0.0, 10.0));
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.alpha[0], 0.5, 1e-9);
  EXPECT_NEAR(sol.alpha[1], 0.5, 1e-9);
  EXPECT_NEAR(sol.objective, 0.5, 1e-12);
  EXPECT_LE(sol.kkt_violation, 1e-10);
}

TEST(SolveDualTest, AnalyticClipped) {
  const DualSolution sol = solve_dual(problem_for(two_points(), 0.0, 0.1));
  EXPECT_DOUBLE_EQ(sol.alpha[0], 0.1);
  EXPECT_DOUBLE_EQ(sol.alpha[1], 0.1);
  EXPECT_NEAR(sol.objective, 2 * 0.1 - 2 * 0.01, 1e-12);
}

TEST(SolveDualTest, SingleClassThrows) {
  Matrix h = Matrix::Identity(3, 3);
  const DualProblem dp = make_dual_problem(h, Vector::Ones(3), 1.0);
  try {
    solve_dual(dp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
  }
}

TEST(SolveDualTest, NonPositiveC0Throws) {
  Vector y(2);
  y << 1, -1;
  EXPECT_THROW(solve_dual(make_dual_problem(Matrix::Identity(2, 2), y, 0.0)), Error);
}

TEST(KktReportTest, Examples) {
  const DualProblem dp = problem_for(two_points(), 0.0, 10.0);
  Vector alpha(2);
  alpha << 0.5, 0.5;
  EXPECT_LE(kkt_report(dp, alpha).worst(), 1e-10);
  alpha[0] += 0.1;
  EXPECT_GE(kkt_report(dp, alpha).worst(), 0.05);
  EXPECT_GT(kkt_report(dp, Vector::Zero(2)).worst(), 0.0);
}

TEST(KktReportTest, BoxViolation) {
  const DualProblem dp = problem_for(two_points(), 0.0, 1.0);
  Vector alpha(2);
  alpha << 1.5, 1.5;
  EXPECT_NEAR(kkt_report(dp, alpha).box, 0.5, 1e-15);
}

struct SmallCase {
  std::uint64_t seed;
  Index n_plus;
  Index n_minus;
  double fraction;
  double c0;
};

std::vector<SmallCase> small_cases(Index n) {
  std::vector<SmallCase> out;
  const double fractions[] = {0.0, 0.5, 0.9};
  const double c0s[] = {0.05, 0.5, 5.0};
  std::uint64_t seed = 1000 * static_cast<std::uint64_t>(n);
  for (double f : fractions) {
    for (double c : c0s) {
      const Index plus = 1 + static_cast<Index>(seed % static_cast<std::uint64_t>(n - 1));
      out.push_back({seed++, plus, n - plus, f, c});
    }
  }
  return out;
}

TEST(SolveDualTest, MatchesLatticeSearchForTinyProblems) {
  for (Index n : {2, 3}) {
    for (const SmallCase& sc : small_cases(n)) {
      const Dataset ds = oracle::random_dataset(sc.seed, sc.n_plus, sc.n_minus, 4, 0.2);
      const DualProblem dp = problem_for(ds, sc.fraction, sc.c0);
      const DualSolution sol = solve_dual(dp);
      const double grid = oracle::grid_search_max(*dp.hessian->dense(), dp.labels, sc.c0);
      EXPECT_NEAR(sol.objective, grid, 1e-4) << "n=" << n << " seed=" << sc.seed;
      EXPECT_GE(sol.objective, grid - 1e-12) << (grid - sol.objective) << " kkt " << sol.kkt_violation;
    }
  }
}

TEST(SolveDualTest, MatchesActiveSetEnumeration) {
  for (Index n : {3, 4, 5, 6}) {
    for (const SmallCase& sc : small_cases(n)) {
      const Dataset ds = oracle::random_dataset(sc.seed, sc.n_plus, sc.n_minus, 8, 0.2);
      const DualProblem dp = problem_for(ds, sc.fraction, sc.c0);
      const DualSolution sol = solve_dual(dp);
      ASSERT_TRUE(sol.converged);
      EXPECT_LE(sol.kkt_violation, 1e-6);
      const double exact = oracle::active_set_max(*dp.hessian->dense(), dp.labels, sc.c0);
      EXPECT_NEAR(sol.objective, exact, 1e-6) << "n=" << n << " seed=" << sc.seed;
    }
  }
}

TEST(SolveDualTest, FeasibilityInvariants) {
  const Dataset ds = oracle::random_dataset(77, 20, 15, 50, 0.1);
  for (double c0 : {0.01, 1.0}) {
    const DualProblem dp = problem_for(ds, 0.6, c0);
    const DualSolution sol = solve_dual(dp);
    EXPECT_GE(sol.alpha.minCoeff(), 0.0);
    EXPECT_LE(sol.alpha.maxCoeff(), c0);
    EXPECT_LE(std::abs(sol.alpha.dot(dp.labels)), dp.tol * 35 * c0);
    EXPECT_LE(sol.kkt_violation, dp.tol);
  }
}

TEST(SolveDualTest, ObjectiveNondecreasingAcrossIterations) {
  const Dataset ds = oracle::random_dataset(5, 12, 10, 30, 0.05);
  DualProblem dp = problem_for(ds, 0.5, 0.3);
  const long total = solve_dual(dp).iterations;
  ASSERT_GT(total, 5);
  double previous = 0.0;
  for (long k = 1; k <= total; ++k) {
    dp.max_passes = k;
    const DualSolution partial = solve_dual(dp);
    EXPECT_GE(partial.objective, previous - 1e-12) << "iteration " << k;
    previous = partial.objective;
  }
}

TEST(SolveDualTest, BudgetExhaustionIsFlagged) {
  const Dataset ds = oracle::random_dataset(5, 12, 10, 30, 0.05);
  DualProblem dp = problem_for(ds, 0.0, 1.0);
  dp.max_passes = 2;
  const DualSolution sol = solve_dual(dp);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
  EXPECT_GT(sol.kkt_violation, dp.tol);
}

TEST(SolveDualTest, PermutationEquivariance) {
  const Dataset ds = oracle::random_dataset(91, 9, 8, 40, 0.1);
  std::vector<Index> perm(ds.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Dataset shuffled = ds.subset(perm);
  for (double c0 : {0.02, 10.0}) {
    DualProblem a = problem_for(ds, 0.5, c0);
    DualProblem b = problem_for(shuffled, 0.5, c0);
    a.tol = b.tol = 1e-10;
    const Vector alpha = solve_dual(a).alpha;
    const Vector beta = solve_dual(b).alpha;
    for (Index i = 0; i < ds.size(); ++i) {
      EXPECT_NEAR(beta[i], alpha[perm[static_cast<std::size_t>(i)]], 1e-6 * c0);
    }
  }
}

TEST(SolveDualTest, SeparableSolutionIndependentOfLargeC0) {
  const Dataset ds = oracle::random_dataset(13, 6, 6, 30, 1.0);
  DualProblem dp = problem_for(ds, 0.3, 1e6);
  dp.tol = 1e-10;
  const Vector reference = solve_dual(dp).alpha;
  const double top = reference.maxCoeff();
  for (double scale : {2.0, 10.0, 1000.0}) {
    dp.c0 = scale * top;
    const Vector alpha = solve_dual(dp).alpha;
    EXPECT_LT((alpha - reference).norm(), 1e-7 * reference.norm()) << scale;
  }
}

TEST(SolveDualTest, ImplicitAndDensePathsAgree) {
  const Dataset ds = oracle::random_dataset(19, 10, 9, 45, 0.2);
  DualProblem dense = problem_for(ds, 0.8, 0.5);
  DualProblem implicit = problem_for(ds, 0.8, 0.5, 0);
  dense.tol = implicit.tol = 1e-9;
  const DualSolution a = solve_dual(dense);
  const DualSolution b = solve_dual(implicit);
  EXPECT_NEAR(a.objective, b.objective, 1e-9);
  EXPECT_LT((a.alpha - b.alpha).norm(), 1e-6);
}

TEST(DualObjectiveTest, MatchesDirectFormula) {
  const Dataset ds = oracle::random_dataset(4, 5, 5, 10);
  const DualProblem dp = problem_for(ds, 0.2, 1.0);
  const Vector alpha = Vector::Constant(10, 0.05);
  EXPECT_NEAR(dual_objective(dp, alpha), oracle::objective(*dp.hessian->dense(), alpha), 1e-12);
}

}  // namespace
}  // namespace npdmd
