#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ovh;

namespace {

FeasibilityProblem ineq(Matrix A, Vector b) { return {std::move(A), std::move(b), Matrix(0, A.cols()), Vector(0)}; }

}  // namespace

TEST(Feasibility, UnitInterval) {
  Matrix A(2, 1);
  A << 1, -1;
  Vector b(2);
  b << 1, 0;
  const auto r = solve_feasibility(ineq(A, b));
  ASSERT_TRUE(r.feasible());
  ASSERT_TRUE(r.witness);
  EXPECT_GE((*r.witness)(0), -1e-7);
  EXPECT_LE((*r.witness)(0), 1 + 1e-7);
}

TEST(Feasibility, ContradictoryBounds) {
  Matrix A(2, 1);
  A << 1, -1;
  Vector b(2);
  b << -1, 0;  // x <= -1 and x >= 0
  const auto r = solve_feasibility(ineq(A, b));
  EXPECT_EQ(r.status, LpStatus::Infeasible);
  EXPECT_FALSE(r.witness);
}

TEST(Feasibility, AbsPreimageOnNegativeSide) {
  // x <= 0 with -x = 0.5
  FeasibilityProblem p{Matrix::Ones(1, 1), Vector::Zero(1), Matrix::Constant(1, 1, -1.0), Vector::Constant(1, 0.5)};
  const auto r = solve_feasibility(p);
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR((*r.witness)(0), -0.5, 1e-9);
}

TEST(Feasibility, EqualityOnly) {
  FeasibilityProblem p{Matrix(0, 2), Vector(0), Matrix::Ones(1, 2), Vector::Constant(1, 3.0)};
  const auto r = solve_feasibility(p);
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR(r.witness->sum(), 3.0, 1e-9);
}

TEST(Feasibility, InconsistentEqualities) {
  Matrix E(2, 2);
  E << 1, 1, 2, 2;
  Vector f(2);
  f << 1, 3;
  const auto r = solve_feasibility({Matrix(0, 2), Vector(0), E, f});
  EXPECT_FALSE(r.feasible());
}

TEST(Feasibility, RejectsMismatchAndNaN) {
  EXPECT_THROW(solve_feasibility(ineq(Matrix::Ones(2, 1), Vector::Ones(3))), DimensionError);
  Matrix A = Matrix::Ones(1, 1);
  A(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solve_feasibility(ineq(A, Vector::Ones(1))), NumericError);
}

TEST(Feasibility, WitnessSatisfiesConstraintsOnRandomProblems) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 12);
    Matrix A(m, dim);
    Vector b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) A(i, j) = n(rng);
      b(i) = n(rng);
    }
    const auto p = ineq(A, b);
    const auto r = solve_feasibility(p);
    if (r.feasible()) {
      EXPECT_LE(p.residual(*r.witness), 1e-7);
    }
  }
}

TEST(Feasibility, AgreesWithGridOracle) {
  std::mt19937_64 rng(11);
  int decided = 0;
  for (int t = 0; t < 60; ++t) {
    const auto pp = oracle::random_planar_problem(rng);
    const auto g = oracle::grid_feasibility(pp.A, pp.b, pp.e, pp.f, 1e-3, 6.0);
    if (g == oracle::Grid::Ambiguous) continue;
    ++decided;
    EXPECT_EQ(solve_feasibility(pp.problem()).feasible(), g == oracle::Grid::Feasible) << "problem " << t;
  }
  EXPECT_GT(decided, 40);
}

TEST(Feasibility, AnchorDoesNotChangeStatus) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    const auto p = oracle::random_planar_problem(rng).problem();
    Vector anchor(2);
    anchor << n(rng), n(rng);
    EXPECT_EQ(solve_feasibility(p).status, solve_feasibility(p, kFeasibilityTolerance, anchor).status);
  }
}

TEST(Minimize, BoxCorner) {
  Matrix A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector b(4);
  b << 2, 1, 3, 0.5;
  Vector c(2);
  c << 1, 1;
  const auto s = minimize(ineq(A, b), c);
  ASSERT_EQ(s.status, LinearProgramSolution::Status::Optimal);
  EXPECT_NEAR(s.value, -1.5, 1e-9);
  EXPECT_NEAR(s.x(0), -1.0, 1e-9);
  EXPECT_NEAR(s.x(1), -0.5, 1e-9);
}

TEST(Minimize, UnboundedAndInfeasible) {
  Matrix A(1, 1);
  A << 1;
  EXPECT_EQ(minimize(ineq(A, Vector::Ones(1)), Vector::Ones(1)).status, LinearProgramSolution::Status::Unbounded);
  Matrix B(2, 1);
  B << 1, -1;
  Vector b(2);
  b << -1, 0;
  EXPECT_EQ(minimize(ineq(B, b), Vector::Ones(1)).status, LinearProgramSolution::Status::Infeasible);
}

TEST(Minimize, WithEquality) {
  // min x subject to x + y = 1, 0 <= y <= 4
  Matrix A(2, 2);
  A << 0, 1, 0, -1;
  Vector b(2);
  b << 4, 0;
  const auto s = minimize({A, b, Matrix::Ones(1, 2), Vector::Ones(1)}, Vector::Unit(2, 0));
  ASSERT_EQ(s.status, LinearProgramSolution::Status::Optimal);
  EXPECT_NEAR(s.value, -3.0, 1e-9);
}
