#include <gtest/gtest.h>

#include "fsupart/error.hpp"
#include "fsupart/netgen.hpp"
#include "fsupart/qp.hpp"

using namespace fsupart;

namespace {

// Long-run projected gradient with step 1/L.
Vector projected_gradient(const Matrix& H, const Vector& f, const Vector& lo, const Vector& hi) {
  const double L = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().maxCoeff();
  Vector x = Vector::Zero(H.rows());
  for (int it = 0; it < 200000; ++it) {
    const Vector next = (x - (H * x + f) / L).cwiseMax(lo).cwiseMin(hi);
    if ((next - x).lpNorm<Eigen::Infinity>() < 1e-14) break;
    x = next;
  }
  return x;
}

}  // namespace

TEST(Qp, InteriorOptimum) {
  auto r = qp_solve(Matrix::Identity(3, 3), Vector::Zero(3), Vector::Constant(3, -1), Vector::Constant(3, 1));
  EXPECT_LT(r.x.lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_EQ(r.status, QpStatus::Solved);
}

TEST(Qp, ClippedOptimum) {
  auto r = qp_solve(Matrix::Identity(4, 4), Vector::Constant(4, -2.0), Vector::Constant(4, -0.5),
                    Vector::Constant(4, 0.5));
  for (long i = 0; i < 4; ++i) EXPECT_NEAR(r.x(i), 0.5, 1e-8);
}

TEST(Qp, MatchesProjectedGradient) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix M(10, 10);
    for (long i = 0; i < M.size(); ++i) M.data()[i] = rng.uniform(-1, 1);
    Matrix H = M.transpose() * M + 0.1 * Matrix::Identity(10, 10);
    Vector f(10), lo(10), hi(10);
    for (int i = 0; i < 10; ++i) {
      f(i) = rng.uniform(-3, 3);
      lo(i) = rng.uniform(-1, 0);
      hi(i) = lo(i) + rng.uniform(0, 1);
    }
    auto r = qp_solve(H, f, lo, hi, 1e-10, 200000);
    EXPECT_LT((r.x - projected_gradient(H, f, lo, hi)).lpNorm<Eigen::Infinity>(), 1e-6) << trial;
  }
}

TEST(Qp, Deterministic) {
  Matrix H{{2, 0.5}, {0.5, 1}};
  Vector f{{-1, 1}};
  auto a = qp_solve(H, f, Vector::Constant(2, -1), Vector::Constant(2, 1));
  auto b = qp_solve(H, f, Vector::Constant(2, -1), Vector::Constant(2, 1));
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Qp, RejectsBadInput) {
  EXPECT_THROW(qp_solve(Matrix{{1, 2}, {0, 1}}, Vector::Zero(2), Vector::Zero(2), Vector::Ones(2)), Error);
  EXPECT_THROW(qp_solve(Matrix::Identity(2, 2), Vector::Zero(2), Vector::Ones(2), Vector::Zero(2)), Error);
  EXPECT_THROW(qp_solve(Matrix::Identity(2, 2), Vector::Zero(3), Vector::Zero(2), Vector::Ones(2)), Error);
}

TEST(Qp, IterationCapReported) {
  Matrix H{{1e4, 0}, {0, 1e-4}};
  try {
    qp_solve(H, Vector{{1, -1}}, Vector::Constant(2, -10), Vector::Constant(2, 10), 1e-12, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "qp_not_converged");
    EXPECT_NE(std::string(e.what()).find("primal"), std::string::npos);
  }
}

TEST(QpSolver, DetectsInfeasibility) {
  // x <= -1 and x >= 1 on the same variable.
  Matrix C{{1.0}, {1.0}};
  QpSolver s(Matrix::Identity(1, 1), C);
  auto r = s.solve(Vector::Zero(1), Vector{{-kInf, 1.0}}, Vector{{-1.0, kInf}});
  EXPECT_EQ(r.status, QpStatus::Infeasible);
}

TEST(QpSolver, WarmStartSpeedsUpResolve) {
  Matrix P = Matrix::Identity(5, 5) * 2.0;
  QpSolver s(P, Matrix::Identity(5, 5));
  const Vector lo = Vector::Constant(5, -0.3), hi = Vector::Constant(5, 0.3);
  auto first = s.solve(Vector::LinSpaced(5, -1, 1), lo, hi);
  auto again = s.solve(Vector::LinSpaced(5, -1, 1), lo, hi);
  EXPECT_EQ(first.status, QpStatus::Solved);
  EXPECT_LE(again.iterations, first.iterations);
}
