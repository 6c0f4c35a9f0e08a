#pragma once

#include <limits>

#include "fsupart/system.hpp"

namespace fsupart {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// min 1/2 x'Px + q'x  s.t.  l <= Cx <= u
struct QpSettings {
  double rho = 0.1;
  double sigma = 1e-6;
  double relax = 1.6;
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  double eps_infeasible = 1e-6;
  int max_iter = 10000;
  int check_every = 5;
  bool adaptive_rho = true;
};

enum class QpStatus { Solved, Infeasible, MaxIterations };

struct QpResult {
  Vector x;
  Vector y;  // constraint multipliers
  QpStatus status = QpStatus::MaxIterations;
  int iterations = 0;
  double primal_residual = 0.0;  // ||Cx - z||_inf
  double dual_residual = 0.0;    // ||Px + q + C'y||_inf
};

// Operator splitting (OSQP iteration) with a dense cached factorization of
// P + sigma I + rho C'C. P and C are fixed for the lifetime of the solver;
// q, l and u may change between solves, and each solve warm starts from the
// previous iterate.
class QpSolver {
 public:
  QpSolver(Matrix P, Matrix C, QpSettings settings = {});

  QpResult solve(const Vector& q, const Vector& l, const Vector& u);
  void reset();

  int variables() const { return static_cast<int>(P_.rows()); }
  int constraints() const { return static_cast<int>(C_.rows()); }
  const QpSettings& settings() const { return settings_; }

 private:
  void factor();

  Matrix P_, C_;
  QpSettings settings_;
  double rho_;
  Eigen::LDLT<Matrix> kkt_;
  Vector x_, z_, y_;
};

// Box constrained QP: min 1/2 x'Hx + f'x, lo <= x <= hi. Throws
// qp_not_converged (with the residuals in the message) unless the primal
// residual reaches tol within max_iter iterations.
QpResult qp_solve(const Matrix& H, const Vector& f, const Vector& lo, const Vector& hi,
                  double tol = 1e-8, int max_iter = 20000);

}  // namespace fsupart
