#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace fsupart {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// x(k+1) = A x(k) + B u(k)
struct LinearModel {
  Matrix A;
  Matrix B;

  int n() const { return static_cast<int>(A.rows()); }
  int p() const { return static_cast<int>(B.cols()); }
};

// Polyhedral region { (x,u) : Hx x + Hu u <= h }.
struct Guard {
  Matrix Hx;
  Matrix Hu;
  Vector h;

  bool contains(const Vector& x, const Vector& u, double tol = 0.0) const;
  // Strict interior membership; shared boundaries between modes are allowed.
  bool interior(const Vector& x, const Vector& u, double tol = 0.0) const;
};

struct PwaMode {
  Matrix A;
  Matrix B;
  Vector g;
  Guard guard;
};

// x(k+1) = A^q x + B^q u + g^q  when (x,u) lies in the guard of mode q.
struct PwaModel {
  std::vector<PwaMode> modes;

  int n() const { return modes.empty() ? 0 : static_cast<int>(modes.front().A.rows()); }
  int p() const { return modes.empty() ? 0 : static_cast<int>(modes.front().B.cols()); }

  // First mode whose guard contains (x,u), if any.
  std::optional<std::size_t> active_mode(const Vector& x, const Vector& u) const;
};

struct Jacobian {
  Matrix dfdx;  // n x n
  Matrix dfdu;  // n x p
};

// x(k+1) = f(x,u) + g with a user supplied Jacobian evaluator.
struct DifferentiableModel {
  int n = 0;
  int p = 0;
  std::function<Jacobian(const Vector& x, const Vector& u)> jacobian;
  Vector g;
};

using SystemModel = std::variant<LinearModel, PwaModel, DifferentiableModel>;

void validate(const LinearModel& model);
void validate(const PwaModel& model);
void validate(const SystemModel& model);

int state_count(const SystemModel& model);
int input_count(const SystemModel& model);

// Throws unless no sample point lies in the interior of two different guards.
void check_guards_disjoint(const PwaModel& model, std::span<const Vector> xs,
                           std::span<const Vector> us);

// Wraps a linear model as a differentiable one with a constant Jacobian.
DifferentiableModel as_differentiable(const LinearModel& model);

// Central-difference Jacobian of f around (x,u).
using Dynamics = std::function<Vector(const Vector& x, const Vector& u)>;
Jacobian finite_difference_jacobian(const Dynamics& f, const Vector& x, const Vector& u,
                                    double step = 1e-6);
DifferentiableModel from_dynamics(int n, int p, Dynamics f, Vector g = {},
                                  double step = 1e-6);

}  // namespace fsupart
