#include "fsupart/system.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "fsupart/error.hpp"

namespace fsupart {

namespace {

void expect_shape(const Matrix& m, long rows, long cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "matrix " << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows
       << "x" << cols;
    throw Error("dimension_mismatch", os.str());
  }
}

}  // namespace

bool Guard::contains(const Vector& x, const Vector& u, double tol) const {
  if (h.size() == 0) return true;
  Vector lhs = Hx * x + Hu * u;
  return ((lhs - h).array() <= tol).all();
}

bool Guard::interior(const Vector& x, const Vector& u, double tol) const {
  if (h.size() == 0) return true;
  Vector lhs = Hx * x + Hu * u;
  return ((lhs - h).array() < -tol).all();
}

std::optional<std::size_t> PwaModel::active_mode(const Vector& x, const Vector& u) const {
  for (std::size_t q = 0; q < modes.size(); ++q) {
    if (modes[q].guard.contains(x, u)) return q;
  }
  return std::nullopt;
}

void validate(const LinearModel& model) {
  if (model.A.rows() != model.A.cols()) {
    throw Error("dimension_mismatch", "matrix A must be square, got " +
                                          std::to_string(model.A.rows()) + "x" +
                                          std::to_string(model.A.cols()));
  }
  if (model.A.rows() == 0) throw Error("dimension_mismatch", "matrix A has no states");
  expect_shape(model.B, model.A.rows(), model.B.cols(), "B");
  if (model.B.cols() == 0) throw Error("dimension_mismatch", "matrix B has no inputs");
  if (!model.A.allFinite()) throw Error("non_finite", "matrix A has non-finite entries");
  if (!model.B.allFinite()) throw Error("non_finite", "matrix B has non-finite entries");
}

void validate(const PwaModel& model) {
  if (model.modes.empty()) throw Error("dimension_mismatch", "PWA model needs at least one mode");
  const long n = model.modes.front().A.rows();
  const long p = model.modes.front().B.cols();
  for (std::size_t q = 0; q < model.modes.size(); ++q) {
    const auto& m = model.modes[q];
    const std::string tag = "[mode " + std::to_string(q) + "]";
    validate(LinearModel{m.A, m.B});
    expect_shape(m.A, n, n, "A" + tag);
    expect_shape(m.B, n, p, "B" + tag);
    if (m.g.size() != 0 && m.g.size() != n) {
      throw Error("dimension_mismatch", "vector g" + tag + " has wrong length");
    }
    const long rows = m.guard.h.size();
    if (rows > 0) {
      expect_shape(m.guard.Hx, rows, n, "Hx" + tag);
      expect_shape(m.guard.Hu, rows, p, "Hu" + tag);
    }
  }
}

void validate(const SystemModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DifferentiableModel>) {
          if (m.n <= 0 || m.p <= 0) throw Error("dimension_mismatch", "model needs n, p >= 1");
          if (!m.jacobian) throw Error("invalid_argument", "missing Jacobian evaluator");
          if (m.g.size() != 0 && m.g.size() != m.n) {
            throw Error("dimension_mismatch", "vector g has wrong length");
          }
        } else {
          validate(m);
        }
      },
      model);
}

int state_count(const SystemModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DifferentiableModel>) {
          return m.n;
        } else {
          return m.n();
        }
      },
      model);
}

int input_count(const SystemModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DifferentiableModel>) {
          return m.p;
        } else {
          return m.p();
        }
      },
      model);
}

void check_guards_disjoint(const PwaModel& model, std::span<const Vector> xs,
                           std::span<const Vector> us) {
  if (xs.size() != us.size()) {
    throw Error("invalid_argument", "sample point lists differ in length");
  }
  for (std::size_t s = 0; s < xs.size(); ++s) {
    long first = -1;
    for (std::size_t q = 0; q < model.modes.size(); ++q) {
      if (!model.modes[q].guard.interior(xs[s], us[s])) continue;
      if (first >= 0) {
        throw Error("overlapping_guards",
                    "sample " + std::to_string(s) + " lies inside guards of modes " +
                        std::to_string(first) + " and " + std::to_string(q),
                    {static_cast<long>(s), first, static_cast<long>(q)});
      }
      first = static_cast<long>(q);
    }
  }
}

DifferentiableModel as_differentiable(const LinearModel& model) {
  validate(model);
  DifferentiableModel out;
  out.n = model.n();
  out.p = model.p();
  out.g = Vector::Zero(model.n());
  out.jacobian = [A = model.A, B = model.B](const Vector&, const Vector&) {
    return Jacobian{A, B};
  };
  return out;
}

Jacobian finite_difference_jacobian(const Dynamics& f, const Vector& x, const Vector& u,
                                    double step) {
  const long n = x.size();
  const long p = u.size();
  Jacobian jac{Matrix::Zero(n, n), Matrix::Zero(n, p)};
  for (long i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    jac.dfdx.col(i) = (f(xp, u) - f(xm, u)) / (2.0 * step);
  }
  for (long i = 0; i < p; ++i) {
    Vector up = u, um = u;
    up(i) += step;
    um(i) -= step;
    jac.dfdu.col(i) = (f(x, up) - f(x, um)) / (2.0 * step);
  }
  return jac;
}

DifferentiableModel from_dynamics(int n, int p, Dynamics f, Vector g, double step) {
  DifferentiableModel out;
  out.n = n;
  out.p = p;
  out.g = g.size() == 0 ? Vector::Zero(n) : std::move(g);
  out.jacobian = [f = std::move(f), step](const Vector& x, const Vector& u) {
    return finite_difference_jacobian(f, x, u, step);
  };
  return out;
}

}  // namespace fsupart
