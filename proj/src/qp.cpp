#include "fsupart/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fsupart/error.hpp"

namespace fsupart {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

}  // namespace

QpSolver::QpSolver(Matrix P, Matrix C, QpSettings settings)
    : P_(std::move(P)), C_(std::move(C)), settings_(settings), rho_(settings.rho) {
  if (P_.rows() != P_.cols()) throw Error("dimension_mismatch", "QP matrix P must be square");
  if (C_.cols() != P_.cols()) throw Error("dimension_mismatch", "QP constraint matrix has wrong width");
  if (!(rho_ > 0.0) || !(settings_.sigma > 0.0)) {
    throw Error("invalid_argument", "QP penalties must be positive");
  }
  reset();
  factor();
}

void QpSolver::reset() {
  x_ = Vector::Zero(P_.rows());
  z_ = Vector::Zero(C_.rows());
  y_ = Vector::Zero(C_.rows());
}

void QpSolver::factor() {
  Matrix K = P_;
  K.diagonal().array() += settings_.sigma;
  K.noalias() += rho_ * C_.transpose() * C_;
  kkt_.compute(K);
}

QpResult QpSolver::solve(const Vector& q, const Vector& l, const Vector& u) {
  const long n = P_.rows(), m = C_.rows();
  if (q.size() != n || l.size() != m || u.size() != m) {
    throw Error("dimension_mismatch", "QP vector sizes do not match the problem");
  }
  for (long i = 0; i < m; ++i) {
    if (l(i) > u(i)) throw Error("invalid_argument", "QP bounds are not ordered", {i});
  }
  const double sigma = settings_.sigma, a = settings_.relax;
  // Warm start: keep x and y, re-project z onto the new bounds.
  z_ = (C_ * x_).cwiseMax(l).cwiseMin(u);

  QpResult res;
  Vector xt(n), zt(m), rhs(n), y_prev = y_, Cx(m), Px(n), Cty(n);
  for (int it = 1; it <= settings_.max_iter; ++it) {
    rhs = sigma * x_ - q;
    rhs.noalias() += C_.transpose() * (rho_ * z_ - y_);
    xt = kkt_.solve(rhs);
    zt.noalias() = C_ * xt;
    x_ = a * xt + (1.0 - a) * x_;
    const Vector zr = a * zt + (1.0 - a) * z_;
    const Vector z_new = (zr + y_ / rho_).cwiseMax(l).cwiseMin(u);
    y_prev = y_;
    y_ += rho_ * (zr - z_new);
    z_ = z_new;

    if (it % settings_.check_every != 0 && it != settings_.max_iter) continue;
    Cx.noalias() = C_ * x_;
    Px.noalias() = P_ * x_;
    Cty.noalias() = C_.transpose() * y_;
    const double rp = inf_norm(Cx - z_);
    const double rd = inf_norm(Px + q + Cty);
    const double sp = std::max(inf_norm(Cx), inf_norm(z_));
    const double sd = std::max({inf_norm(Px), inf_norm(Cty), inf_norm(q)});
    res.iterations = it;
    res.primal_residual = rp;
    res.dual_residual = rd;
    if (rp <= settings_.eps_abs + settings_.eps_rel * sp &&
        rd <= settings_.eps_abs + settings_.eps_rel * sd) {
      res.status = QpStatus::Solved;
      break;
    }
    // Primal infeasibility certificate from the dual increment.
    const Vector dy = y_ - y_prev;
    const double ndy = inf_norm(dy);
    if (ndy > 1e-12) {
      const double eps = settings_.eps_infeasible * ndy;
      double support = 0.0;
      bool bounded = true;
      for (long i = 0; i < m && bounded; ++i) {
        if (dy(i) > 0.0) {
          if (std::isinf(u(i))) bounded = false;
          else support += u(i) * dy(i);
        } else if (dy(i) < 0.0) {
          if (std::isinf(l(i))) bounded = false;
          else support += l(i) * dy(i);
        }
      }
      if (bounded && support < -eps && inf_norm(C_.transpose() * dy) < eps) {
        res.status = QpStatus::Infeasible;
        break;
      }
    }
    if (settings_.adaptive_rho && it % (settings_.check_every * 5) == 0 && sp > 0 && sd > 0 &&
        rd > 0) {
      const double ratio = std::sqrt((rp / sp) / (rd / sd));
      if (ratio > 5.0 || ratio < 0.2) {
        rho_ = std::clamp(rho_ * ratio, 1e-6, 1e6);
        factor();
      }
    }
  }
  res.x = x_;
  res.y = y_;
  if (res.status == QpStatus::Infeasible) reset();
  return res;
}

QpResult qp_solve(const Matrix& H, const Vector& f, const Vector& lo, const Vector& hi, double tol,
                  int max_iter) {
  const long n = H.rows();
  if (H.cols() != n || f.size() != n || lo.size() != n || hi.size() != n) {
    throw Error("dimension_mismatch", "qp_solve: H, f, lo and hi must agree in size");
  }
  if (!H.isApprox(H.transpose(), 1e-12)) throw Error("invalid_argument", "qp_solve: H is not symmetric");
  QpSettings s;
  s.eps_abs = tol;
  s.eps_rel = 0.0;
  s.max_iter = max_iter;
  QpSolver solver(H, Matrix::Identity(n, n), s);
  auto r = solver.solve(f, lo, hi);
  if (r.status != QpStatus::Solved) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "qp_solve: no convergence after %d iterations (primal %.3g, dual %.3g)",
                  r.iterations, r.primal_residual, r.dual_residual);
    throw Error(r.status == QpStatus::Infeasible ? "qp_infeasible" : "qp_not_converged", buf);
  }
  // The iterate may sit slightly outside the box; clip.
  r.x = r.x.cwiseMax(lo).cwiseMin(hi);
  return r;
}

}  // namespace fsupart
