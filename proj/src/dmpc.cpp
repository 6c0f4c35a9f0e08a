#include "fsupart/dmpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "fsupart/error.hpp"
#include "fsupart/io.hpp"

namespace fsupart {

// ---------------------------------------------------------------- splitting

std::vector<CsuSystem> split_system(const LinearModel& model, const Partition& partition) {
  validate(model);
  const auto& coll = partition.source();
  const auto& g = coll.graph();
  if (g.num_states() != model.n() || g.num_inputs() != model.p()) {
    throw Error("index_inconsistency", "partition was built for a system of different size");
  }
  const auto& blocks = partition.blocks();
  std::vector<CsuSystem> out(blocks.size());
  std::vector<int> block_of_state(model.n(), -1), block_of_input(model.p(), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& c = out[b];
    c.id = static_cast<int>(b);
    for (int f : blocks[b]) {
      for (auto v : coll[f].state_nodes) c.states.push_back(g.state_index(v));
      for (auto v : coll[f].input_nodes) c.inputs.push_back(v);
    }
    std::sort(c.states.begin(), c.states.end());
    std::sort(c.inputs.begin(), c.inputs.end());
    for (int s : c.states) block_of_state[s] = c.id;
    for (int i : c.inputs) block_of_input[i] = c.id;
  }
  for (int s = 0; s < model.n(); ++s) {
    if (block_of_state[s] < 0) throw Error("index_inconsistency", "state not covered by the partition", {s});
  }
  for (int i = 0; i < model.p(); ++i) {
    if (block_of_input[i] < 0) throw Error("index_inconsistency", "input not covered by the partition", {i});
    for (int s = 0; s < model.n(); ++s) {
      if (model.B(s, i) != 0.0 && block_of_state[s] != block_of_input[i]) {
        throw Error("index_inconsistency", "input actuates a state in another CSU", {s, i});
      }
    }
  }
  for (auto& c : out) {
    c.A = model.A(c.states, c.states);
    c.B = model.B(c.states, c.inputs);
    for (const auto& other : out) {
      if (other.id == c.id) continue;
      Matrix block = model.A(c.states, other.states);
      if ((block.array() != 0.0).any()) c.couplings.push_back({other.id, std::move(block)});
    }
  }
  return out;
}

LinearModel assemble_system(const std::vector<CsuSystem>& csus, int n, int p) {
  LinearModel m{Matrix::Zero(n, n), Matrix::Zero(n, p)};
  for (const auto& c : csus) {
    m.A(c.states, c.states) = c.A;
    m.B(c.states, c.inputs) = c.B;
    for (const auto& cp : c.couplings) m.A(c.states, csus.at(cp.neighbor).states) = cp.A;
  }
  return m;
}

// ---------------------------------------------------------------- scenario

void Scenario::validate() const {
  if (horizon < 1) throw Error("invalid_argument", "horizon must be >= 1");
  if (steps < 0) throw Error("invalid_argument", "steps must be >= 0");
  if (!(u_lo <= u_hi) || !(x_lo <= x_hi)) throw Error("invalid_argument", "bounds are not ordered");
  if (!(rho > 0.0) || !(eps > 0.0)) throw Error("invalid_argument", "rho and eps must be positive");
  if (!(q_weight >= 0.0) || !(r_weight >= 0.0) || !(soft_weight > 0.0)) {
    throw Error("invalid_argument", "cost weights must be non-negative");
  }
  if (max_iter < 1 || qp_max_iter < 1) throw Error("invalid_argument", "iteration caps must be >= 1");
}

Vector Scenario::reference(int k, int n) const {
  return Vector::Constant(n, amplitude * std::sin(omega * k + phase));
}

Matrix Scenario::reference_window(int k, int n) const {
  Matrix r(n, horizon);
  for (int t = 0; t < horizon; ++t) r.col(t) = reference(k + 1 + t, n);
  return r;
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw Error("invalid_json", "scenario must be an object");
  Scenario s;
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) {
      if (!j[key].is_number()) throw Error("invalid_json", std::string("scenario.") + key + ": expected a number");
      dst = j[key].get<double>();
    }
  };
  auto integer = [&](const char* key, int& dst) {
    if (j.contains(key)) {
      if (!j[key].is_number_integer()) throw Error("invalid_json", std::string("scenario.") + key + ": expected an integer");
      dst = j[key].get<int>();
    }
  };
  auto pair = [&](const char* key, double& lo, double& hi) {
    if (!j.contains(key)) return;
    const auto& b = j[key];
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
      throw Error("invalid_json", std::string("scenario.") + key + ": expected [lo, hi]");
    }
    lo = b[0].get<double>();
    hi = b[1].get<double>();
  };
  integer("horizon", s.horizon);
  integer("steps", s.steps);
  if (j.contains("reference")) {
    const auto& r = j["reference"];
    if (r.contains("amplitude")) s.amplitude = r["amplitude"].get<double>();
    if (r.contains("omega")) s.omega = r["omega"].get<double>();
    if (r.contains("phase")) s.phase = r["phase"].get<double>();
  }
  pair("u_bounds", s.u_lo, s.u_hi);
  pair("x_bounds", s.x_lo, s.x_hi);
  num("Q", s.q_weight);
  num("R", s.r_weight);
  num("rho", s.rho);
  num("eps", s.eps);
  integer("max_iter", s.max_iter);
  num("soft_weight", s.soft_weight);
  num("qp_eps", s.qp_eps);
  integer("qp_max_iter", s.qp_max_iter);
  if (j.contains("x0")) s.x0 = vector_from_json(j["x0"], "x0");
  s.validate();
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json j = Json::object();
  j["horizon"] = s.horizon;
  j["steps"] = s.steps;
  j["reference"] = Json{{"amplitude", s.amplitude}, {"omega", s.omega}, {"phase", s.phase}};
  j["u_bounds"] = {s.u_lo, s.u_hi};
  j["x_bounds"] = {s.x_lo, s.x_hi};
  j["Q"] = s.q_weight;
  j["R"] = s.r_weight;
  j["rho"] = s.rho;
  j["eps"] = s.eps;
  j["max_iter"] = s.max_iter;
  j["soft_weight"] = s.soft_weight;
  j["qp_eps"] = s.qp_eps;
  j["qp_max_iter"] = s.qp_max_iter;
  if (s.x0.size() > 0) j["x0"] = vector_to_json(s.x0);
  return j;
}

// ---------------------------------------------------------------- local MPC

namespace {

// x(1..H) = Gamma [U; V] + Phi x0 + Psi0 v0 for
//   x(t+1) = A x(t) + B u(t) + E v(t),
// with U = u(0..H-1) and V = v(1..H-1).
struct Condensed {
  Matrix Gamma, Phi, Psi0;
};

Condensed condense(const Matrix& A, const Matrix& B, const Matrix& E, int H) {
  const long n = A.rows(), p = B.cols(), m = E.cols();
  const long nU = H * p;
  Condensed c{Matrix::Zero(H * n, nU + (H - 1) * m), Matrix::Zero(H * n, n), Matrix::Zero(H * n, m)};
  std::vector<Matrix> Apow{Matrix::Identity(n, n)};
  for (int t = 1; t <= H; ++t) Apow.push_back(A * Apow.back());
  for (int t = 1; t <= H; ++t) {
    const long r = (t - 1) * n;
    c.Phi.middleRows(r, n) = Apow[t];
    for (int s = 0; s < t; ++s) {
      const Matrix& Ap = Apow[t - 1 - s];
      c.Gamma.block(r, s * p, n, p) = Ap * B;
      if (s == 0) {
        c.Psi0.middleRows(r, n) = Ap * E;
      } else {
        c.Gamma.block(r, nU + (s - 1) * m, n, m) = Ap * E;
      }
    }
  }
  return c;
}

}  // namespace

// Trajectory QP of one CSU. Consensus outputs y = G w + g are priced by the
// caller through an extra linear term; rho_y G'G sits in the Hessian.
class LocalMpc {
 public:
  LocalMpc(const Matrix& A, const Matrix& B, const Matrix& E, Matrix G, std::vector<int> g_rows,
           double rho_y, const Scenario& scn)
      : n_(static_cast<int>(A.rows())), p_(static_cast<int>(B.cols())),
        m_(static_cast<int>(E.cols())), H_(scn.horizon), scn_(scn), G_(std::move(G)),
        g_rows_(std::move(g_rows)) {
    nU_ = H_ * p_;
    auto c = condense(A, B, E, H_);
    Gamma_ = std::move(c.Gamma);
    Phi_ = std::move(c.Phi);
    Psi0_ = std::move(c.Psi0);
    const long nw = Gamma_.cols(), nx = Gamma_.rows();
    P_ = 2.0 * scn.q_weight * Gamma_.transpose() * Gamma_;
    P_.diagonal().head(nU_).array() += 2.0 * scn.r_weight;
    if (G_.rows() > 0) P_.noalias() += rho_y * G_.transpose() * G_;
    settings_.eps_abs = scn.qp_eps;
    settings_.eps_rel = scn.qp_eps;
    settings_.max_iter = scn.qp_max_iter;
    Matrix C = Matrix::Zero(nU_ + nx, nw);
    C.topLeftCorner(nU_, nU_).setIdentity();
    C.bottomRows(nx) = Gamma_;
    hard_ = std::make_unique<QpSolver>(P_, C, settings_);
  }

  long vars() const { return Gamma_.cols(); }

  void prepare(const Vector& x0, const Vector& v0, const Matrix& ref) {
    X0_ = Phi_ * x0;
    if (m_ > 0) X0_.noalias() += Psi0_ * v0;
    const Vector R = ref.reshaped();  // column t is r(t + 1)
    q_base_ = 2.0 * scn_.q_weight * Gamma_.transpose() * (X0_ - R);
    const long nx = Gamma_.rows();
    l_.resize(nU_ + nx);
    u_.resize(nU_ + nx);
    l_.head(nU_).setConstant(scn_.u_lo);
    u_.head(nU_).setConstant(scn_.u_hi);
    l_.tail(nx) = Vector::Constant(nx, scn_.x_lo) - X0_;
    u_.tail(nx) = Vector::Constant(nx, scn_.x_hi) - X0_;
    g_.setZero(static_cast<long>(g_rows_.size()));
    for (std::size_t k = 0; k < g_rows_.size(); ++k) {
      if (g_rows_[k] >= 0) g_(static_cast<long>(k)) = X0_(g_rows_[k]);
    }
  }

  // Hard state bounds first; on failure the state rows become soft,
  // X = Gamma w + s with s penalized by soft_weight. Returns false if the
  // soft problem did not converge either (the last iterate is kept).
  bool solve(const Vector& q_extra, bool& soft) {
    last_iterations_ = 0;
    Vector q = q_base_;
    if (q_extra.size() > 0) q += q_extra;
    if (!soft) {
      auto r = hard_->solve(q, l_, u_);
      last_iterations_ += r.iterations;
      if (r.status == QpStatus::Solved) {
        w_ = r.x;
        return true;
      }
      soft = true;
    }
    const long nx = Gamma_.rows(), nw = vars();
    if (!soft_) {
      Matrix P = Matrix::Zero(nw + nx, nw + nx);
      P.topLeftCorner(nw, nw) = P_;
      P.bottomRightCorner(nx, nx).diagonal().setConstant(2.0 * scn_.soft_weight);
      Matrix C = Matrix::Zero(nU_ + nx, nw + nx);
      C.topLeftCorner(nU_, nU_).setIdentity();
      C.block(nU_, 0, nx, nw) = Gamma_;
      C.bottomRightCorner(nx, nx).setIdentity();
      soft_ = std::make_unique<QpSolver>(P, C, settings_);
    }
    Vector qs = Vector::Zero(nw + nx);
    qs.head(nw) = q;
    auto r = soft_->solve(qs, l_, u_);
    last_iterations_ += r.iterations;
    w_ = r.x.head(nw);
    return r.status == QpStatus::Solved;
  }

  int last_iterations() const { return last_iterations_; }
  Vector first_input() const { return w_.head(p_).cwiseMax(scn_.u_lo).cwiseMin(scn_.u_hi); }
  Vector outputs() const { return G_ * w_ + g_; }
  const Vector& g() const { return g_; }
  const Matrix& G() const { return G_; }

 private:
  int n_, p_, m_, H_;
  long nU_ = 0;
  Scenario scn_;
  Matrix Gamma_, Phi_, Psi0_, P_, G_;
  std::vector<int> g_rows_;  // row of X0 feeding each output, -1 for copies
  QpSettings settings_;
  std::unique_ptr<QpSolver> hard_, soft_;
  Vector X0_, q_base_, l_, u_, g_, w_;
  int last_iterations_ = 0;
};

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

CentralizedMpc::CentralizedMpc(const LinearModel& model, const Scenario& scenario) {
  validate(model);
  scenario.validate();
  local_ = std::make_unique<LocalMpc>(model.A, model.B, Matrix::Zero(model.n(), 0), Matrix(0, 0),
                                      std::vector<int>{}, 0.0, scenario);
}

CentralizedMpc::~CentralizedMpc() = default;

ControlStep CentralizedMpc::step(const Vector& x, const Matrix& ref) {
  ControlStep out;
  const auto t0 = Clock::now();
  local_->prepare(x, Vector(0), ref);
  out.converged = local_->solve(Vector(0), out.soft);
  out.qp_iterations = local_->last_iterations();
  out.core_times = {{seconds_since(t0)}};
  out.iterations = 1;
  out.primal = {0.0};
  out.dual = {0.0};
  out.u = local_->first_input();
  return out;
}

// ---------------------------------------------------------------- ADMM

struct AdmmDmpc::Agent {
  std::unique_ptr<LocalMpc> mpc;
  std::vector<int> zidx;                    // consensus slot of every output
  std::vector<int> row_next;                // output row one sample later
  std::vector<std::pair<int, int>> v0_src;  // (neighbour, local state) per copy column
  Vector lambda, y;
  bool soft = false;
};

AdmmDmpc::AdmmDmpc(std::vector<CsuSystem> csus, int n, int p, const Scenario& scenario)
    : csus_(std::move(csus)), n_(n), p_(p), scn_(scenario) {
  scn_.validate();
  const int H = scn_.horizon;
  const std::size_t N = csus_.size();
  // Used columns of every coupling block, and per owner the union of its
  // states that some neighbour reads.
  std::vector<std::vector<std::vector<int>>> cols(N);
  std::vector<std::vector<int>> shared(N);
  for (std::size_t i = 0; i < N; ++i) {
    for (const auto& cp : csus_[i].couplings) {
      std::vector<int> c;
      for (long k = 0; k < cp.A.cols(); ++k) {
        if ((cp.A.col(k).array() != 0.0).any()) c.push_back(static_cast<int>(k));
      }
      for (int k : c) shared.at(cp.neighbor).push_back(k);
      cols[i].push_back(std::move(c));
    }
  }
  std::vector<int> offset(N + 1, 0);
  std::vector<std::vector<int>> pos(N);
  for (std::size_t j = 0; j < N; ++j) {
    auto& s = shared[j];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    pos[j].assign(csus_[j].states.size(), -1);
    for (std::size_t k = 0; k < s.size(); ++k) pos[j][s[k]] = static_cast<int>(k);
    offset[j + 1] = offset[j] + (H - 1) * static_cast<int>(s.size());
  }
  // slot of state s of owner j at time t >= 1
  auto slot = [&](std::size_t j, int t, int s) {
    return offset[j] + (t - 1) * static_cast<int>(shared[j].size()) + pos[j][s];
  };
  z_ = Vector::Zero(offset[N]);
  z_count_.assign(offset[N], 0);
  z_next_.resize(offset[N]);
  for (std::size_t j = 0; j < N; ++j) {
    for (int t = 1; t < H; ++t) {
      for (int s : shared[j]) z_next_[slot(j, t, s)] = slot(j, std::min(t + 1, H - 1), s);
    }
  }

  for (std::size_t i = 0; i < N; ++i) {
    const auto& c = csus_[i];
    const int ni = static_cast<int>(c.states.size());
    int m = 0;
    for (const auto& cl : cols[i]) m += static_cast<int>(cl.size());
    Agent a;
    Matrix E(ni, m);
    int col = 0;
    for (std::size_t k = 0; k < c.couplings.size(); ++k) {
      for (int s : cols[i][k]) {
        E.col(col++) = c.couplings[k].A.col(s);
        a.v0_src.push_back({c.couplings[k].neighbor, s});
      }
    }
    const Matrix Gamma = condense(c.A, c.B, E, H).Gamma;
    const long nU = static_cast<long>(H) * static_cast<long>(c.inputs.size());
    const int n_own = (H - 1) * static_cast<int>(shared[i].size());
    const int ny = n_own + (H - 1) * m;
    Matrix G = Matrix::Zero(ny, Gamma.cols());
    std::vector<int> g_rows(ny, -1);
    int row = 0;
    for (int t = 1; t < H; ++t) {
      for (int s : shared[i]) {
        g_rows[row] = (t - 1) * ni + s;
        G.row(row) = Gamma.row(g_rows[row]);
        a.zidx.push_back(slot(i, t, s));
        a.row_next.push_back(t + 1 < H ? row + static_cast<int>(shared[i].size()) : row);
        ++row;
      }
    }
    for (int t = 1; t < H; ++t) {
      for (int k = 0; k < m; ++k) {
        G(row, nU + (t - 1) * m + k) = 1.0;
        a.zidx.push_back(slot(a.v0_src[k].first, t, a.v0_src[k].second));
        a.row_next.push_back(t + 1 < H ? row + m : row);
        ++row;
      }
    }
    for (int z : a.zidx) ++z_count_[z];
    a.lambda = Vector::Zero(ny);
    a.mpc = std::make_unique<LocalMpc>(c.A, c.B, E, std::move(G), std::move(g_rows), scn_.rho, scn_);
    agents_.push_back(std::move(a));
  }
}

AdmmDmpc::~AdmmDmpc() = default;

ControlStep AdmmDmpc::step(const Vector& x, const Matrix& ref) {
  if (x.size() != n_ || ref.rows() != n_ || ref.cols() != scn_.horizon) {
    throw Error("dimension_mismatch", "state or reference window has the wrong size");
  }
  const std::size_t N = agents_.size();
  const double rho = scn_.rho;
  for (std::size_t i = 0; i < N; ++i) {
    auto& a = agents_[i];
    const auto& c = csus_[i];
    Vector v0(static_cast<long>(a.v0_src.size()));
    for (std::size_t k = 0; k < a.v0_src.size(); ++k) {
      v0(static_cast<long>(k)) = x(csus_[a.v0_src[k].first].states[a.v0_src[k].second]);
    }
    a.mpc->prepare(x(c.states), v0, ref(c.states, Eigen::all));
    a.soft = false;
    if (started_) {
      const Vector l = a.lambda;
      for (std::size_t k = 0; k < a.row_next.size(); ++k) a.lambda(static_cast<long>(k)) = l(a.row_next[k]);
    }
  }
  // Warm start: consensus values and multipliers of the previous step,
  // shifted one sample.
  if (started_) {
    const Vector z = z_;
    for (long e = 0; e < z_.size(); ++e) z_(e) = z(z_next_[e]);
  }
  started_ = true;
  ControlStep out;
  out.u = Vector::Zero(p_);
  Vector z_prev(z_.size()), acc(z_.size());
  const int max_iter = z_.size() == 0 ? 1 : scn_.max_iter;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> times(N);
    for (std::size_t i = 0; i < N; ++i) {
      auto& a = agents_[i];
      Vector q_extra;
      if (!a.zidx.empty()) {
        Vector zi(static_cast<long>(a.zidx.size()));
        for (std::size_t k = 0; k < a.zidx.size(); ++k) zi(static_cast<long>(k)) = z_(a.zidx[k]);
        q_extra = a.mpc->G().transpose() * (a.lambda + rho * (a.mpc->g() - zi));
      }
      const auto t0 = Clock::now();
      const bool ok = a.mpc->solve(q_extra, a.soft);
      times[i] = seconds_since(t0);
      out.qp_iterations += a.mpc->last_iterations();
      if (!ok) out.converged = false;
      a.y = a.mpc->outputs();
      out.soft = out.soft || a.soft;
    }
    out.core_times.push_back(std::move(times));
    out.iterations = it;
    if (z_.size() == 0) {
      out.primal.push_back(0.0);
      out.dual.push_back(0.0);
      break;
    }
    z_prev = z_;
    acc.setZero();
    for (const auto& a : agents_) {
      for (std::size_t k = 0; k < a.zidx.size(); ++k) {
        acc(a.zidx[k]) += a.y(static_cast<long>(k)) + a.lambda(static_cast<long>(k)) / rho;
      }
    }
    for (long e = 0; e < z_.size(); ++e) z_(e) = acc(e) / z_count_[e];
    double primal = 0.0;
    for (auto& a : agents_) {
      for (std::size_t k = 0; k < a.zidx.size(); ++k) {
        const double r = a.y(static_cast<long>(k)) - z_(a.zidx[k]);
        a.lambda(static_cast<long>(k)) += rho * r;
        primal = std::max(primal, std::abs(r));
      }
    }
    const double dual = rho * (z_ - z_prev).lpNorm<Eigen::Infinity>();
    out.primal.push_back(primal);
    out.dual.push_back(dual);
    if (primal <= scn_.eps && dual <= scn_.eps) break;
    if (it == max_iter) out.converged = false;
  }
  for (std::size_t i = 0; i < N; ++i) out.u(csus_[i].inputs) = agents_[i].mpc->first_input();
  return out;
}

ControlStep centralized_mpc_step(const LinearModel& model, const Vector& x, const Matrix& ref,
                                 const Scenario& scenario) {
  CentralizedMpc mpc(model, scenario);
  return mpc.step(x, ref);
}

ControlStep admm_dmpc_step(const std::vector<CsuSystem>& csus, int n, int p, const Vector& x,
                           const Matrix& ref, const Scenario& scenario) {
  AdmmDmpc dmpc(csus, n, p, scenario);
  return dmpc.step(x, ref);
}

// ---------------------------------------------------------------- simulation

double RunMetrics::mean_max_core_time() const {
  if (steps.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : steps) s += r.max_core_time;
  return s / static_cast<double>(steps.size());
}

double RunMetrics::bound_violation(const Scenario& scn) const {
  double v = 0.0;
  if (states.size() > 0) {
    v = std::max(v, states.maxCoeff() - scn.x_hi);
    v = std::max(v, scn.x_lo - states.minCoeff());
  }
  if (inputs.size() > 0) {
    v = std::max(v, inputs.maxCoeff() - scn.u_hi);
    v = std::max(v, scn.u_lo - inputs.minCoeff());
  }
  return std::max(v, 0.0);
}

RunMetrics simulate(const LinearModel& model, const Partition& partition, const Scenario& scn) {
  scn.validate();
  const int n = model.n(), p = model.p(), T = scn.steps;
  auto csus = split_system(model, partition);
  std::unique_ptr<CentralizedMpc> central;
  std::unique_ptr<AdmmDmpc> admm;
  if (csus.size() == 1) {
    central = std::make_unique<CentralizedMpc>(model, scn);
  } else {
    admm = std::make_unique<AdmmDmpc>(csus, n, p, scn);
  }
  RunMetrics m;
  m.n_csu = static_cast<int>(csus.size());
  m.states = Matrix::Zero(n, T + 1);
  m.inputs = Matrix::Zero(p, T);
  m.references = Matrix::Zero(n, T + 1);
  if (scn.x0.size() > 0) {
    if (scn.x0.size() != n) throw Error("dimension_mismatch", "scenario x0 has the wrong size");
    m.states.col(0) = scn.x0;
  }
  m.references.col(0) = scn.reference(0, n);
  double cum = 0.0, core_seconds = 0.0;
  for (int k = 0; k < T; ++k) {
    const Vector x = m.states.col(k);
    const Matrix ref = scn.reference_window(k, n);
    ControlStep c = central ? central->step(x, ref) : admm->step(x, ref);
    const Vector next = model.A * x + model.B * c.u;
    const Vector r = scn.reference(k + 1, n);
    StepRecord rec;
    rec.step = k;
    rec.stage_cost = scn.q_weight * (next - r).squaredNorm() + scn.r_weight * c.u.squaredNorm();
    cum += rec.stage_cost;
    rec.cum_cost = cum;
    rec.admm_iters = c.iterations;
    for (const auto& it : c.core_times) {
      const double slowest = it.empty() ? 0.0 : *std::max_element(it.begin(), it.end());
      rec.max_core_time += slowest;
      core_seconds += slowest * static_cast<double>(it.size());
    }
    rec.core_seconds_cum = core_seconds;
    rec.converged = c.converged;
    rec.soft = c.soft;
    m.states.col(k + 1) = next;
    m.inputs.col(k) = c.u;
    m.references.col(k + 1) = r;
    m.steps.push_back(rec);
    m.primal.push_back(std::move(c.primal));
    m.dual.push_back(std::move(c.dual));
    m.core_times.push_back(std::move(c.core_times));
  }
  return m;
}

std::string metrics_csv(const RunMetrics& m) {
  std::ostringstream os;
  os.precision(12);
  os << "step,stage_cost,cum_cost,admm_iters,max_core_time,core_seconds_cum\n";
  for (const auto& r : m.steps) {
    os << r.step << ',' << r.stage_cost << ',' << r.cum_cost << ',' << r.admm_iters << ','
       << r.max_core_time << ',' << r.core_seconds_cum << '\n';
  }
  return os.str();
}

void write_traces(const RunMetrics& m, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("io", "cannot create " + dir + ": " + ec.message());
  auto matrix_csv = [](const Matrix& X, const char* prefix, const Matrix* ref) {
    std::ostringstream os;
    os.precision(12);
    os << "step";
    for (long i = 0; i < X.rows(); ++i) os << ',' << prefix << i + 1;
    if (ref) {
      for (long i = 0; i < ref->rows(); ++i) os << ",r" << i + 1;
    }
    os << '\n';
    for (long k = 0; k < X.cols(); ++k) {
      os << k;
      for (long i = 0; i < X.rows(); ++i) os << ',' << X(i, k);
      if (ref) {
        for (long i = 0; i < ref->rows(); ++i) os << ',' << (*ref)(i, k);
      }
      os << '\n';
    }
    return os.str();
  };
  const fs::path d(dir);
  write_text_file((d / "states.csv").string(), matrix_csv(m.states, "x", &m.references));
  write_text_file((d / "inputs.csv").string(), matrix_csv(m.inputs, "u", nullptr));
  std::ostringstream res, cores;
  res.precision(12);
  cores.precision(12);
  res << "step,iteration,primal,dual\n";
  cores << "step,iteration,core,seconds\n";
  for (std::size_t k = 0; k < m.primal.size(); ++k) {
    for (std::size_t it = 0; it < m.primal[k].size(); ++it) {
      res << k << ',' << it + 1 << ',' << m.primal[k][it] << ',' << m.dual[k][it] << '\n';
    }
    for (std::size_t it = 0; it < m.core_times[k].size(); ++it) {
      for (std::size_t c = 0; c < m.core_times[k][it].size(); ++c) {
        cores << k << ',' << it + 1 << ',' << c << ',' << m.core_times[k][it][c] << '\n';
      }
    }
  }
  write_text_file((d / "residuals.csv").string(), res.str());
  write_text_file((d / "core_times.csv").string(), cores.str());
}

}  // namespace fsupart
