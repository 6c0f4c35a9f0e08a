#pragma once

#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsupart/metrics.hpp"
#include "fsupart/qp.hpp"
#include "fsupart/system.hpp"

namespace fsupart {

// Coupling from another CSU: x_i(k+1) += A * x_neighbor(k).
struct Coupling {
  int neighbor = 0;
  Matrix A;
};

struct CsuSystem {
  int id = 0;
  std::vector<int> states;  // global state indices
  std::vector<int> inputs;  // global input indices
  Matrix A;
  Matrix B;
  std::vector<Coupling> couplings;
};

// Block decomposition of a linear model along a partition of its FSUs.
// Throws index_inconsistency if an input reaches a state outside its CSU.
std::vector<CsuSystem> split_system(const LinearModel& model, const Partition& partition);
LinearModel assemble_system(const std::vector<CsuSystem>& csus, int n, int p);

struct Scenario {
  int horizon = 30;
  int steps = 60;
  // r_j(k) = amplitude * sin(omega * k + phase), the same for every state.
  double amplitude = 1.0;
  double omega = 2.0 * std::numbers::pi / 15.0;
  double phase = 0.0;
  double u_lo = -0.5, u_hi = 0.5;
  double x_lo = -0.9, x_hi = 0.9;
  double q_weight = 1.0;   // Q = q_weight * I
  double r_weight = 0.01;  // R = r_weight * I
  double rho = 0.01;
  double eps = 1e-3;
  int max_iter = 500;
  Vector x0;  // empty means zeros
  // Weight of the quadratic penalty on state bound violations, used when
  // the hard constrained problem is infeasible.
  double soft_weight = 1e4;
  double qp_eps = 1e-7;
  int qp_max_iter = 20000;

  void validate() const;
  Vector reference(int k, int n) const;
  // Columns r(k+1) .. r(k+H).
  Matrix reference_window(int k, int n) const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

struct ControlStep {
  Vector u;  // global input vector
  int iterations = 0;
  bool converged = true;
  bool soft = false;  // state bounds were relaxed
  long qp_iterations = 0;  // inner solver iterations, all CSUs
  std::vector<double> primal;  // consensus residual per iteration
  std::vector<double> dual;
  // Wall-clock seconds of every local solve, per iteration and CSU.
  std::vector<std::vector<double>> core_times;
};

class LocalMpc;

// Condensed MPC over the whole system.
class CentralizedMpc {
 public:
  CentralizedMpc(const LinearModel& model, const Scenario& scenario);
  ~CentralizedMpc();
  ControlStep step(const Vector& x, const Matrix& ref);

 private:
  std::unique_ptr<LocalMpc> local_;
};

// Consensus ADMM: every CSU optimizes its own input trajectory together with
// copies of the neighbour state trajectories that couple into it. Owners
// and copies are driven to a common value by the dual updates.
class AdmmDmpc {
 public:
  AdmmDmpc(std::vector<CsuSystem> csus, int n, int p, const Scenario& scenario);
  ~AdmmDmpc();
  ControlStep step(const Vector& x, const Matrix& ref);
  std::size_t shared_size() const { return z_.size(); }

 private:
  struct Agent;
  std::vector<CsuSystem> csus_;
  std::vector<Agent> agents_;
  int n_, p_;
  Scenario scn_;
  Vector z_;
  std::vector<int> z_count_;
  std::vector<int> z_next_;  // same quantity one sample later
  bool started_ = false;
};

ControlStep centralized_mpc_step(const LinearModel& model, const Vector& x, const Matrix& ref,
                                 const Scenario& scenario);
ControlStep admm_dmpc_step(const std::vector<CsuSystem>& csus, int n, int p, const Vector& x,
                           const Matrix& ref, const Scenario& scenario);

struct StepRecord {
  int step = 0;
  double stage_cost = 0.0;
  double cum_cost = 0.0;
  int admm_iters = 0;
  double max_core_time = 0.0;  // sum over iterations of the slowest core
  double core_seconds_cum = 0.0;
  bool converged = true;
  bool soft = false;
};

struct RunMetrics {
  int n_csu = 0;
  std::vector<StepRecord> steps;
  Matrix states;  // n x (T + 1)
  Matrix inputs;  // p x T
  Matrix references;  // n x (T + 1)
  std::vector<std::vector<double>> primal;  // per step
  std::vector<std::vector<double>> dual;
  std::vector<std::vector<std::vector<double>>> core_times;  // step, iteration, core

  double cumulative_cost() const { return steps.empty() ? 0.0 : steps.back().cum_cost; }
  double core_seconds() const { return steps.empty() ? 0.0 : steps.back().core_seconds_cum; }
  double mean_max_core_time() const;
  // Largest bound violation over the closed loop (0 when all bounds hold).
  double bound_violation(const Scenario& scenario) const;
};

// Closed loop over scenario.steps; single-block partitions use centralized
// MPC, everything else DMPC-ADMM. The plant is the global model.
RunMetrics simulate(const LinearModel& model, const Partition& partition, const Scenario& scenario);

// step,stage_cost,cum_cost,admm_iters,max_core_time,core_seconds_cum
std::string metrics_csv(const RunMetrics& m);
// states.csv, inputs.csv, residuals.csv and core_times.csv under `dir`.
void write_traces(const RunMetrics& m, const std::string& dir);

}  // namespace fsupart
