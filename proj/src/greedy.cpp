#include "fsupart/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fsupart/error.hpp"

namespace fsupart {

namespace {

// Incremental bookkeeping of the ratio index over a partial assignment with
// N sub-list slots. Node-level components equal their condensed-level sums:
// intra = sum over same-block pairs (a, b) of C(a, b), inter = twice the
// cross-block mass.
class RatioState {
 public:
  RatioState(const FsuCollection& coll, const IndexConfig& cfg, const GreedyOptions& opts)
      : coll_(coll), alpha_(cfg.alpha), opts_(opts) {
    cfg.validate();
    n_ = static_cast<int>(coll.size());
    C_ = coll.condensed().cwiseAbs();
    sym_ = C_ + C_.transpose();
    sigma_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      sigma_[i] = cfg.size_measure == SizeMeasure::Fsus ? 1.0 : coll.node_count(i);
    }
    block_of_.assign(n_, -1);
    members_.assign(n_, 0);
    size_.assign(n_, 0.0);
    to_block_ = Matrix::Zero(n_, n_);
    coupled_.assign(n_, 0.0);
  }

  int n() const { return n_; }
  int block_of(int i) const { return block_of_[i]; }
  bool any_assigned() const { return assigned_ > 0; }

  double index() const { return assigned_ == 0 ? 0.0 : ratio(I_, X_, S_); }

  double ratio(double I, double X, double S) const {
    return I / (1.0 + X) + alpha_ / (1.0 + S);
  }

  // Lowest empty slot, or -1.
  int first_empty() const {
    for (int b = 0; b < n_; ++b) {
      if (members_[b] == 0) return b;
    }
    return -1;
  }
  bool empty(int b) const { return members_[b] == 0; }

  double assign_gain(int i, int b) const {
    const double dI = C_(i, i) + to_block_(i, b);
    const double dX = 2.0 * (coupled_[i] - to_block_(i, b));
    const double dS = 2.0 * size_[b] * sigma_[i] + sigma_[i] * sigma_[i];
    return ratio(I_ + dI, X_ + dX, S_ + dS) - index();
  }

  double move_gain(int i, int b) const {
    const int a = block_of_[i];
    const double dI = to_block_(i, b) - to_block_(i, a);
    const double dX = 2.0 * (to_block_(i, a) - to_block_(i, b));
    const double s = sigma_[i];
    const double dS = 2.0 * s * (size_[b] - size_[a]) + 2.0 * s * s;
    return ratio(I_ + dI, X_ + dX, S_ + dS) - index();
  }

  void assign(int i, int b) {
    I_ += C_(i, i) + to_block_(i, b);
    X_ += 2.0 * (coupled_[i] - to_block_(i, b));
    S_ += 2.0 * size_[b] * sigma_[i] + sigma_[i] * sigma_[i];
    block_of_[i] = b;
    ++members_[b];
    size_[b] += sigma_[i];
    ++assigned_;
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      to_block_(j, b) += sym_(i, j);
      coupled_[j] += sym_(i, j);
    }
    check();
  }

  void move(int i, int b) {
    const int a = block_of_[i];
    const double s = sigma_[i];
    I_ += to_block_(i, b) - to_block_(i, a);
    X_ += 2.0 * (to_block_(i, a) - to_block_(i, b));
    S_ += 2.0 * s * (size_[b] - size_[a]) + 2.0 * s * s;
    block_of_[i] = b;
    --members_[a];
    ++members_[b];
    size_[a] -= s;
    size_[b] += s;
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      to_block_(j, a) -= sym_(i, j);
      to_block_(j, b) += sym_(i, j);
    }
    check();
  }

  bool better(double gain, double best) const {
    if (best == -std::numeric_limits<double>::infinity()) return true;
    const double tol = opts_.tie_tol * std::max(1.0, std::abs(index()));
    return gain > best + tol;
  }

  Partition result() const {
    // Unassigned FSUs never survive to here.
    return partition_from_labels(coll_, block_of_);
  }

  void record(int iteration, const char* kind, int fsu, int from, int to, double gain) const {
    if (!opts_.trace) return;
    opts_.trace->push_back(GreedyStep{iteration, kind, fsu, from, to, gain, index()});
  }

 private:
  void check() const {
    if (!opts_.cross_check) return;
    double I = 0.0, X = 0.0, S = 0.0;
    for (int a = 0; a < n_; ++a) {
      if (block_of_[a] < 0) continue;
      for (int b = 0; b < n_; ++b) {
        if (block_of_[b] < 0) continue;
        if (block_of_[a] == block_of_[b]) {
          I += C_(a, b);
        } else {
          X += 2.0 * C_(a, b);
        }
      }
    }
    std::vector<double> sizes(n_, 0.0);
    for (int a = 0; a < n_; ++a) {
      if (block_of_[a] >= 0) sizes[block_of_[a]] += sigma_[a];
    }
    for (double s : sizes) S += s * s;
    auto off = [](double x, double y) { return std::abs(x - y) > 1e-9 * std::max(1.0, std::abs(y)); };
    if (off(I_, I) || off(X_, X) || off(S_, S)) {
      std::ostringstream os;
      os << "incremental components drifted: intra " << I_ << " vs " << I << ", inter " << X_
         << " vs " << X << ", size " << S_ << " vs " << S;
      throw Error("internal", os.str());
    }
    if (std::all_of(block_of_.begin(), block_of_.end(), [](int b) { return b >= 0; })) {
      const Partition p = result();
      const auto& c = p.components();
      if (off(I_, c.intra) || off(X_, c.inter)) {
        throw Error("internal", "condensed components disagree with node-level metrics");
      }
    }
  }

  const FsuCollection& coll_;
  double alpha_;
  GreedyOptions opts_;
  int n_ = 0;
  Matrix C_;
  Matrix sym_;
  std::vector<double> sigma_;
  std::vector<int> block_of_;
  std::vector<int> members_;
  std::vector<double> size_;
  Matrix to_block_;  // to_block_(i, b): sum over j in b, j != i, of C(i,j) + C(j,i)
  std::vector<double> coupled_;  // same sum over all assigned j != i
  double I_ = 0.0, X_ = 0.0, S_ = 0.0;
  int assigned_ = 0;
};

// One refinement pass: the best strictly improving relocation, if any.
bool refine_pass(RatioState& st, int iteration) {
  double best = 0.0;
  int best_fsu = -1, best_block = -1;
  const double tol_scale = std::max(1.0, std::abs(st.index()));
  const int empty = st.first_empty();
  for (int i = 0; i < st.n(); ++i) {
    const int a = st.block_of(i);
    if (a < 0) continue;
    for (int b = 0; b < st.n(); ++b) {
      if (b == a) continue;
      if (st.empty(b) && b != empty) continue;
      const double gain = st.move_gain(i, b);
      if (gain > best + 1e-12 * tol_scale) {
        best = gain;
        best_fsu = i;
        best_block = b;
      }
    }
  }
  if (best_fsu < 0) return false;
  const int from = st.block_of(best_fsu);
  st.move(best_fsu, best_block);
  st.record(iteration, "relocate", best_fsu, from, best_block, best);
  return true;
}

void refine_all(RatioState& st, int iteration) {
  while (refine_pass(st, iteration)) {
  }
}

Partition run_greedy(const FsuCollection& coll, const IndexConfig& cfg, const GreedyOptions& opts,
                     bool refine_each_step) {
  RatioState st(coll, cfg, opts);
  const int n = st.n();
  for (int iteration = 0; iteration < n; ++iteration) {
    double best = -std::numeric_limits<double>::infinity();
    int best_fsu = -1, best_block = -1;
    const int empty = st.first_empty();
    for (int i = 0; i < n; ++i) {
      if (st.block_of(i) >= 0) continue;
      for (int b = 0; b < n; ++b) {
        if (st.empty(b) && b != empty) continue;
        const double gain = st.assign_gain(i, b);
        if (st.better(gain, best)) {
          best = gain;
          best_fsu = i;
          best_block = b;
        }
      }
    }
    st.assign(best_fsu, best_block);
    st.record(iteration, "assign", best_fsu, -1, best_block, best);
    if (refine_each_step) refine_all(st, iteration);
  }
  return st.result();
}

}  // namespace

Partition greedy_partition(const FsuCollection& coll, const IndexConfig& cfg,
                           const GreedyOptions& opts) {
  return run_greedy(coll, cfg, opts, false);
}

Partition greedy_refined(const FsuCollection& coll, const IndexConfig& cfg,
                         const GreedyOptions& opts) {
  return run_greedy(coll, cfg, opts, true);
}

Partition refine_partition(const Partition& p, const IndexConfig& cfg, const GreedyOptions& opts) {
  const auto& coll = p.source();
  RatioState st(coll, cfg, opts);
  // Blocks keep their canonical index as slot.
  for (std::size_t b = 0; b < p.size(); ++b) {
    for (int f : p.blocks()[b]) st.assign(f, static_cast<int>(b));
  }
  refine_all(st, 0);
  return st.result();
}

}  // namespace fsupart
