#include "fsupart/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fsupart/error.hpp"

namespace fsupart {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Relabels blocks by first occurrence so equal partitions compare equal.
std::vector<int> canonical_labels(const std::vector<int>& labels) {
  std::vector<int> map(labels.size(), -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (map[labels[i]] < 0) map[labels[i]] = next++;
    out[i] = map[labels[i]];
  }
  return out;
}

std::vector<int> labels_of(const Partition& p) { return canonical_labels(p.block_of()); }

double size_weight(const FsuCollection& coll, const IndexConfig& cfg, int i) {
  return cfg.size_measure == SizeMeasure::Fsus ? 1.0 : coll.node_count(i);
}

double report_value(const Partition& p, const IndexConfig& cfg, Objective objective) {
  return objective == Objective::Quadratic ? index_quadratic(p, cfg) : index_ratio(p, cfg);
}

bool tie_or_better(double v, double best, double tol) {
  return v <= best + tol * std::max(1.0, std::abs(best));
}
bool strictly_better(double v, double best, double tol) {
  return v < best - tol * std::max(1.0, std::abs(best));
}

// Block-by-block evaluation used by the brute-force oracle. Returns the
// value to minimize (the ratio index is negated).
class BlockEvaluator {
 public:
  BlockEvaluator(const FsuCollection& coll, const IndexConfig& cfg, Objective objective)
      : objective_(objective), alpha_(cfg.alpha) {
    C_ = coll.condensed().cwiseAbs();
    n_ = static_cast<int>(C_.rows());
    for (int i = 0; i < n_; ++i) sigma_.push_back(size_weight(coll, cfg, i));
  }

  double operator()(const std::vector<int>& labels, int blocks) const {
    double inter = 0.0, intra = 0.0, size = 0.0, ratio_intra = 0.0;
    for (int m = 0; m < blocks; ++m) {
      double count = 0.0, weighted = 0.0;
      for (int i = 0; i < n_; ++i) {
        if (labels[i] != m) continue;
        count += 1.0;
        weighted += sigma_[i];
        for (int j = 0; j < n_; ++j) {
          if (labels[j] == m) {
            intra += C_(i, i) + C_(i, j) + C_(j, i) + C_(j, j);
            ratio_intra += C_(i, j);
          } else {
            inter += C_(i, j) + C_(j, i);
          }
        }
      }
      size += objective_ == Objective::Quadratic ? count * count : weighted * weighted;
    }
    if (objective_ == Objective::Quadratic) return inter - intra + alpha_ * size;
    return -(ratio_intra / (1.0 + inter) + alpha_ / (1.0 + size));
  }

 private:
  Objective objective_;
  double alpha_;
  Matrix C_;
  int n_ = 0;
  std::vector<double> sigma_;
};

// Search state for the quadratic objective in pairwise form.
class QuadraticModel {
 public:
  QuadraticModel(const FsuCollection& coll, const IndexConfig& cfg, const std::vector<int>& order)
      : order_(order) {
    const auto form = quadratic_form(coll, cfg.alpha);
    q_ = form.pair;
    n_ = static_cast<int>(q_.rows());
    committed_ = form.constant;
    block_sum_ = Matrix::Zero(n_, n_);
    sizes_.assign(n_, 0);
    neg_suffix_.assign(n_ + 1, 0.0);
    for (int a = n_ - 1; a >= 0; --a) {
      double s = 0.0;
      for (int b = a + 1; b < n_; ++b) s += std::min(0.0, q_(order_[a], order_[b]));
      neg_suffix_[a] = neg_suffix_[a + 1] + s;
    }
    constant_ = form.constant;
  }

  int blocks() const { return blocks_; }
  double value() const { return committed_; }

  void push(int i, int b) {
    if (b == blocks_) ++blocks_;
    committed_ += block_sum_(i, b);
    ++sizes_[b];
    for (int j = 0; j < n_; ++j) block_sum_(j, b) += q_(j, i);
  }

  void pop(int i, int b) {
    for (int j = 0; j < n_; ++j) block_sum_(j, b) -= q_(j, i);
    committed_ -= block_sum_(i, b);
    if (--sizes_[b] == 0) --blocks_;
  }

  // Lower bound over completions with positions >= k unassigned.
  double bound(int k) const {
    double lb = committed_ + neg_suffix_[k];
    for (int pos = k; pos < n_; ++pos) {
      const int i = order_[pos];
      double best = 0.0;
      for (int b = 0; b < blocks_; ++b) best = std::min(best, block_sum_(i, b));
      lb += best;
    }
    return lb;
  }

  double evaluate(const std::vector<int>& labels) const {
    double v = constant_;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (labels[i] == labels[j]) v += q_(i, j);
    return v;
  }

 private:
  std::vector<int> order_;
  Matrix q_;
  int n_ = 0;
  double constant_ = 0.0;
  double committed_ = 0.0;
  Matrix block_sum_;  // block_sum_(i, b): sum over j in b of q(i, j)
  std::vector<int> sizes_;
  std::vector<double> neg_suffix_;
  int blocks_ = 0;
};

// Search state for the ratio objective, stored negated so that both models
// are minimized.
class RatioModel {
 public:
  RatioModel(const FsuCollection& coll, const IndexConfig& cfg, const std::vector<int>& order)
      : order_(order), alpha_(cfg.alpha) {
    C_ = coll.condensed().cwiseAbs();
    sym_ = C_ + C_.transpose();
    n_ = static_cast<int>(C_.rows());
    for (int i = 0; i < n_; ++i) sigma_.push_back(size_weight(coll, cfg, i));
    to_block_ = Matrix::Zero(n_, n_);
    coupled_.assign(n_, 0.0);
    size_.assign(n_, 0.0);
    count_.assign(n_, 0);
    // Intra mass still obtainable and the least size growth once positions
    // >= k are free.
    reach_.assign(n_ + 1, 0.0);
    sq_.assign(n_ + 1, 0.0);
    for (int k = n_ - 1; k >= 0; --k) {
      const int i = order_[k];
      double r = C_(i, i);
      for (int a = 0; a < k; ++a) r += sym_(i, order_[a]);
      reach_[k] = reach_[k + 1] + r;
      sq_[k] = sq_[k + 1] + sigma_[i] * sigma_[i];
    }
  }

  int blocks() const { return blocks_; }
  double value() const { return -(I_ / (1.0 + X_) + alpha_ / (1.0 + S_)); }

  void push(int i, int b) {
    if (b == blocks_) ++blocks_;
    I_ += C_(i, i) + to_block_(i, b);
    X_ += 2.0 * (coupled_[i] - to_block_(i, b));
    S_ += 2.0 * size_[b] * sigma_[i] + sigma_[i] * sigma_[i];
    size_[b] += sigma_[i];
    ++count_[b];
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      to_block_(j, b) += sym_(i, j);
      coupled_[j] += sym_(i, j);
    }
  }

  void pop(int i, int b) {
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      to_block_(j, b) -= sym_(i, j);
      coupled_[j] -= sym_(i, j);
    }
    size_[b] -= sigma_[i];
    S_ -= 2.0 * size_[b] * sigma_[i] + sigma_[i] * sigma_[i];
    X_ -= 2.0 * (coupled_[i] - to_block_(i, b));
    I_ -= C_(i, i) + to_block_(i, b);
    if (--count_[b] == 0) --blocks_;
  }

  double bound(int k) const {
    return -((I_ + reach_[k]) / (1.0 + X_) + alpha_ / (1.0 + S_ + sq_[k]));
  }

  double evaluate(const std::vector<int>& labels) const {
    double I = 0.0, X = 0.0, S = 0.0;
    std::vector<double> sizes(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      sizes[labels[i]] += sigma_[i];
      for (int j = 0; j < n_; ++j) {
        if (labels[i] == labels[j]) {
          I += C_(i, j);
        } else {
          X += 2.0 * C_(i, j);
        }
      }
    }
    for (double s : sizes) S += s * s;
    return -(I / (1.0 + X) + alpha_ / (1.0 + S));
  }

 private:
  std::vector<int> order_;
  double alpha_;
  Matrix C_, sym_;
  int n_ = 0;
  std::vector<double> sigma_;
  Matrix to_block_;
  std::vector<double> coupled_;
  std::vector<double> size_;
  std::vector<int> count_;
  std::vector<double> reach_, sq_;
  double I_ = 0.0, X_ = 0.0, S_ = 0.0;
  int blocks_ = 0;
};

template <class Model>
class Search {
 public:
  Search(Model& model, std::vector<int> order, const BnbOptions& opts, Clock::time_point start)
      : model_(model), order_(std::move(order)), opts_(opts), start_(start) {
    n_ = static_cast<int>(order_.size());
    labels_.assign(n_, -1);
  }

  void set_witness(const std::vector<int>& labels, double value) {
    witness_ = labels;
    witness_value_ = value;
  }

  void offer(const std::vector<int>& labels, double v) {
    auto canon = canonical_labels(labels);
    const bool improved = best_labels_.empty() || strictly_better(v, best_, opts_.tie_tol);
    const bool tie = !improved && tie_or_better(v, best_, opts_.tie_tol) && canon < best_labels_;
    if (!improved && !tie) return;
    best_ = improved ? v : std::min(best_, v);
    best_labels_ = std::move(canon);
    if (improved) progress_.push_back({seconds_since(start_), nodes_, best_});
  }

  // Returns the smallest bound among subtrees left unexplored.
  double run(int k) {
    ++nodes_;
    if (((nodes_ & 1023) == 0 || nodes_ == 1) && opts_.time_limit > 0 && seconds_since(start_) > opts_.time_limit) {
      timed_out_ = true;
    }
    if (k == n_) {
      ++leaves_;
      offer(labels_, model_.value());
      return kInf;
    }
    const int i = order_[k];
    struct Child {
      double bound;
      int block;
    };
    std::vector<Child> children;
    const int open = model_.blocks();
    for (int b = 0; b <= open; ++b) {
      model_.push(i, b);
      children.push_back({model_.bound(k + 1), b});
      model_.pop(i, b);
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.bound < b.bound; });

    double unexplored = kInf;
    for (const auto& c : children) {
      if (!witness_.empty()) {
        labels_[i] = c.block;
        if (on_witness_path(k + 1) &&
            c.bound > witness_value_ + opts_.tie_tol * std::max(1.0, std::abs(witness_value_))) {
          ++violations_;
        }
        labels_[i] = -1;
      }
      if (timed_out_) {
        unexplored = std::min(unexplored, c.bound);
        continue;
      }
      if (opts_.prune && !best_labels_.empty()) {
        const double scale = std::max(1.0, std::abs(best_));
        if (c.bound > best_ + opts_.tie_tol * scale) continue;
        if (opts_.gap_tol > 0 && c.bound >= best_ - opts_.gap_tol * scale) {
          discarded_ = std::min(discarded_, c.bound);
          continue;
        }
      }
      model_.push(i, c.block);
      labels_[i] = c.block;
      unexplored = std::min(unexplored, run(k + 1));
      labels_[i] = -1;
      model_.pop(i, c.block);
    }
    return unexplored;
  }

  double best() const { return best_; }
  std::uint64_t violations() const { return violations_; }
  const std::vector<int>& best_labels() const { return best_labels_; }
  double discarded() const { return discarded_; }
  bool timed_out() const { return timed_out_; }
  std::uint64_t nodes() const { return nodes_; }
  std::uint64_t leaves() const { return leaves_; }
  std::vector<BnbProgress>& progress() { return progress_; }

 private:
  Model& model_;
  std::vector<int> order_;
  BnbOptions opts_;
  Clock::time_point start_;
  int n_ = 0;
  std::vector<int> labels_;
  double best_ = kInf;
  std::vector<int> best_labels_;
  double discarded_ = kInf;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;
  std::uint64_t leaves_ = 0;
  std::vector<BnbProgress> progress_;
  std::vector<int> witness_;
  double witness_value_ = 0.0;
  std::uint64_t violations_ = 0;

  // Whether the first k assigned FSUs (in search order) group exactly as in
  // the witness.
  bool on_witness_path(int k) const {
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        const int x = order_[a], y = order_[b];
        if ((labels_[x] == labels_[y]) != (witness_[x] == witness_[y])) return false;
      }
    }
    return true;
  }
};

template <class Model>
ExactResult solve(const FsuCollection& coll, const IndexConfig& cfg, const BnbOptions& opts) {
  const auto start = Clock::now();
  const int n = static_cast<int>(coll.size());
  const Matrix C = coll.condensed().cwiseAbs();
  const Matrix sym = C + C.transpose();
  std::vector<double> coupling(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) coupling[i] += sym(i, j);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return coupling[a] > coupling[b]; });

  Model model(coll, cfg, order);
  Search<Model> search(model, order, opts, start);
  if (opts.witness) {
    if (opts.witness->size() != static_cast<std::size_t>(n)) {
      throw Error("dimension_mismatch", "witness labels have wrong length");
    }
    search.set_witness(*opts.witness, model.evaluate(*opts.witness));
  }
  if (opts.prune) {
    for (const auto& p : {greedy_refined(coll, cfg), singleton_partition(coll),
                          single_block_partition(coll)}) {
      const auto labels = labels_of(p);
      search.offer(labels, model.evaluate(labels));
    }
  }
  const double unexplored = search.run(0);

  const auto& labels = search.best_labels();
  Partition best = partition_from_labels(coll, labels);
  const double lower = std::min({search.best(), unexplored, search.discarded()});
  const double sign = opts.objective == Objective::Quadratic ? 1.0 : -1.0;
  const double gap = (search.best() - lower) / std::max(1.0, std::abs(search.best()));

  ExactResult out(best, report_value(best, cfg, opts.objective));
  out.bound = sign * lower;
  out.gap = std::max(0.0, gap);
  out.optimal = !search.timed_out() && search.discarded() == kInf;
  if (out.optimal) {
    out.gap = 0.0;
    out.bound = out.value;
  }
  out.bound_violations = search.violations();
  out.nodes = search.nodes();
  out.leaves = search.leaves();
  out.seconds = seconds_since(start);
  out.progress = std::move(search.progress());
  for (auto& p : out.progress) p.incumbent *= sign;
  return out;
}

}  // namespace

QuadraticForm quadratic_form(const FsuCollection& coll, double alpha) {
  const Matrix C = coll.condensed().cwiseAbs();
  const long n = C.rows();
  const Vector d = C.diagonal();
  const double off = C.sum() - d.sum();
  QuadraticForm f;
  f.constant = 2.0 * off - 4.0 * d.sum() + alpha * static_cast<double>(n);
  f.pair = Matrix::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      f.pair(i, j) = 2.0 * alpha - 2.0 * d(i) - 2.0 * d(j) - 4.0 * (C(i, j) + C(j, i));
    }
  }
  return f;
}

double alpha_big(const FsuCollection& coll) {
  const Matrix C = coll.condensed().cwiseAbs();
  const double off = C.sum() - C.diagonal().sum();
  const double dmax = C.rows() > 0 ? C.diagonal().maxCoeff() : 0.0;
  return 2.0 * (off + dmax) + 1.0;
}

ExactResult brute_force_partition(const FsuCollection& coll, const IndexConfig& cfg,
                                  Objective objective) {
  cfg.validate();
  const auto start = Clock::now();
  const int n = static_cast<int>(coll.size());
  if (n > kBruteForceLimit) {
    throw Error("too_many_fsus", std::to_string(n) + " FSUs exceed the brute-force limit of " +
                                     std::to_string(kBruteForceLimit) +
                                     "; use the branch-and-bound engine instead",
                {n});
  }
  BlockEvaluator eval(coll, cfg, objective);
  std::vector<int> a(n, 0), prefix_max(n, 0);
  std::vector<int> best;
  double best_v = kInf;
  std::uint64_t leaves = 0;
  while (true) {
    ++leaves;
    const int blocks = n == 0 ? 0 : prefix_max[n - 1] + 1;
    const double v = eval(a, blocks);
    if (best.empty() || strictly_better(v, best_v, 1e-9)) {
      best = a;
      best_v = v;
    }
    // Next restricted growth string in lexicographic order.
    int i = n - 1;
    while (i > 0 && a[i] > prefix_max[i - 1]) --i;
    if (i <= 0) break;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }
  Partition p = partition_from_labels(coll, best);
  ExactResult out(p, report_value(p, cfg, objective));
  out.bound = out.value;
  out.optimal = true;
  out.nodes = leaves;
  out.leaves = leaves;
  out.seconds = seconds_since(start);
  return out;
}

ExactResult branch_and_bound(const FsuCollection& coll, const IndexConfig& cfg,
                             const BnbOptions& opts) {
  cfg.validate();
  if (opts.gap_tol < 0) throw Error("invalid_argument", "gap tolerance must be non-negative");
  if (opts.objective == Objective::Quadratic) return solve<QuadraticModel>(coll, cfg, opts);
  return solve<RatioModel>(coll, cfg, opts);
}

SweepResult alpha_sweep(const FsuCollection& coll, const std::vector<double>& kappas, Engine engine,
                        const BnbOptions& opts) {
  SweepResult out;
  std::vector<double> seen;
  for (double kappa : kappas) {
    if (std::find(seen.begin(), seen.end(), kappa) != seen.end()) continue;
    seen.push_back(kappa);
    const auto cfg = IndexConfig::from_kappa(kappa, coll);
    std::optional<Partition> part;
    double value = 0.0;
    bool optimal = false;
    switch (engine) {
      case Engine::Greedy:
        part = greedy_partition(coll, cfg);
        value = index_ratio(*part, cfg);
        break;
      case Engine::Refined:
        part = greedy_refined(coll, cfg);
        value = index_ratio(*part, cfg);
        break;
      case Engine::Exact: {
        BnbOptions o = opts;
        o.objective = Objective::Quadratic;
        auto r = branch_and_bound(coll, cfg, o);
        part = r.partition;
        value = r.value;
        optimal = r.optimal;
        break;
      }
      case Engine::Brute: {
        auto r = brute_force_partition(coll, cfg, Objective::Quadratic);
        part = r.partition;
        value = r.value;
        optimal = true;
        break;
      }
    }
    int id = -1;
    for (std::size_t k = 0; k < out.distinct.size(); ++k) {
      if (out.distinct[k] == *part) id = static_cast<int>(k);
    }
    if (id < 0) {
      id = static_cast<int>(out.distinct.size());
      out.distinct.push_back(*part);
    }
    out.runs.push_back(SweepEntry{kappa, cfg.alpha, *part, value, optimal, id});
  }
  return out;
}

}  // namespace fsupart
