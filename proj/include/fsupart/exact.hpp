#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fsupart/greedy.hpp"
#include "fsupart/metrics.hpp"

namespace fsupart {

// Quadratic index is minimized, ratio index maximized.
enum class Objective { Quadratic, Ratio };

inline constexpr int kBruteForceLimit = 12;

struct BnbProgress {
  double seconds = 0.0;
  std::uint64_t nodes = 0;
  double incumbent = 0.0;
};

struct ExactResult {
  ExactResult(Partition p, double v) : partition(std::move(p)), value(v) {}

  Partition partition;
  // Objective value of `partition`, evaluated with index_quadratic or
  // index_ratio.
  double value = 0.0;
  // Best proven bound on the optimum (lower for quadratic, upper for ratio).
  double bound = 0.0;
  // |value - bound| / max(1, |value|); zero when proven optimal.
  double gap = 0.0;
  bool optimal = false;
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
  double seconds = 0.0;
  std::vector<BnbProgress> progress;  // one entry per incumbent improvement
  std::uint64_t bound_violations = 0;  // only with BnbOptions::witness
};

// Exhaustive enumeration of restricted growth strings. Ties go to the
// lexicographically smallest string. Throws above kBruteForceLimit FSUs.
ExactResult brute_force_partition(const FsuCollection& coll, const IndexConfig& cfg,
                                  Objective objective = Objective::Quadratic);

struct BnbOptions {
  Objective objective = Objective::Quadratic;
  double time_limit = 60.0;  // seconds; <= 0 means no limit
  double gap_tol = 0.0;      // relative
  bool prune = true;         // false visits every leaf (testing aid)
  // Tie tolerance on objective values; equal-valued partitions are resolved
  // to the smallest restricted growth string.
  double tie_tol = 1e-9;
  // Labels of a known optimum. Every visited node on its path is checked for
  // bound <= witness value, violations counted in the result.
  std::optional<std::vector<int>> witness;
};

// Depth-first search over set partitions: FSUs in descending total coupling
// join an existing block or open one new block. The incumbent starts from
// the best of greedy_refined, all singletons and the single block.
ExactResult branch_and_bound(const FsuCollection& coll, const IndexConfig& cfg,
                             const BnbOptions& opts = {});

// Smallest alpha at which every merge has positive quadratic cost, so that
// all singletons is the unique optimum: 2 * (off-diagonal condensed mass +
// largest diagonal entry) + 1.
double alpha_big(const FsuCollection& coll);

// Pairwise form of the quadratic index: value = constant + sum over pairs
// i < j in the same block of pair(i, j).
struct QuadraticForm {
  double constant = 0.0;
  Matrix pair;
};
QuadraticForm quadratic_form(const FsuCollection& coll, double alpha);

enum class Engine { Greedy, Refined, Exact, Brute };

struct SweepEntry {
  double kappa = 0.0;
  double alpha = 0.0;
  Partition partition;
  double value = 0.0;
  bool optimal = false;
  int distinct_id = 0;  // index into SweepResult::distinct
};

struct SweepResult {
  std::vector<SweepEntry> runs;      // one per distinct kappa, in input order
  std::vector<Partition> distinct;   // first appearance order
};

SweepResult alpha_sweep(const FsuCollection& coll, const std::vector<double>& kappas, Engine engine,
                        const BnbOptions& opts = {});

}  // namespace fsupart
