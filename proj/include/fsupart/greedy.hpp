#pragma once

#include <string>
#include <vector>

#include "fsupart/metrics.hpp"

namespace fsupart {

// One committed move of the greedy or refinement loop.
struct GreedyStep {
  int iteration = 0;
  std::string kind;  // "assign" or "relocate"
  int fsu = -1;
  int from_block = -1;  // -1 for assignments
  int to_block = -1;    // internal sub-list slot
  double gain = 0.0;
  double index = 0.0;   // ratio index after the move
};

struct GreedyOptions {
  // Recompute all three components from scratch after every move and throw
  // if the incremental values drift. On by default in debug builds.
#ifdef NDEBUG
  bool cross_check = false;
#else
  bool cross_check = true;
#endif
  // Relative tolerance used to decide ties and strict improvements.
  double tie_tol = 1e-12;
  std::vector<GreedyStep>* trace = nullptr;
};

// Sequential assignment maximizing the immediate gain of the ratio index.
Partition greedy_partition(const FsuCollection& coll, const IndexConfig& cfg,
                           const GreedyOptions& opts = {});
// Single-FSU relocations, best strict improvement first, until none is left.
Partition refine_partition(const Partition& p, const IndexConfig& cfg,
                           const GreedyOptions& opts = {});
// Greedy with the refinement scan run after each assignment.
Partition greedy_refined(const FsuCollection& coll, const IndexConfig& cfg,
                         const GreedyOptions& opts = {});

}  // namespace fsupart
