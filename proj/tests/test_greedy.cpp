#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "fsupart/exact.hpp"
#include "fsupart/greedy.hpp"

using namespace fsupart;
using namespace fsupart::testing;

namespace {

GreedyOptions checked() {
  GreedyOptions o;
  o.cross_check = true;
  return o;
}

}  // namespace

TEST(Greedy, Sys2Regimes) {
  auto c = sys2_fsus();
  EXPECT_EQ(greedy_partition(c, IndexConfig::from_alpha(10.0), checked()), singleton_partition(c));
  EXPECT_EQ(greedy_partition(c, IndexConfig::from_alpha(1.0), checked()), single_block_partition(c));
}

TEST(Greedy, TraceRecordsEveryAssignment) {
  auto c = random_fsus(3, 8);
  std::vector<GreedyStep> trace;
  GreedyOptions o = checked();
  o.trace = &trace;
  auto p = greedy_partition(c, IndexConfig::from_alpha(2.0), o);
  ASSERT_EQ(trace.size(), 8u);
  EXPECT_NEAR(trace.back().index, index_ratio(p, IndexConfig::from_alpha(2.0)), 1e-9);
  for (const auto& s : trace) EXPECT_EQ(s.kind, "assign");
}

TEST(Greedy, Deterministic) {
  auto c = random_fsus(5, 12);
  auto cfg = IndexConfig::from_alpha(3.0);
  EXPECT_EQ(greedy_partition(c, cfg), greedy_partition(c, cfg));
  EXPECT_EQ(greedy_refined(c, cfg), greedy_refined(c, cfg));
}

TEST(Refine, FixedPointUnchanged) {
  auto c = sys2_fsus();
  auto cfg = IndexConfig::from_alpha(1.0);
  auto p = single_block_partition(c);
  EXPECT_EQ(refine_partition(p, cfg, checked()), p);
}

TEST(Refine, RepairsGreedyMisplacement) {
  // Four FSUs where greedy opens blocks too eagerly.
  auto c = random_fsus(2, 4, 0.5);
  auto cfg = IndexConfig::from_alpha(10.0);
  auto g = greedy_partition(c, cfg);
  auto r = refine_partition(g, cfg, checked());
  auto best = brute_force_partition(c, cfg, Objective::Ratio);
  EXPECT_GT(index_ratio(r, cfg), index_ratio(g, cfg) + 1e-6);
  EXPECT_NEAR(index_ratio(r, cfg), best.value, 1e-9);
}

TEST(Refine, NeverDecreasesIndex) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto c = random_fsus(1000 + seed, 10);
    const auto cfg = IndexConfig::from_alpha(0.5 + static_cast<double>(seed % 7) * 2.0);
    auto g = greedy_partition(c, cfg);
    std::vector<GreedyStep> trace;
    GreedyOptions o;
    o.trace = &trace;
    auto r = refine_partition(g, cfg, o);
    EXPECT_GE(index_ratio(r, cfg), index_ratio(g, cfg) - 1e-12);
    double last = index_ratio(g, cfg);
    for (const auto& s : trace) {
      EXPECT_GT(s.index, last);
      last = s.index;
    }
  }
}

TEST(Refined, UsuallyReachesOracleOnSmallInstances) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    auto c = random_fsus(2000 + seed, n);
    const auto cfg = IndexConfig::from_alpha(1.0 + static_cast<double>(seed % 4) * 3.0);
    auto best = brute_force_partition(c, cfg, Objective::Ratio);
    const double v = index_ratio(greedy_refined(c, cfg, checked()), cfg);
    EXPECT_LE(v, best.value + 1e-9);
    if (v >= best.value - 1e-9) ++hits;
  }
  EXPECT_GE(hits, 27);
}

TEST(Refined, SingleMovesCanStall) {
  // {3, 5} would have to move together to reach the single block.
  auto c = random_fsus(2007, 6);
  auto cfg = IndexConfig::from_alpha(10.0);
  auto r = greedy_refined(c, cfg);
  EXPECT_EQ(r.blocks(), (Blocks{{0, 1, 2, 4}, {3, 5}}));
  EXPECT_EQ(brute_force_partition(c, cfg, Objective::Ratio).partition, single_block_partition(c));
}

TEST(Refined, LargeAlphaMatchesGreedy) {
  auto c = random_fsus(77, 9);
  auto cfg = IndexConfig::from_alpha(1e6);
  auto g = greedy_partition(c, cfg);
  EXPECT_EQ(g, singleton_partition(c));
  EXPECT_EQ(greedy_refined(c, cfg), g);
}

TEST(Refined, ModularSixteenMidAlpha) {
  auto c = modular_fsus(2);
  auto p = greedy_refined(c, IndexConfig::from_alpha(10.0), checked());
  EXPECT_EQ(p.block_sizes(), (std::vector<int>{4, 4, 4, 4}));
  for (const auto& b : p.blocks()) EXPECT_EQ(b.back() - b.front(), 3);
}

TEST(Greedy, NodeSizeMeasureRuns) {
  auto c = random_fsus(8, 6);
  IndexConfig cfg = IndexConfig::from_alpha(2.0);
  cfg.size_measure = SizeMeasure::Nodes;
  auto p = greedy_refined(c, cfg, checked());
  auto best = brute_force_partition(c, cfg, Objective::Ratio);
  EXPECT_LE(index_ratio(p, cfg), best.value + 1e-9);
}
