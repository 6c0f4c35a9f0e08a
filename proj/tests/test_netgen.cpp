#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "fsupart/netgen.hpp"

using namespace fsupart;
using namespace fsupart::testing;

TEST(Rng, MatchesReferenceSequence) {
  Rng rng(5489);
  EXPECT_EQ(rng.next(), 14514284786278117030ULL);
  Rng a(1), b(1);
  EXPECT_DOUBLE_EQ(a.uniform(), static_cast<double>(b.next() >> 11) / 9007199254740992.0);
  Rng c(3);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(c.below(7), 7u);
}

TEST(Modular, SizesAndWeights) {
  for (int levels = 1; levels <= 3; ++levels) {
    ModularSpec s;
    s.levels = levels;
    auto m = gen_modular(s);
    const long n = 1L << (2 * levels);
    EXPECT_EQ(m.A.rows(), n);
    EXPECT_TRUE(m.A.isApprox(m.A.transpose()));
    auto g = build_linear_graph(m);
    EXPECT_EQ(static_cast<long>(g.state_state_edges().size()), modular_edge_count(s));
    EXPECT_NEAR(g.total_mass(), modular_mass(s), 1e-9);
    for (long i = 0; i < n; ++i) EXPECT_EQ(m.A(i, i), 0.5);
  }
}

TEST(Modular, LevelOneIsStrongClique) {
  ModularSpec s;
  s.levels = 1;
  auto m = gen_modular(s);
  Matrix expected = Matrix::Constant(4, 4, 0.1);
  expected.diagonal().setConstant(0.5);
  EXPECT_EQ(m.A, expected);
}

TEST(Modular, CornerLinks) {
  ModularSpec s;
  s.levels = 2;
  auto m = gen_modular(s);
  // level-2 ring 0-1-3-2-0 between groups of four
  EXPECT_EQ(m.A(1, 4), 0.01);   // group 0 corner facing 1, group 1 corner facing 0
  EXPECT_EQ(m.A(7, 13), 0.01);  // group 1 corner facing 3, group 3 corner facing 1
  EXPECT_EQ(m.A(15, 14), 0.1);  // same group, strong link
  EXPECT_EQ(m.A(0, 15), 0.0);
  int weak = 0;
  for (long i = 0; i < 16; ++i)
    for (long j = 0; j < 16; ++j)
      if (m.A(i, j) == 0.01) ++weak;
  EXPECT_EQ(weak, 8);
}

TEST(Modular, LevelScale) {
  ModularSpec s;
  s.levels = 3;
  s.level_scale = 0.5;
  auto g = build_linear_graph(gen_modular(s));
  EXPECT_NEAR(g.total_mass(), modular_mass(s), 1e-9);
}

TEST(RandomFsu, DeterministicAndConnected) {
  RandomFsuSpec s;
  s.n_fsus = 50;
  s.edge_density = 0.02;
  s.seed = 99;
  auto a = std::get<LinearModel>(gen_random_fsu(s));
  auto b = std::get<LinearModel>(gen_random_fsu(s));
  EXPECT_EQ(a.A, b.A);
  s.seed = 100;
  EXPECT_NE(std::get<LinearModel>(gen_random_fsu(s)).A, a.A);
  // undirected connectivity through couplings
  std::vector<int> seen(50, 0), stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u = 0; u < 50; ++u) {
      if (!seen[u] && (a.A(u, v) != 0 || a.A(v, u) != 0)) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  EXPECT_EQ(std::count(seen.begin(), seen.end(), 1), 50);
}

TEST(RandomFsu, FullDensity) {
  RandomFsuSpec s;
  s.n_fsus = 6;
  s.edge_density = 1.0;
  auto a = std::get<LinearModel>(gen_random_fsu(s));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_NE(a.A(i, j), 0.0);
}

TEST(RandomFsu, PwaModes) {
  RandomFsuSpec s;
  s.n_fsus = 5;
  s.pwa = true;
  auto m = std::get<PwaModel>(gen_random_fsu(s));
  ASSERT_EQ(m.modes.size(), 2u);
  EXPECT_EQ(m.modes[0].A(0, 0), 0.5);
  EXPECT_EQ(m.modes[1].A(0, 0), -0.5);
  EXPECT_EQ(count_distinct_topologies(m), 1u);
}

TEST(Generic, FsuCountBoundedByInputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenericSpec s;
    s.seed = seed;
    auto c = select_fsus(build_linear_graph(gen_generic(s)));
    EXPECT_LE(c.size(), 20u);
    EXPECT_TRUE(c.complete());
  }
}

TEST(Generic, PlantedClustersRecovered) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenericSpec s;
    s.n = 40;
    s.p = 5;
    s.planted = true;
    s.seed = seed;
    auto c = select_fsus(build_linear_graph(gen_generic(s)));
    ASSERT_EQ(c.size(), 5u);
    auto plant = planted_clusters(s);
    for (int j = 0; j < s.n; ++j) EXPECT_EQ(c.owner(c.graph().state_vertex(j)), plant[j]);
  }
}

TEST(Generic, DiagonalSystemGivesSingletons) {
  LinearModel m{Matrix::Identity(5, 5) * 0.3, Matrix::Identity(5, 5)};
  EXPECT_EQ(select_fsus(build_linear_graph(m)).size(), 5u);
}
