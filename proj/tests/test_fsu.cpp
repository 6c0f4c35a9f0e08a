#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "fsupart/error.hpp"
#include "fsupart/fsu.hpp"

using namespace fsupart;
using fsupart::testing::sys2_graph;

namespace {

std::shared_ptr<const EquivalentGraph> share(EquivalentGraph g) {
  return std::make_shared<const EquivalentGraph>(std::move(g));
}

std::shared_ptr<const EquivalentGraph> linear(const Matrix& A, const Matrix& B) {
  return share(build_linear_graph(LinearModel{A, B}));
}

void expect_valid(const FsuCollection& c) {
  const auto& g = c.graph();
  ASSERT_TRUE(c.complete());
  EXPECT_LE(static_cast<int>(c.size()), g.num_inputs());
  std::vector<int> seen(g.num_vertices(), 0);
  for (const auto& f : c.fsus()) {
    EXPECT_FALSE(f.input_nodes.empty());
    EXPECT_FALSE(f.state_nodes.empty());
    for (auto v : f.nodes()) ++seen[v];
    EXPECT_TRUE(is_csu(c.subgraph(f.id)));
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_NEAR(c.condensed().sum(), g.total_mass(), 1e-12);
}

}  // namespace

TEST(Roots, Sys2) {
  auto c = select_roots(share(sys2_graph()));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].nodes(), (std::vector<VertexId>{0, 2}));
  EXPECT_EQ(c[1].nodes(), (std::vector<VertexId>{1, 3}));
  EXPECT_TRUE(c.unassigned().empty());
}

TEST(Roots, SharedRowMerges) {
  Matrix B = Matrix::Zero(2, 2);
  B(0, 0) = 1;
  B(0, 1) = 1;
  Matrix A = Matrix::Zero(2, 2);
  A(1, 0) = 0.3;
  auto c = select_roots(linear(A, B));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].nodes(), (std::vector<VertexId>{0, 1, 2}));
  EXPECT_EQ(c.unassigned(), std::vector<VertexId>{3});
}

TEST(Roots, DiagonalActuation) {
  auto c = select_roots(linear(Matrix::Zero(3, 3), Matrix::Identity(3, 3)));
  EXPECT_EQ(c.size(), 3u);
  EXPECT_TRUE(c.unassigned().empty());
}

TEST(Roots, InputWithoutEdgesRejected) {
  Matrix B = Matrix::Zero(2, 2);
  B(0, 0) = 1;
  try {
    select_roots(linear(Matrix::Identity(2, 2), B));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "input_without_edges");
    EXPECT_EQ(e.indices(), std::vector<long>{1});
  }
}

TEST(Forward, Chain) {
  Matrix A = Matrix::Zero(3, 3);
  A(1, 0) = 0.4;
  A(2, 1) = 0.4;
  Matrix B = Matrix::Zero(3, 1);
  B(0, 0) = 1;
  auto c = forward_assign(select_roots(linear(A, B)));
  EXPECT_TRUE(c.complete());
  EXPECT_EQ(c.owner(2), 0);
  EXPECT_EQ(c.owner(3), 0);
}

TEST(Forward, LargestMagnitudeWins) {
  // x3 fed by x1 (0.2) and x2 (-0.9)
  Matrix A = Matrix::Zero(3, 3);
  A(2, 0) = 0.2;
  A(2, 1) = -0.9;
  Matrix B = Matrix::Zero(3, 2);
  B(0, 0) = 1;
  B(1, 1) = 1;
  auto c = forward_assign(select_roots(linear(A, B)));
  EXPECT_EQ(c.owner(2 + 2), 1);
}

TEST(Forward, TieGoesToLowestFsu) {
  Matrix A = Matrix::Zero(3, 3);
  A(2, 0) = 0.5;
  A(2, 1) = 0.5;
  Matrix B = Matrix::Zero(3, 2);
  B(0, 0) = 1;
  B(1, 1) = 1;
  auto c = forward_assign(select_roots(linear(A, B)));
  EXPECT_EQ(c.owner(4), 0);
}

TEST(Forward, EmptyResidualIsNoop) {
  auto c = select_roots(share(sys2_graph()));
  auto d = forward_assign(c);
  EXPECT_TRUE(std::equal(c.owners().begin(), c.owners().end(), d.owners().begin()));
}

TEST(Backward, BackwardOnlyState) {
  // x3 -> x1 only
  Matrix A = Matrix::Zero(3, 3);
  A(0, 2) = 0.3;
  A(1, 1) = 0.5;
  Matrix B = Matrix::Zero(3, 2);
  B(0, 0) = 1;
  B(1, 1) = 1;
  auto f = forward_assign(select_roots(linear(A, B)));
  EXPECT_EQ(f.unassigned(), std::vector<VertexId>{4});
  auto c = backward_assign(f);
  EXPECT_EQ(c.owner(4), 0);
}

TEST(Backward, LargestMagnitudeWins) {
  Matrix A = Matrix::Zero(3, 3);
  A(0, 2) = 0.1;
  A(1, 2) = 0.3;
  Matrix B = Matrix::Zero(3, 2);
  B(0, 0) = 1;
  B(1, 1) = 1;
  auto c = backward_assign(forward_assign(select_roots(linear(A, B))));
  EXPECT_EQ(c.owner(4), 1);
}

TEST(Select, Sys2Condensed) {
  auto c = select_fsus(sys2_graph());
  expect_valid(c);
  ASSERT_EQ(c.size(), 2u);
  Matrix expected{{1.5, 0.0}, {0.1, 1.5}};
  EXPECT_TRUE(c.condensed().isApprox(expected));
}

TEST(Select, BackwardThenForwardNeedsOuterLoop) {
  // x3 -> x1 backward, then x4 is fed only by x3.
  Matrix A = Matrix::Zero(4, 4);
  A(0, 2) = 0.3;
  A(3, 2) = 0.7;
  Matrix B = Matrix::Zero(4, 2);
  B(0, 0) = 1;
  B(1, 1) = 1;
  auto c = select_fsus(linear(A, B));
  expect_valid(c);
  EXPECT_EQ(c.owner(4), 0);
  EXPECT_EQ(c.owner(5), 0);
}

TEST(Select, OrphanStateRejected) {
  Matrix A = Matrix::Zero(2, 2);
  A(1, 1) = 0.5;  // self loop only
  Matrix B = Matrix::Zero(2, 1);
  B(0, 0) = 1;
  try {
    select_fsus(linear(A, B));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "orphan_states");
    EXPECT_EQ(e.indices(), std::vector<long>{2});
  }
}

TEST(Select, StrandedComponentRejected) {
  // x2 <-> x3 form a cycle with no link to the actuated part.
  Matrix A = Matrix::Zero(3, 3);
  A(1, 2) = 0.2;
  A(2, 1) = 0.2;
  Matrix B = Matrix::Zero(3, 1);
  B(0, 0) = 1;
  try {
    select_fsus(linear(A, B));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "unattachable_states");
  }
}

TEST(Select, DisjointChainsRecovered) {
  const int p = 5, len = 4, n = p * len;
  Matrix A = Matrix::Zero(n, n);
  Matrix B = Matrix::Zero(n, p);
  for (int c = 0; c < p; ++c) {
    B(c * len, c) = 1;
    for (int k = 1; k < len; ++k) A(c * len + k, c * len + k - 1) = 0.5;
  }
  auto coll = select_fsus(linear(A, B));
  expect_valid(coll);
  ASSERT_EQ(coll.size(), static_cast<std::size_t>(p));
  for (int c = 0; c < p; ++c) {
    for (int k = 0; k < len; ++k) EXPECT_EQ(coll.owner(p + c * len + k), c);
  }
}

TEST(Select, RandomInstancesSatisfyInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 30, p = 6;
    Matrix A = Matrix::Zero(n, n);
    Matrix B = Matrix::Zero(n, p);
    for (int i = 0; i < p; ++i) B(i * 3, i) = 1.0;
    // random spanning links keep every state attached
    for (int i = 1; i < n; ++i) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      int j = pick(rng);
      if (rng() & 1) A(i, j) = d(rng); else A(j, i) = d(rng);
    }
    std::bernoulli_distribution extra(0.05);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (extra(rng)) A(i, j) = d(rng);
    auto g = linear(A, B);
    auto c1 = select_fsus(g);
    expect_valid(c1);
    auto c2 = select_fsus(g);
    EXPECT_TRUE(std::equal(c1.owners().begin(), c1.owners().end(), c2.owners().begin()));

    // merging monotonicity: a second input on a rooted state
    Matrix B2 = B;
    B2(0, 1) = 0.5;
    auto c3 = select_fsus(linear(A, B2));
    EXPECT_LE(c3.size(), c1.size());
  }
}
