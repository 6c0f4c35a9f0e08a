#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "fsupart/error.hpp"
#include "fsupart/io.hpp"

using namespace fsupart;
using namespace fsupart::testing;

TEST(Io, TripletsEqualDense) {
  auto dense = Json::parse(R"([[0.5, 0.1], [0, 0.5]])");
  auto trip = Json::parse(R"({"rows": 2, "cols": 2, "triplets": [[0,0,0.5],[0,1,0.1],[1,1,0.5]]})");
  EXPECT_EQ(matrix_from_json(dense, "A"), matrix_from_json(trip, "A"));
}

TEST(Io, RaggedMatrixRejected) {
  EXPECT_THROW(matrix_from_json(Json::parse("[[1,2],[3]]"), "A"), Error);
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"rows":1,"cols":1,"triplets":[[2,0,1]]})"), "B"),
               Error);
}

TEST(Io, LinearRoundTrip) {
  SystemModel m = sys2();
  auto j = system_to_json(m);
  EXPECT_EQ(j.dump(), system_to_json(system_from_json(j)).dump());
  EXPECT_EQ(std::get<LinearModel>(system_from_json(j)).A, sys2().A);
}

TEST(Io, PwaRoundTrip) {
  RandomFsuSpec s;
  s.n_fsus = 3;
  s.pwa = true;
  auto m = gen_random_fsu(s);
  auto j = system_to_json(m);
  auto back = std::get<PwaModel>(system_from_json(j));
  EXPECT_EQ(back.modes.size(), 2u);
  EXPECT_EQ(j.dump(), system_to_json(back).dump());
}

TEST(Io, DimensionErrorsNameMatrix) {
  auto j = Json::parse(R"({"kind":"linear","A":[[1,0],[0,1]],"B":[[1]]})");
  try {
    system_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "dimension_mismatch");
    EXPECT_NE(std::string(e.what()).find("B"), std::string::npos);
  }
}

TEST(Io, FsusRoundTrip) {
  auto g = std::make_shared<const EquivalentGraph>(build_linear_graph(gen_modular(ModularSpec{2})));
  auto c = select_fsus(g);
  auto back = fsus_from_json(fsus_to_json(c), g);
  EXPECT_TRUE(std::equal(c.owners().begin(), c.owners().end(), back.owners().begin()));
  EXPECT_EQ(c.condensed(), back.condensed());
}

TEST(Io, PartitionJson) {
  auto c = sys2_fsus();
  auto j = partition_to_json(singleton_partition(c));
  EXPECT_EQ(j["blocks"].dump(), "[[0],[1]]");
  EXPECT_EQ(blocks_from_json(j), (Blocks{{0}, {1}}));
}

TEST(Io, DotExport) {
  auto g = sys2_graph();
  auto dot = to_dot(g);
  EXPECT_NE(dot.find("u1 [fillcolor=red"), std::string::npos);
  EXPECT_NE(dot.find("x2 [fillcolor=cyan"), std::string::npos);
  EXPECT_NE(dot.find("x2 -> x1 [label=\"0.1\"]"), std::string::npos);
  EXPECT_EQ(format_weight(1.0 / 3.0), "0.333333");
  auto c = sys2_fsus();
  auto p = single_block_partition(c);
  DotOptions o;
  o.fsus = &c;
  o.partition = &p;
  auto grouped = to_dot(g, o);
  EXPECT_NE(grouped.find("cluster_csu1"), std::string::npos);
  EXPECT_NE(grouped.find("cluster_fsu2"), std::string::npos);
}
