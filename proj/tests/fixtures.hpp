#pragma once

#include "fsupart/graph.hpp"
#include "fsupart/system.hpp"

namespace fsupart::testing {

// Two coupled FSUs: A = [[0.5, 0.1], [0, 0.5]], B = I.
inline LinearModel sys2() {
  LinearModel m;
  m.A = Matrix{{0.5, 0.1}, {0.0, 0.5}};
  m.B = Matrix::Identity(2, 2);
  return m;
}

inline EquivalentGraph sys2_graph() { return build_linear_graph(sys2()); }

}  // namespace fsupart::testing

#include <memory>

#include "fsupart/fsu.hpp"
#include "fsupart/netgen.hpp"

namespace fsupart::testing {

inline FsuCollection sys2_fsus() { return select_fsus(sys2_graph()); }

inline FsuCollection modular_fsus(int levels) {
  ModularSpec spec;
  spec.levels = levels;
  return select_fsus(build_linear_graph(gen_modular(spec)));
}

// Scalar FSUs with couplings spread over two decades.
inline FsuCollection random_fsus(std::uint64_t seed, int n, double density = 0.4) {
  RandomFsuSpec spec;
  spec.n_fsus = n;
  spec.edge_density = density;
  spec.w_lo = 0.01;
  spec.w_hi = 1.0;
  spec.seed = seed;
  return select_fsus(build_linear_graph(std::get<LinearModel>(gen_random_fsu(spec))));
}

}  // namespace fsupart::testing
