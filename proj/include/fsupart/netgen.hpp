#pragma once

#include <cstdint>
#include <random>

#include "fsupart/system.hpp"

namespace fsupart {

// 64-bit Mersenne Twister (std::mt19937_64, fixed by the standard) with
// conversions written out so other languages can reproduce instances:
//   uniform()   = (next() >> 11) * 2^-53
//   below(n)    = next() % n, redrawing while next() >= 2^64 - (2^64 % n)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

struct ModularSpec {
  int levels = 3;
  int base_size = 4;
  double strong_w = 0.1;
  double weak_w = 0.01;
  // Weak links at level l (l >= 2) weigh weak_w * level_scale^(l - 2).
  double level_scale = 1.0;
  double self_w = 0.5;
  double input_w = 1.0;

  void validate() const;
};

// base_size^levels scalar FSUs. Base groups are strong cliques; at every
// higher level the base_size subgroups are joined in a ring by symmetric
// weak corner links. The corner of subgroup t facing subgroup t' is the
// member whose base-b digits below that level all equal t'. For base 4 the
// ring is 0-1-3-2-0, the sides of a 2x2 square.
LinearModel gen_modular(const ModularSpec& spec);

// Closed forms for the modular generator (directed state-state edges
// including self loops, and total |weight| including input edges).
long modular_edge_count(const ModularSpec& spec);
double modular_mass(const ModularSpec& spec);

struct RandomFsuSpec {
  int n_fsus = 10;
  double edge_density = 0.2;
  double w_lo = 0.01;
  double w_hi = 0.1;
  std::uint64_t seed = 0;
  // Two modes with self loops +self_w (x1 >= 0) and -self_w (x1 <= 0).
  bool pwa = false;
  double self_w = 0.5;

  void validate() const;
};

// Scalar FSUs with directed couplings drawn at edge_density. Vertices that
// end up disconnected are joined to a uniformly drawn earlier FSU.
SystemModel gen_random_fsu(const RandomFsuSpec& spec);

struct GenericSpec {
  int n = 100;
  int p = 20;
  double density = 0.03;
  std::uint64_t seed = 0;
  // Plant p disjoint clusters that FSU selection must recover exactly.
  bool planted = false;
  double w_lo = 0.1;
  double w_hi = 1.0;

  void validate() const;
};

LinearModel gen_generic(const GenericSpec& spec);
// Cluster id of every state in the planted layout for `spec`.
std::vector<int> planted_clusters(const GenericSpec& spec);

}  // namespace fsupart
