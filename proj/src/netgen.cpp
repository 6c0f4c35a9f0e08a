#include "fsupart/netgen.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fsupart/error.hpp"

namespace fsupart {

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error("invalid_argument", "empty range");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x > limit);
  return x % n;
}

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Subgroup pairs linked at each level above the base.
std::vector<std::pair<int, int>> ring_links(int b) {
  if (b == 4) return {{0, 1}, {1, 3}, {3, 2}, {2, 0}};
  if (b == 2) return {{0, 1}};
  std::vector<std::pair<int, int>> out;
  if (b < 2) return out;
  for (int t = 0; t < b; ++t) out.push_back({t, (t + 1) % b});
  return out;
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

void check_range(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw Error("invalid_argument", "weight range must satisfy 0 < lo <= hi");
  }
}

}  // namespace

void ModularSpec::validate() const {
  if (levels < 1) throw Error("invalid_argument", "levels must be >= 1");
  if (base_size < 2) throw Error("invalid_argument", "base size must be >= 2");
  if (!(strong_w > weak_w) || !(weak_w > 0.0)) {
    throw Error("invalid_argument", "weights must satisfy strong_w > weak_w > 0");
  }
  if (!(level_scale > 0.0)) throw Error("invalid_argument", "level scale must be positive");
  if (ipow(base_size, levels) > 100000) throw Error("invalid_argument", "network too large");
}

LinearModel gen_modular(const ModularSpec& spec) {
  spec.validate();
  const int b = spec.base_size;
  const int n = static_cast<int>(ipow(b, spec.levels));
  LinearModel m{Matrix::Zero(n, n), Matrix::Identity(n, n) * spec.input_w};
  for (int i = 0; i < n; ++i) m.A(i, i) = spec.self_w;
  for (int g = 0; g < n; g += b) {
    for (int i = g; i < g + b; ++i)
      for (int j = g; j < g + b; ++j)
        if (i != j) m.A(i, j) = spec.strong_w;
  }
  const auto links = ring_links(b);
  for (int level = 2; level <= spec.levels; ++level) {
    const long span = ipow(b, level);
    const long sub = ipow(b, level - 1);
    const double w = spec.weak_w * std::pow(spec.level_scale, level - 2);
    auto corner = [&](long g, int t, int digit) {
      long off = 0;
      for (int k = 0; k < level - 1; ++k) off += digit * ipow(b, k);
      return g + t * sub + off;
    };
    for (long g = 0; g < n; g += span) {
      for (auto [t, u] : links) {
        const long x = corner(g, t, u);
        const long y = corner(g, u, t);
        m.A(x, y) = w;
        m.A(y, x) = w;
      }
    }
  }
  return m;
}

long modular_edge_count(const ModularSpec& spec) {
  spec.validate();
  const long n = ipow(spec.base_size, spec.levels);
  long count = n + n * (spec.base_size - 1);
  const long ring = static_cast<long>(ring_links(spec.base_size).size());
  for (int level = 2; level <= spec.levels; ++level) {
    count += ipow(spec.base_size, spec.levels - level) * ring * 2;
  }
  return count;
}

double modular_mass(const ModularSpec& spec) {
  spec.validate();
  const long n = ipow(spec.base_size, spec.levels);
  double mass = n * (std::abs(spec.self_w) + std::abs(spec.input_w)) +
                n * (spec.base_size - 1) * spec.strong_w;
  const double ring = static_cast<double>(ring_links(spec.base_size).size());
  for (int level = 2; level <= spec.levels; ++level) {
    mass += ipow(spec.base_size, spec.levels - level) * ring * 2.0 * spec.weak_w *
            std::pow(spec.level_scale, level - 2);
  }
  return mass;
}

void RandomFsuSpec::validate() const {
  if (n_fsus < 1) throw Error("invalid_argument", "need at least one FSU");
  if (!(edge_density > 0.0 && edge_density <= 1.0)) {
    throw Error("invalid_argument", "edge density must lie in (0, 1]");
  }
  check_range(w_lo, w_hi);
}

SystemModel gen_random_fsu(const RandomFsuSpec& spec) {
  spec.validate();
  const int n = spec.n_fsus;
  Rng rng(spec.seed);
  Matrix A = Matrix::Zero(n, n);
  DisjointSets sets(n);
  // Row-major sweep over ordered pairs: A(j, i) is the edge x_i -> x_j.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rng.bernoulli(spec.edge_density)) {
        A(j, i) = rng.uniform(spec.w_lo, spec.w_hi);
        sets.unite(i, j);
      }
    }
  }
  for (int i = 1; i < n; ++i) {
    if (sets.find(i) == sets.find(i - 1)) continue;
    const int j = static_cast<int>(rng.below(i));
    const double w = rng.uniform(spec.w_lo, spec.w_hi);
    if (rng.bernoulli(0.5)) {
      A(i, j) = w;
    } else {
      A(j, i) = w;
    }
    sets.unite(i, j);
  }
  Matrix B = Matrix::Identity(n, n);
  if (!spec.pwa) {
    A.diagonal().setConstant(spec.self_w);
    return LinearModel{A, B};
  }
  PwaModel m;
  for (int q = 0; q < 2; ++q) {
    PwaMode mode;
    mode.A = A;
    mode.A.diagonal().setConstant(q == 0 ? spec.self_w : -spec.self_w);
    mode.B = B;
    mode.g = Vector::Zero(n);
    mode.guard.Hx = Matrix::Zero(1, n);
    mode.guard.Hx(0, 0) = q == 0 ? -1.0 : 1.0;
    mode.guard.Hu = Matrix::Zero(1, n);
    mode.guard.h = Vector::Zero(1);
    m.modes.push_back(std::move(mode));
  }
  return m;
}

void GenericSpec::validate() const {
  if (p < 1 || n < p) throw Error("invalid_argument", "need n >= p >= 1");
  if (!(density >= 0.0 && density <= 1.0)) {
    throw Error("invalid_argument", "density must lie in [0, 1]");
  }
  check_range(w_lo, w_hi);
}

std::vector<int> planted_clusters(const GenericSpec& spec) {
  spec.validate();
  std::vector<int> out(spec.n);
  for (int j = 0; j < spec.n; ++j) out[j] = static_cast<int>(static_cast<long>(j) * spec.p / spec.n);
  return out;
}

namespace {

double signed_weight(Rng& rng, double lo, double hi) {
  const double w = rng.uniform(lo, hi);
  return rng.bernoulli(0.5) ? w : -w;
}

LinearModel planted_system(const GenericSpec& spec) {
  const int n = spec.n, p = spec.p;
  Rng rng(spec.seed);
  const auto cluster = planted_clusters(spec);
  std::vector<std::vector<int>> members(p);
  for (int j = 0; j < n; ++j) members[cluster[j]].push_back(j);

  Matrix A = Matrix::Zero(n, n);
  Matrix B = Matrix::Zero(n, p);
  std::vector<int> roots(p);
  const double weak_hi = 0.1 * spec.w_lo;
  const double weak_lo = 0.01 * spec.w_lo;
  for (int c = 0; c < p; ++c) {
    const auto& mem = members[c];
    roots[c] = mem.front();
    B(mem.front(), c) = rng.uniform(spec.w_lo, spec.w_hi);
    // Tree grown from the root; some leaves only point back at their
    // parent and are picked up by the backward pass.
    std::vector<int> forward{mem.front()};
    for (std::size_t k = 1; k < mem.size(); ++k) {
      const int parent = forward[rng.below(forward.size())];
      const int child = mem[k];
      const double w = signed_weight(rng, spec.w_lo, spec.w_hi);
      if (rng.bernoulli(0.2)) {
        A(parent, child) = w;  // child -> parent
      } else {
        A(child, parent) = w;  // parent -> child
        forward.push_back(child);
      }
    }
    if (rng.bernoulli(0.5)) A(mem.front(), mem.front()) = signed_weight(rng, spec.w_lo, spec.w_hi);
  }
  // Weak links between clusters only ever end at roots, which are fixed by
  // root selection, so they cannot pull nodes across clusters.
  for (int c = 0; c < p && p > 1; ++c) {
    const auto& mem = members[c];
    const int src = mem[rng.below(mem.size())];
    const int dst = roots[(c + 1) % p];
    if (src != dst) A(dst, src) = signed_weight(rng, weak_lo, weak_hi);
    for (int d = 0; d < p; ++d) {
      if (d == c || !rng.bernoulli(spec.density)) continue;
      const int s = mem[rng.below(mem.size())];
      if (s != roots[d]) A(roots[d], s) = signed_weight(rng, weak_lo, weak_hi);
    }
  }
  return LinearModel{A, B};
}

}  // namespace

LinearModel gen_generic(const GenericSpec& spec) {
  spec.validate();
  if (spec.planted) return planted_system(spec);
  const int n = spec.n, p = spec.p;
  Rng rng(spec.seed);
  Matrix A = Matrix::Zero(n, n);
  Matrix B = Matrix::Zero(n, p);
  for (int i = 0; i < p; ++i) {
    B(static_cast<int>(rng.below(n)), i) = signed_weight(rng, spec.w_lo, spec.w_hi);
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < p; ++i) {
      if (B(j, i) == 0.0 && rng.bernoulli(spec.density / 4.0)) {
        B(j, i) = signed_weight(rng, spec.w_lo, spec.w_hi);
      }
    }
  }
  DisjointSets sets(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j) {
        if (rng.bernoulli(0.5)) A(j, j) = signed_weight(rng, spec.w_lo, spec.w_hi);
      } else if (rng.bernoulli(spec.density)) {
        A(j, i) = signed_weight(rng, spec.w_lo, spec.w_hi);
        sets.unite(i, j);
      }
    }
  }
  for (int j = 1; j < n; ++j) {
    if (sets.find(j) == sets.find(0)) continue;
    const int k = static_cast<int>(rng.below(j));
    const double w = signed_weight(rng, spec.w_lo, spec.w_hi);
    if (rng.bernoulli(0.5)) {
      A(j, k) = w;
    } else {
      A(k, j) = w;
    }
    sets.unite(j, k);
  }
  return LinearModel{A, B};
}

}  // namespace fsupart
