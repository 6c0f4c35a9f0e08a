// Acceptance run: one line per criterion, "criterion N: PASS|FAIL  detail".
// Exit status is the number of failing criteria unless --report-only is given.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fsupart/dmpc.hpp"
#include "fsupart/exact.hpp"
#include "fsupart/fsu.hpp"
#include "fsupart/greedy.hpp"
#include "fsupart/netgen.hpp"

using namespace fsupart;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

FsuCollection modular(int levels) {
  ModularSpec s;
  s.levels = levels;
  return select_fsus(build_linear_graph(gen_modular(s)));
}

FsuCollection random_instance(std::uint64_t seed, int n, double density = 0.4) {
  RandomFsuSpec s;
  s.n_fsus = n;
  s.edge_density = density;
  s.w_lo = 0.01;
  s.w_hi = 1.0;
  s.seed = seed;
  return select_fsus(build_linear_graph(std::get<LinearModel>(gen_random_fsu(s))));
}

std::string sizes(const Partition& p) {
  auto b = p.block_sizes();
  std::sort(b.begin(), b.end());
  std::map<int, int> hist;
  for (int s : b) ++hist[s];
  std::ostringstream os;
  os << p.size() << " blocks (";
  bool first = true;
  for (auto [s, k] : hist) {
    os << (first ? "" : " ") << k << "x" << s;
    first = false;
  }
  os << ")";
  return os.str();
}

bool uniform_blocks(const Partition& p, std::size_t count, int size) {
  if (p.size() != count) return false;
  for (int s : p.block_sizes())
    if (s != size) return false;
  return true;
}

// Instances for criteria 3 and 4: 200 seeds, N_FSU cycling through 3..9.
std::vector<FsuCollection> oracle_instances() {
  std::vector<FsuCollection> out;
  for (int i = 0; i < 200; ++i) out.push_back(random_instance(1000 + i, 3 + i % 7, 0.2 + 0.1 * (i % 4)));
  return out;
}

Outcome greedy_modular64() {
  auto t0 = Clock::now();
  auto c = modular(3);
  auto coarse = greedy_partition(c, IndexConfig::from_alpha(25.0));
  auto fine = greedy_partition(c, IndexConfig::from_alpha(1.0));
  const double secs = since(t0);
  Outcome o;
  o.pass = uniform_blocks(coarse, 64, 1) && uniform_blocks(fine, 16, 4) && secs < 60.0;
  std::ostringstream os;
  os << "alpha=25 -> " << sizes(coarse) << ", alpha=1 -> " << sizes(fine) << ", " << secs << " s";
  o.detail = os.str();
  return o;
}

Outcome exact_ladder() {
  auto t0 = Clock::now();
  auto c = modular(2);
  const std::vector<double> alphas = {alpha_big(c), 3.2, 1e-3};
  std::vector<ExactResult> rs;
  for (double a : alphas) rs.push_back(branch_and_bound(c, IndexConfig::from_alpha(a), BnbOptions{.time_limit = 600.0}));
  const double secs = since(t0);
  bool proven = true;
  for (const auto& r : rs) proven = proven && r.optimal && r.gap == 0.0;
  Outcome o;
  o.pass = proven && uniform_blocks(rs[0].partition, 16, 1) && uniform_blocks(rs[1].partition, 4, 4) &&
           uniform_blocks(rs[2].partition, 1, 16) && secs < 600.0;
  std::ostringstream os;
  os << "alpha_big=" << alphas[0] << " -> " << sizes(rs[0].partition) << ", 3.2 -> " << sizes(rs[1].partition)
     << ", 1e-3 -> " << sizes(rs[2].partition) << ", proven=" << proven << ", " << secs << " s";
  o.detail = os.str();
  return o;
}

Outcome oracle_equivalence(const std::vector<FsuCollection>& inst) {
  int mismatches = 0, runs = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (double a : {0.3, 2.0, 8.0}) {
      auto cfg = IndexConfig::from_alpha(a);
      auto brute = brute_force_partition(inst[i], cfg);
      auto bnb = branch_and_bound(inst[i], cfg);
      ++runs;
      const double tol = 1e-9 * std::max(1.0, std::abs(brute.value));
      if (!bnb.optimal || std::abs(bnb.value - brute.value) > tol || !(bnb.partition == brute.partition)) ++mismatches;
    }
  }
  std::ostringstream os;
  os << inst.size() << " instances, " << runs << " solves, " << mismatches << " mismatches";
  return {mismatches == 0, os.str()};
}

Outcome endpoints(const std::vector<FsuCollection>& inst) {
  int mismatches = 0;
  for (const auto& c : inst) {
    const double big = alpha_big(c);
    const std::vector<std::pair<double, std::size_t>> cases = {{0.0, 1}, {big, c.size()}, {10.0 * big, c.size()}};
    for (auto [a, blocks] : cases) {
      auto cfg = IndexConfig::from_alpha(a);
      auto brute = brute_force_partition(c, cfg);
      auto bnb = branch_and_bound(c, cfg);
      if (brute.partition.size() != blocks || bnb.partition.size() != blocks || !bnb.optimal) ++mismatches;
    }
  }
  std::ostringstream os;
  os << inst.size() << " instances x {0, alpha_big, 10 alpha_big}, " << mismatches << " mismatches";
  return {mismatches == 0, os.str()};
}

Outcome refinement() {
  int worse = 0;
  double worst = 1.0;
  std::ostringstream gaps;
  for (int i = 0; i < 100; ++i) {
    const int n = 4 + i % 5;  // 4..8
    auto c = random_instance(5000 + i, n);
    const double a = std::array<double, 4>{0.1, 0.5, 2.0, 10.0}[i % 4];
    auto cfg = IndexConfig::from_alpha(a);
    const double g = index_ratio(greedy_partition(c, cfg), cfg);
    const double r = index_ratio(greedy_refined(c, cfg), cfg);
    if (r < g - 1e-12 * std::max(1.0, std::abs(g))) ++worse;
    const double opt = brute_force_partition(c, cfg, Objective::Ratio).value;
    const double frac = r / opt;
    worst = std::min(worst, frac);
    gaps << (i ? "," : "") << std::setprecision(4) << 1.0 - frac;
  }
  std::ostringstream os;
  os << "refined<greedy on " << worse << "/100, worst refined/optimum=" << worst << ", gaps=[" << gaps.str() << "]";
  return {worse == 0 && worst >= 0.95, os.str()};
}

Outcome fsu_structure() {
  int bad = 0, max_fsus = 0;
  for (int i = 0; i < 50; ++i) {
    GenericSpec s;
    s.n = 100;
    s.p = 20;
    s.seed = 700 + i;
    auto c = select_fsus(build_linear_graph(gen_generic(s)));
    const auto& g = c.graph();
    max_fsus = std::max(max_fsus, static_cast<int>(c.size()));
    std::vector<int> seen(g.num_vertices(), 0);
    bool ok = c.complete() && static_cast<int>(c.size()) <= 20;
    for (const auto& f : c.fsus()) {
      for (auto v : f.nodes()) ++seen[v];
      ok = ok && !f.input_nodes.empty() && !f.state_nodes.empty() && is_csu(c.subgraph(f.id));
    }
    for (int k : seen) ok = ok && k == 1;
    if (!ok) ++bad;
  }
  int planted_bad = 0;
  for (int i = 0; i < 50; ++i) {
    GenericSpec s;
    s.n = 100;
    s.p = 20;
    s.planted = true;
    s.seed = 900 + i;
    auto c = select_fsus(build_linear_graph(gen_generic(s)));
    auto plant = planted_clusters(s);
    bool ok = c.size() == 20;
    for (int j = 0; ok && j < s.n; ++j) ok = c.owner(c.graph().state_vertex(j)) == plant[j];
    if (!ok) ++planted_bad;
  }
  std::ostringstream os;
  os << "50 generic: " << bad << " invalid, max N_FSU=" << max_fsus << "; 50 planted: " << planted_bad
     << " not recovered";
  return {bad == 0 && planted_bad == 0, os.str()};
}

Outcome conservation() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 3 + t % 10;
    auto c = random_instance(20000 + t / 10, n, 0.3);
    std::uniform_int_distribution<int> lab(0, n - 1);
    std::vector<int> labels(c.size());
    for (auto& l : labels) l = lab(rng);
    auto p = partition_from_labels(c, labels);
    const double mass = c.graph().total_mass();
    worst = std::max(worst, std::abs(w_intra(p) + 0.5 * w_inter(p) - mass) / mass);
  }
  std::ostringstream os;
  os << "1000 partitions, worst relative error " << worst;
  return {worst <= 1e-9, os.str()};
}

// Every support over V x V_x as an edge mask.
std::size_t exhaustive_signatures(int n, int p) {
  const int bits = n * (n + p);
  std::set<TopologySignature> seen;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    std::vector<Edge> edges;
    for (int b = 0; b < bits; ++b) {
      if (!(mask >> b & 1)) continue;
      const int src = b % (n + p), dst = p + b / (n + p);
      edges.push_back({src, dst, 1.0});
    }
    seen.insert(topology_signature(EquivalentGraph(n, p, edges)));
  }
  return seen.size();
}

Outcome lemma_bound() {
  std::ostringstream os;
  bool ok = true;
  std::mt19937_64 rng(8);
  std::bernoulli_distribution coin(0.5);
  for (auto [n, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}}) {
    const auto count = exhaustive_signatures(n, p);
    const auto bound = std::uint64_t{1} << (n * (n + p));
    ok = ok && count == bound && topology_bound(n, p) == bound;
    std::size_t worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
      PwaModel m;
      const int modes = 1 + trial % 100;
      for (int q = 0; q < modes; ++q) {
        Matrix A(n, n), B(n, p);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) A(i, j) = coin(rng) ? 0.3 : 0.0;
          for (int j = 0; j < p; ++j) B(i, j) = coin(rng) ? 1.0 : 0.0;
        }
        m.modes.push_back(PwaMode{A, B, {}, {}});
      }
      worst = std::max(worst, count_distinct_topologies(m));
    }
    ok = ok && worst <= bound;
    os << "n=" << n << ",p=" << p << ": " << count << " signatures (bound " << bound << "), PWA max " << worst
       << "; ";
  }
  return {ok, os.str()};
}

Outcome dmpc_trends() {
  auto t0 = Clock::now();
  ModularSpec ms;
  ms.levels = 2;
  auto model = gen_modular(ms);
  auto c = modular(2);
  Scenario scn;
  scn.horizon = 10;
  scn.steps = 60;
  const std::vector<Partition> parts = {single_block_partition(c),
                                        branch_and_bound(c, IndexConfig::from_alpha(3.2)).partition,
                                        singleton_partition(c)};
  std::vector<RunMetrics> runs;
  for (const auto& p : parts) runs.push_back(simulate(model, p, scn));
  double lo = runs[0].cumulative_cost(), hi = lo;
  for (const auto& r : runs) {
    lo = std::min(lo, r.cumulative_cost());
    hi = std::max(hi, r.cumulative_cost());
  }
  const bool a = (hi - lo) / lo <= 0.01;
  bool b = true, cc = true;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    b = b && runs[i].mean_max_core_time() <= runs[i - 1].mean_max_core_time();
    cc = cc && runs[i].core_seconds() > runs[i - 1].core_seconds();
  }
  const double secs = since(t0);
  std::ostringstream os;
  os << std::setprecision(6) << "(a) " << (a ? "ok" : "no") << " spread " << (hi - lo) / lo << "; (b) "
     << (b ? "ok" : "no") << " max-core ms";
  for (const auto& r : runs) os << " " << 1e3 * r.mean_max_core_time();
  os << "; (c) " << (cc ? "ok" : "no") << " core-s";
  for (const auto& r : runs) os << " " << r.core_seconds();
  os << "; blocks";
  for (const auto& r : runs) os << " " << r.n_csu;
  os << ", " << secs << " s";
  return {a && b && cc && secs < 900.0, os.str()};
}

// Block-diagonal version of modular-16: the weak corner links are removed.
LinearModel decoupled16() {
  ModularSpec ms;
  ms.levels = 2;
  auto m = gen_modular(ms);
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j)
      if (i / 4 != j / 4) m.A(i, j) = 0.0;
  return m;
}

Outcome admm_correctness() {
  auto model = decoupled16();
  auto c = select_fsus(build_linear_graph(model));
  Scenario scn;
  scn.horizon = 10;
  scn.steps = 20;
  double worst_u = 0.0, worst_res = 0.0;
  for (const auto& part : {partition_from_labels(c, [] {
                             std::vector<int> l(16);
                             for (int i = 0; i < 16; ++i) l[i] = i / 4;
                             return l;
                           }()),
                           singleton_partition(c)}) {
    CentralizedMpc central(model, scn);
    AdmmDmpc dist(split_system(model, part), model.n(), model.p(), scn);
    Vector x = scn.x0.size() ? scn.x0 : Vector::Zero(model.n());
    for (int k = 0; k < scn.steps; ++k) {
      auto ref = scn.reference_window(k, model.n());
      auto uc = central.step(x, ref);
      auto ud = dist.step(x, ref);
      worst_u = std::max(worst_u, (uc.u - ud.u).cwiseAbs().maxCoeff());
      if (!ud.primal.empty()) worst_res = std::max({worst_res, ud.primal.back(), ud.dual.back()});
      x = model.A * x + model.B * uc.u;
    }
  }
  std::ostringstream os;
  os << "max |u_dmpc - u_central| = " << worst_u << " (limit " << 10 * scn.eps << "), max final residual "
     << worst_res;
  return {worst_u <= 10 * scn.eps && worst_res <= scn.eps, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  bool report_only = false;
  for (int i = 1; i < argc; ++i) report_only = report_only || std::strcmp(argv[i], "--report-only") == 0;

  const auto inst = oracle_instances();
  const std::vector<std::function<Outcome()>> criteria = {
      greedy_modular64,
      exact_ladder,
      [&] { return oracle_equivalence(inst); },
      [&] { return endpoints(inst); },
      refinement,
      fsu_structure,
      conservation,
      lemma_bound,
      dmpc_trends,
      admm_correctness,
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return report_only ? 0 : failures;
}
