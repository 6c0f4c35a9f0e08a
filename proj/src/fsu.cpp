#include "fsupart/fsu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fsupart/error.hpp"

namespace fsupart {

std::vector<VertexId> Fsu::nodes() const {
  std::vector<VertexId> out = input_nodes;
  out.insert(out.end(), state_nodes.begin(), state_nodes.end());
  std::sort(out.begin(), out.end());
  return out;
}

FsuCollection::FsuCollection(std::shared_ptr<const EquivalentGraph> graph, std::vector<int> owner,
                             std::vector<char> root)
    : graph_(std::move(graph)), owner_(std::move(owner)), root_(std::move(root)) {
  if (!graph_) throw Error("invalid_argument", "null graph");
  const auto& g = *graph_;
  const int nv = g.num_vertices();
  if (static_cast<int>(owner_.size()) != nv) {
    throw Error("dimension_mismatch", "owner vector has wrong length");
  }
  if (root_.empty()) root_.assign(nv, 0);
  if (static_cast<int>(root_.size()) != nv) {
    throw Error("dimension_mismatch", "root flag vector has wrong length");
  }

  int count = 0;
  for (int v = 0; v < nv; ++v) {
    if (owner_[v] < -1) throw Error("invalid_argument", "bad owner id", {v});
    if (g.is_input(v) && owner_[v] < 0) {
      throw Error("invalid_argument", "input " + g.vertex_name(v) + " is not assigned", {v});
    }
    count = std::max(count, owner_[v] + 1);
  }
  fsus_.resize(count);
  for (int id = 0; id < count; ++id) fsus_[id].id = id;
  for (int v = 0; v < nv; ++v) {
    const int id = owner_[v];
    if (id < 0) {
      unassigned_.push_back(v);
      continue;
    }
    if (g.is_input(v)) {
      fsus_[id].input_nodes.push_back(v);
    } else {
      fsus_[id].state_nodes.push_back(v);
      if (root_[v]) fsus_[id].root_states.push_back(v);
    }
  }
  for (const auto& f : fsus_) {
    if (f.input_nodes.empty()) {
      throw Error("invalid_argument", "FSU " + std::to_string(f.id) + " has no input", {f.id});
    }
  }

  condensed_ = Matrix::Zero(count, count);
  for (const auto& e : g.edges()) {
    const int a = owner_[e.source];
    const int b = owner_[e.target];
    if (a >= 0 && b >= 0) condensed_(a, b) += std::abs(e.weight);
  }
}

FsuCollection FsuCollection::from_node_sets(std::shared_ptr<const EquivalentGraph> graph,
                                            const std::vector<std::vector<VertexId>>& node_sets) {
  if (!graph) throw Error("invalid_argument", "null graph");
  std::vector<int> owner(graph->num_vertices(), -1);
  std::vector<char> root(graph->num_vertices(), 0);
  for (std::size_t id = 0; id < node_sets.size(); ++id) {
    for (auto v : node_sets[id]) {
      if (v < 0 || v >= graph->num_vertices()) {
        throw Error("invalid_vertex", "vertex out of range", {v});
      }
      if (owner[v] >= 0) {
        throw Error("invalid_argument", "vertex " + graph->vertex_name(v) + " listed twice", {v});
      }
      owner[v] = static_cast<int>(id);
    }
  }
  for (VertexId v = 0; v < graph->num_vertices(); ++v) {
    if (!graph->is_state(v) || owner[v] < 0) continue;
    for (const auto& e : graph->in_edges(v)) {
      if (graph->is_input(e.source) && owner[e.source] == owner[v]) root[v] = 1;
    }
  }
  return FsuCollection(std::move(graph), std::move(owner), std::move(root));
}

int FsuCollection::node_count(int id) const {
  const auto& f = fsus_[id];
  return static_cast<int>(f.input_nodes.size() + f.state_nodes.size());
}

Subgraph FsuCollection::subgraph(int id) const { return Subgraph(*graph_, fsus_[id].nodes()); }

namespace {

int find(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

// Candidate comparison for the argmax rules: larger |w|, then lower FSU id,
// then lower vertex index.
struct Candidate {
  double magnitude = -1.0;
  int fsu = -1;
  VertexId vertex = -1;

  bool improves_on(const Candidate& best) const {
    if (magnitude != best.magnitude) return magnitude > best.magnitude;
    if (fsu != best.fsu) return fsu < best.fsu;
    return vertex < best.vertex;
  }
};

}  // namespace

FsuCollection select_roots(std::shared_ptr<const EquivalentGraph> gp) {
  if (!gp) throw Error("invalid_argument", "null graph");
  const auto& g = *gp;
  const int p = g.num_inputs();
  if (p == 0) throw Error("no_inputs", "graph has no input vertices");

  for (VertexId u = 0; u < p; ++u) {
    if (g.out_edges(u).empty()) {
      throw Error("input_without_edges",
                  "input " + g.vertex_name(u) + " drives no state; an FSU needs at least one "
                  "control input and one state",
                  {u});
    }
  }

  std::vector<int> parent(p);
  std::iota(parent.begin(), parent.end(), 0);
  for (int j = 0; j < g.num_states(); ++j) {
    const VertexId x = g.state_vertex(j);
    int first = -1;
    for (const auto& e : g.in_edges(x)) {
      if (!g.is_input(e.source)) continue;
      if (first < 0) {
        first = e.source;
        continue;
      }
      const int a = find(parent, first);
      const int b = find(parent, e.source);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }

  // Groups are numbered by their smallest input.
  std::vector<int> group_id(p, -1);
  int next = 0;
  std::vector<int> owner(g.num_vertices(), -1);
  std::vector<char> root(g.num_vertices(), 0);
  for (VertexId u = 0; u < p; ++u) {
    const int r = find(parent, u);
    if (group_id[r] < 0) group_id[r] = next++;
    owner[u] = group_id[r];
  }
  for (int j = 0; j < g.num_states(); ++j) {
    const VertexId x = g.state_vertex(j);
    for (const auto& e : g.in_edges(x)) {
      if (g.is_input(e.source)) {
        owner[x] = owner[e.source];
        root[x] = 1;
        break;
      }
    }
  }
  return FsuCollection(std::move(gp), std::move(owner), std::move(root));
}

FsuCollection forward_assign(const FsuCollection& coll) {
  const auto& g = coll.graph();
  std::vector<int> owner(coll.owners().begin(), coll.owners().end());
  std::vector<char> root(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) root[v] = coll.is_root(v);

  std::vector<VertexId> pending = coll.unassigned();
  bool changed = true;
  while (changed && !pending.empty()) {
    changed = false;
    std::vector<VertexId> still;
    for (VertexId j : pending) {
      Candidate best;
      for (const auto& e : g.in_edges(j)) {
        if (!g.is_state(e.source) || e.source == j || owner[e.source] < 0) continue;
        Candidate c{std::abs(e.weight), owner[e.source], e.source};
        if (c.improves_on(best)) best = c;
      }
      if (best.fsu >= 0) {
        owner[j] = best.fsu;
        changed = true;
      } else {
        still.push_back(j);
      }
    }
    pending = std::move(still);
  }
  return FsuCollection(coll.graph_ptr(), std::move(owner), std::move(root));
}

FsuCollection backward_assign(const FsuCollection& coll) {
  const auto& g = coll.graph();
  std::vector<int> owner(coll.owners().begin(), coll.owners().end());
  std::vector<char> root(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) root[v] = coll.is_root(v);

  for (VertexId i : coll.unassigned()) {
    Candidate best;
    for (const auto& e : g.out_edges(i)) {
      if (e.target == i || owner[e.target] < 0) continue;
      Candidate c{std::abs(e.weight), owner[e.target], e.target};
      if (c.improves_on(best)) best = c;
    }
    if (best.fsu >= 0) owner[i] = best.fsu;
  }
  return FsuCollection(coll.graph_ptr(), std::move(owner), std::move(root));
}

FsuCollection select_fsus(std::shared_ptr<const EquivalentGraph> gp) {
  if (!gp) throw Error("invalid_argument", "null graph");
  const auto& g = *gp;

  std::vector<long> orphans;
  for (int j = 0; j < g.num_states(); ++j) {
    const VertexId x = g.state_vertex(j);
    auto foreign = [x](const Edge& e) { return e.source != x || e.target != x; };
    auto oe = g.out_edges(x);
    auto ie = g.in_edges(x);
    if (std::none_of(oe.begin(), oe.end(), foreign) && std::none_of(ie.begin(), ie.end(), foreign)) {
      orphans.push_back(x);
    }
  }
  if (!orphans.empty()) {
    std::string names;
    for (auto v : orphans) names += (names.empty() ? "" : ", ") + g.vertex_name(v);
    throw Error("orphan_states", "states without edges cannot join any FSU: " + names, orphans);
  }

  FsuCollection coll = select_roots(gp);
  while (!coll.complete()) {
    const std::size_t before = coll.unassigned().size();
    coll = forward_assign(coll);
    coll = backward_assign(coll);
    if (coll.unassigned().size() == before) break;
  }
  if (!coll.complete()) {
    std::vector<long> stranded(coll.unassigned().begin(), coll.unassigned().end());
    std::string names;
    for (auto v : stranded) names += (names.empty() ? "" : ", ") + g.vertex_name(v);
    throw Error("unattachable_states",
                "states not connected to any input through the graph: " + names, stranded);
  }
  return coll;
}

FsuCollection select_fsus(const EquivalentGraph& g) {
  return select_fsus(std::make_shared<const EquivalentGraph>(g));
}

}  // namespace fsupart
