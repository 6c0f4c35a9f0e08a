#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fsupart/graph.hpp"

namespace fsupart {

// Fundamental system unit: the smallest subsystem with at least one input
// and one state whose inputs only drive its own states.
struct Fsu {
  int id = 0;
  std::vector<VertexId> input_nodes;
  std::vector<VertexId> state_nodes;
  std::vector<VertexId> root_states;  // states driven directly by the inputs

  std::vector<VertexId> nodes() const;
};

// Assignment of graph vertices to FSUs, possibly partial while the selection
// runs. `condensed()(a, b)` is the sum of |w(s,t)| over s in FSU a and t in
// FSU b.
class FsuCollection {
 public:
  // owner[v] is an FSU id in [0, k) or -1 for unassigned states; ids must be
  // contiguous. root[v] marks root states.
  FsuCollection(std::shared_ptr<const EquivalentGraph> graph, std::vector<int> owner,
                std::vector<char> root = {});

  // Rebuilds a collection from explicit node lists (e.g. read from disk).
  static FsuCollection from_node_sets(std::shared_ptr<const EquivalentGraph> graph,
                                      const std::vector<std::vector<VertexId>>& node_sets);

  const EquivalentGraph& graph() const { return *graph_; }
  const std::shared_ptr<const EquivalentGraph>& graph_ptr() const { return graph_; }

  std::size_t size() const { return fsus_.size(); }
  const std::vector<Fsu>& fsus() const { return fsus_; }
  const Fsu& operator[](std::size_t id) const { return fsus_[id]; }

  // Residual list L of unassigned states, ascending.
  const std::vector<VertexId>& unassigned() const { return unassigned_; }
  bool complete() const { return unassigned_.empty(); }

  int owner(VertexId v) const { return owner_[v]; }
  std::span<const int> owners() const { return owner_; }
  bool is_root(VertexId v) const { return root_[v] != 0; }

  const Matrix& condensed() const { return condensed_; }
  // Vertex count of each FSU.
  int node_count(int id) const;

  Subgraph subgraph(int id) const;

 private:
  std::shared_ptr<const EquivalentGraph> graph_;
  std::vector<int> owner_;
  std::vector<char> root_;
  std::vector<Fsu> fsus_;
  std::vector<VertexId> unassigned_;
  Matrix condensed_;
};

// Step 1: one provisional FSU per input, merged whenever a state is driven
// by several inputs. Unreached states form the residual list.
FsuCollection select_roots(std::shared_ptr<const EquivalentGraph> g);
// Step 2: attach residual states reachable from assigned states, repeated
// sweeps until nothing changes.
FsuCollection forward_assign(const FsuCollection& coll);
// Step 3: one pass attaching residual states through their outgoing edges.
FsuCollection backward_assign(const FsuCollection& coll);

// Full selection: roots, then alternating forward and backward passes until
// every state is housed.
FsuCollection select_fsus(std::shared_ptr<const EquivalentGraph> g);
FsuCollection select_fsus(const EquivalentGraph& g);

}  // namespace fsupart
