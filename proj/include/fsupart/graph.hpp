#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsupart/system.hpp"

namespace fsupart {

// Vertices are numbered inputs first: u_i -> i, x_j -> p + j (zero based).
using VertexId = int;

struct Edge {
  VertexId source;
  VertexId target;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Point at which a state-dependent graph was evaluated.
struct TimeTag {
  Vector x;
  Vector u;
};

inline constexpr double kDefaultZeroTol = 1e-12;

// Weighted directed graph with one vertex per input and per state. Edges are
// stored once, sorted by (source, target), and only where the weight is
// nonzero. No edge ever ends in an input vertex.
class EquivalentGraph {
 public:
  EquivalentGraph() = default;
  EquivalentGraph(int n, int p, std::vector<Edge> edges, std::vector<double> state_labels = {},
                  std::optional<TimeTag> time_tag = std::nullopt);

  int num_states() const { return n_; }
  int num_inputs() const { return p_; }
  int num_vertices() const { return n_ + p_; }

  VertexId input_vertex(int i) const { return i; }
  VertexId state_vertex(int j) const { return p_ + j; }
  bool is_input(VertexId v) const { return v >= 0 && v < p_; }
  bool is_state(VertexId v) const { return v >= p_ && v < p_ + n_; }
  int state_index(VertexId v) const { return v - p_; }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Edge> out_edges(VertexId v) const;
  // Incoming edges of v, sorted by source.
  std::span<const Edge> in_edges(VertexId v) const;
  // E_ux and E_xx: the sorted edge list splits at the first state source.
  std::span<const Edge> input_state_edges() const;
  std::span<const Edge> state_state_edges() const;

  // w(s,t), zero when there is no edge.
  double weight(VertexId s, VertexId t) const;
  bool has_edge(VertexId s, VertexId t) const { return weight(s, t) != 0.0; }

  double label(VertexId v) const { return is_state(v) ? labels_[state_index(v)] : 0.0; }
  const std::optional<TimeTag>& time_tag() const { return time_tag_; }

  // Sum of |w| over all edges.
  double total_mass() const;
  // u1..up, x1..xn
  std::string vertex_name(VertexId v) const;

  friend bool operator==(const EquivalentGraph& a, const EquivalentGraph& b);

 private:
  int n_ = 0;
  int p_ = 0;
  std::vector<Edge> edges_;
  std::vector<Edge> by_target_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<double> labels_;
  std::optional<TimeTag> time_tag_;
};

EquivalentGraph build_linear_graph(const LinearModel& model);
// `mode` is zero based.
EquivalentGraph build_pwa_graph(const PwaModel& model, std::size_t mode);
EquivalentGraph build_differentiable_graph(const DifferentiableModel& model, const Vector& x,
                                           const Vector& u, double zero_tol = kDefaultZeroTol);

// Support of the graph as a bitset over V x V_x, independent of the weights.
class TopologySignature {
 public:
  TopologySignature(int n, int p);

  void set(VertexId source, VertexId target);
  bool test(VertexId source, VertexId target) const;
  std::size_t count() const;
  std::string hex() const;

  friend bool operator==(const TopologySignature&, const TopologySignature&) = default;
  friend bool operator<(const TopologySignature& a, const TopologySignature& b) {
    return a.words_ < b.words_;
  }

 private:
  std::size_t bit_index(VertexId source, VertexId target) const;

  int n_;
  int p_;
  std::vector<std::uint64_t> words_;
};

TopologySignature topology_signature(const EquivalentGraph& g);

// log2 of the number of possible topologies: n(n+p), or n(n+p-1) without
// self edges.
long topology_bound_log2(int n, int p, bool self_edges = true);
// The bound itself when it fits in 64 bits.
std::optional<std::uint64_t> topology_bound(int n, int p, bool self_edges = true);
std::size_t count_distinct_topologies(const PwaModel& model);

// Vertex subset of a parent graph. Induced edges are read from the parent on
// demand; the parent must outlive the subgraph.
class Subgraph {
 public:
  Subgraph(const EquivalentGraph& parent, std::vector<VertexId> nodes);

  const EquivalentGraph& parent() const { return *parent_; }
  std::span<const VertexId> nodes() const { return nodes_; }
  bool contains(VertexId v) const;
  std::size_t size() const { return nodes_.size(); }

  std::vector<Edge> edges() const;
  std::vector<VertexId> input_nodes() const;
  std::vector<VertexId> state_nodes() const;

  friend bool operator==(const Subgraph& a, const Subgraph& b) {
    return a.parent_ == b.parent_ && a.nodes_ == b.nodes_;
  }

 private:
  const EquivalentGraph* parent_;
  std::vector<VertexId> nodes_;  // sorted, unique
};

Subgraph aggregate(const Subgraph& a, const Subgraph& b);
bool is_csu(const Subgraph& s);
// Nodes of s with an edge to or from a vertex outside s.
std::vector<VertexId> frontier(const Subgraph& s);
// Vertices outside s adjacent to some node of s.
std::vector<VertexId> neighbors(const Subgraph& s);

}  // namespace fsupart
