#include "fsupart/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <iomanip>

#include "fsupart/error.hpp"

namespace fsupart {

EquivalentGraph::EquivalentGraph(int n, int p, std::vector<Edge> edges,
                                 std::vector<double> state_labels,
                                 std::optional<TimeTag> time_tag)
    : n_(n), p_(p), edges_(std::move(edges)), time_tag_(std::move(time_tag)) {
  if (n < 0 || p < 0) throw Error("dimension_mismatch", "negative vertex count");
  const int nv = n + p;
  std::erase_if(edges_, [](const Edge& e) { return e.weight == 0.0; });
  for (const auto& e : edges_) {
    if (e.source < 0 || e.source >= nv || e.target < 0 || e.target >= nv) {
      throw Error("invalid_edge", "edge endpoint out of range", {e.source, e.target});
    }
    if (is_input(e.target)) {
      throw Error("invalid_edge", "edge " + vertex_name(e.source) + "->" +
                                      vertex_name(e.target) + " ends in an input vertex",
                  {e.source, e.target});
    }
    if (!std::isfinite(e.weight)) {
      throw Error("non_finite", "edge weight is not finite", {e.source, e.target});
    }
  }
  auto key = [](const Edge& e) { return std::pair(e.source, e.target); };
  std::sort(edges_.begin(), edges_.end(),
            [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
  auto dup = std::adjacent_find(edges_.begin(), edges_.end(),
                                [&](const Edge& a, const Edge& b) { return key(a) == key(b); });
  if (dup != edges_.end()) {
    throw Error("invalid_edge", "duplicate edge", {dup->source, dup->target});
  }

  by_target_ = edges_;
  std::stable_sort(by_target_.begin(), by_target_.end(),
                   [](const Edge& a, const Edge& b) { return a.target < b.target; });

  out_offsets_.assign(nv + 1, 0);
  in_offsets_.assign(nv + 1, 0);
  for (const auto& e : edges_) {
    ++out_offsets_[e.source + 1];
    ++in_offsets_[e.target + 1];
  }
  for (int v = 0; v < nv; ++v) {
    out_offsets_[v + 1] += out_offsets_[v];
    in_offsets_[v + 1] += in_offsets_[v];
  }

  if (state_labels.empty()) state_labels.assign(n, 0.0);
  if (static_cast<int>(state_labels.size()) != n) {
    throw Error("dimension_mismatch", "label vector has wrong length");
  }
  labels_ = std::move(state_labels);
}

std::span<const Edge> EquivalentGraph::out_edges(VertexId v) const {
  return std::span<const Edge>(edges_).subspan(out_offsets_[v],
                                               out_offsets_[v + 1] - out_offsets_[v]);
}

std::span<const Edge> EquivalentGraph::in_edges(VertexId v) const {
  return std::span<const Edge>(by_target_)
      .subspan(in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]);
}

std::span<const Edge> EquivalentGraph::input_state_edges() const {
  return std::span<const Edge>(edges_).first(out_offsets_[p_]);
}

std::span<const Edge> EquivalentGraph::state_state_edges() const {
  return std::span<const Edge>(edges_).subspan(out_offsets_[p_]);
}

double EquivalentGraph::weight(VertexId s, VertexId t) const {
  if (s < 0 || s >= num_vertices()) return 0.0;
  auto out = out_edges(s);
  auto it = std::lower_bound(out.begin(), out.end(), t,
                             [](const Edge& e, VertexId v) { return e.target < v; });
  return (it != out.end() && it->target == t) ? it->weight : 0.0;
}

double EquivalentGraph::total_mass() const {
  double total = 0.0;
  for (const auto& e : edges_) total += std::abs(e.weight);
  return total;
}

std::string EquivalentGraph::vertex_name(VertexId v) const {
  if (is_input(v)) return "u" + std::to_string(v + 1);
  return "x" + std::to_string(v - p_ + 1);
}

bool operator==(const EquivalentGraph& a, const EquivalentGraph& b) {
  return a.n_ == b.n_ && a.p_ == b.p_ && a.edges_ == b.edges_ && a.labels_ == b.labels_;
}

namespace {

// Exact nonzero test: B(j,i) -> u_i -> x_j, A(j,i) -> x_i -> x_j.
std::vector<Edge> edges_from_matrices(const Matrix& A, const Matrix& B, double zero_tol) {
  const int n = static_cast<int>(A.rows());
  const int p = static_cast<int>(B.cols());
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = B(j, i);
      if (std::abs(w) > zero_tol) edges.push_back({i, p + j, w});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = A(j, i);
      if (std::abs(w) > zero_tol) edges.push_back({p + i, p + j, w});
    }
  }
  return edges;
}

}  // namespace

EquivalentGraph build_linear_graph(const LinearModel& model) {
  validate(model);
  return EquivalentGraph(model.n(), model.p(), edges_from_matrices(model.A, model.B, 0.0));
}

EquivalentGraph build_pwa_graph(const PwaModel& model, std::size_t mode) {
  validate(model);
  if (mode >= model.modes.size()) {
    throw Error("mode_out_of_range",
                "mode " + std::to_string(mode) + " out of range [0, " +
                    std::to_string(model.modes.size()) + ")",
                {static_cast<long>(mode)});
  }
  const auto& m = model.modes[mode];
  std::vector<double> labels(m.A.rows(), 0.0);
  for (long j = 0; j < m.g.size(); ++j) labels[j] = m.g(j);
  return EquivalentGraph(model.n(), model.p(), edges_from_matrices(m.A, m.B, 0.0),
                         std::move(labels));
}

EquivalentGraph build_differentiable_graph(const DifferentiableModel& model, const Vector& x,
                                           const Vector& u, double zero_tol) {
  validate(SystemModel{model});
  if (x.size() != model.n || u.size() != model.p) {
    throw Error("dimension_mismatch", "evaluation point has wrong dimension");
  }
  const Jacobian jac = model.jacobian(x, u);
  if (jac.dfdx.rows() != model.n || jac.dfdx.cols() != model.n || jac.dfdu.rows() != model.n ||
      jac.dfdu.cols() != model.p) {
    throw Error("dimension_mismatch", "Jacobian evaluator returned blocks of wrong shape");
  }
  for (int j = 0; j < model.n; ++j) {
    for (int i = 0; i < model.n; ++i) {
      if (!std::isfinite(jac.dfdx(j, i))) {
        throw Error("non_finite_jacobian",
                    "df" + std::to_string(j + 1) + "/dx" + std::to_string(i + 1) +
                        " is not finite",
                    {j, i});
      }
    }
    for (int i = 0; i < model.p; ++i) {
      if (!std::isfinite(jac.dfdu(j, i))) {
        throw Error("non_finite_jacobian",
                    "df" + std::to_string(j + 1) + "/du" + std::to_string(i + 1) +
                        " is not finite",
                    {j, i});
      }
    }
  }
  std::vector<double> labels(model.n, 0.0);
  for (long j = 0; j < model.g.size(); ++j) labels[j] = model.g(j);
  return EquivalentGraph(model.n, model.p, edges_from_matrices(jac.dfdx, jac.dfdu, zero_tol),
                         std::move(labels), TimeTag{x, u});
}

TopologySignature::TopologySignature(int n, int p)
    : n_(n), p_(p), words_((static_cast<std::size_t>(n) * (n + p) + 63) / 64, 0) {}

std::size_t TopologySignature::bit_index(VertexId source, VertexId target) const {
  return static_cast<std::size_t>(source) * n_ + static_cast<std::size_t>(target - p_);
}

void TopologySignature::set(VertexId source, VertexId target) {
  const auto b = bit_index(source, target);
  words_[b / 64] |= std::uint64_t{1} << (b % 64);
}

bool TopologySignature::test(VertexId source, VertexId target) const {
  const auto b = bit_index(source, target);
  return (words_[b / 64] >> (b % 64)) & 1u;
}

std::size_t TopologySignature::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

std::string TopologySignature::hex() const {
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (auto it = words_.rbegin(); it != words_.rend(); ++it) os << std::setw(16) << *it;
  return os.str();
}

TopologySignature topology_signature(const EquivalentGraph& g) {
  TopologySignature sig(g.num_states(), g.num_inputs());
  for (const auto& e : g.edges()) sig.set(e.source, e.target);
  return sig;
}

long topology_bound_log2(int n, int p, bool self_edges) {
  return static_cast<long>(n) * (n + p - (self_edges ? 0 : 1));
}

std::optional<std::uint64_t> topology_bound(int n, int p, bool self_edges) {
  const long bits = topology_bound_log2(n, p, self_edges);
  if (bits >= 64) return std::nullopt;
  return std::uint64_t{1} << bits;
}

std::size_t count_distinct_topologies(const PwaModel& model) {
  std::set<TopologySignature> seen;
  for (std::size_t q = 0; q < model.modes.size(); ++q) {
    seen.insert(topology_signature(build_pwa_graph(model, q)));
  }
  return seen.size();
}

Subgraph::Subgraph(const EquivalentGraph& parent, std::vector<VertexId> nodes)
    : parent_(&parent), nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  for (auto v : nodes_) {
    if (v < 0 || v >= parent.num_vertices()) {
      throw Error("invalid_vertex", "vertex " + std::to_string(v) + " not in parent graph", {v});
    }
  }
}

bool Subgraph::contains(VertexId v) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), v);
}

std::vector<Edge> Subgraph::edges() const {
  std::vector<Edge> out;
  for (auto v : nodes_) {
    for (const auto& e : parent_->out_edges(v)) {
      if (contains(e.target)) out.push_back(e);
    }
  }
  return out;
}

std::vector<VertexId> Subgraph::input_nodes() const {
  std::vector<VertexId> out;
  for (auto v : nodes_) {
    if (parent_->is_input(v)) out.push_back(v);
  }
  return out;
}

std::vector<VertexId> Subgraph::state_nodes() const {
  std::vector<VertexId> out;
  for (auto v : nodes_) {
    if (parent_->is_state(v)) out.push_back(v);
  }
  return out;
}

Subgraph aggregate(const Subgraph& a, const Subgraph& b) {
  if (&a.parent() != &b.parent()) {
    throw Error("parent_mismatch", "cannot aggregate subgraphs of different graphs");
  }
  std::vector<VertexId> merged;
  std::set_union(a.nodes().begin(), a.nodes().end(), b.nodes().begin(), b.nodes().end(),
                 std::back_inserter(merged));
  return Subgraph(a.parent(), std::move(merged));
}

bool is_csu(const Subgraph& s) {
  const auto& g = s.parent();
  for (auto v : s.nodes()) {
    if (g.is_input(v)) {
      for (const auto& e : g.out_edges(v)) {
        if (!s.contains(e.target)) return false;
      }
    } else {
      for (const auto& e : g.in_edges(v)) {
        if (g.is_input(e.source) && !s.contains(e.source)) return false;
      }
    }
  }
  return true;
}

std::vector<VertexId> frontier(const Subgraph& s) {
  const auto& g = s.parent();
  std::vector<VertexId> out;
  for (auto v : s.nodes()) {
    auto outside = [&](const Edge& e) {
      return !s.contains(e.source) || !s.contains(e.target);
    };
    auto oe = g.out_edges(v);
    auto ie = g.in_edges(v);
    if (std::any_of(oe.begin(), oe.end(), outside) || std::any_of(ie.begin(), ie.end(), outside)) {
      out.push_back(v);
    }
  }
  return out;
}

std::vector<VertexId> neighbors(const Subgraph& s) {
  const auto& g = s.parent();
  std::vector<VertexId> out;
  for (auto v : s.nodes()) {
    for (const auto& e : g.out_edges(v)) {
      if (!s.contains(e.target)) out.push_back(e.target);
    }
    for (const auto& e : g.in_edges(v)) {
      if (!s.contains(e.source)) out.push_back(e.source);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace fsupart
