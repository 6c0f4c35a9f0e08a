#include "fsupart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fsupart/error.hpp"

namespace fsupart {

IndexConfig IndexConfig::from_alpha(double alpha) {
  IndexConfig cfg;
  cfg.alpha = alpha;
  cfg.validate();
  return cfg;
}

IndexConfig IndexConfig::from_kappa(double kappa, const FsuCollection& coll) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw Error("invalid_argument", "kappa must be positive");
  }
  const double w_min = min_condensed_weight(coll);
  IndexConfig cfg;
  cfg.kappa = kappa;
  cfg.alpha = (kappa / w_min) * (kappa / w_min);
  cfg.validate();
  return cfg;
}

void IndexConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw Error("invalid_argument", "alpha must be finite and non-negative");
  }
}

double min_condensed_weight(const FsuCollection& coll) {
  const Matrix& c = coll.condensed();
  double off = std::numeric_limits<double>::infinity();
  double any = off;
  for (long i = 0; i < c.rows(); ++i) {
    for (long j = 0; j < c.cols(); ++j) {
      const double w = std::abs(c(i, j));
      if (w == 0.0) continue;
      any = std::min(any, w);
      if (i != j) off = std::min(off, w);
    }
  }
  if (std::isfinite(off)) return off;
  if (std::isfinite(any)) return any;
  throw Error("invalid_argument", "condensed graph has no edges; kappa is undefined");
}

Blocks canonical_blocks(Blocks blocks) {
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return blocks;
}

Partition::Partition(std::shared_ptr<const FsuCollection> source, Blocks blocks)
    : source_(std::move(source)), blocks_(canonical_blocks(std::move(blocks))) {
  if (!source_) throw Error("invalid_argument", "null FSU collection");
  const int n = static_cast<int>(source_->size());
  block_of_.assign(n, -1);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (int f : blocks_[b]) {
      if (f < 0 || f >= n) {
        throw Error("invalid_partition", "FSU id " + std::to_string(f) + " out of range", {f});
      }
      if (block_of_[f] >= 0) {
        throw Error("invalid_partition", "FSU " + std::to_string(f) + " appears in two blocks",
                    {f});
      }
      block_of_[f] = static_cast<int>(b);
    }
  }
  for (int f = 0; f < n; ++f) {
    if (block_of_[f] < 0) {
      throw Error("invalid_partition", "FSU " + std::to_string(f) + " is in no block", {f});
    }
  }
  cache_.intra = w_intra(*this);
  cache_.inter = w_inter(*this);
  cache_.size = w_size(*this, SizeMeasure::Fsus);
}

Partition::Partition(const FsuCollection& source, Blocks blocks)
    : Partition(std::make_shared<const FsuCollection>(source), std::move(blocks)) {}

std::vector<VertexId> Partition::block_nodes(int b) const {
  std::vector<VertexId> out;
  for (int f : blocks_[b]) {
    const auto nodes = (*source_)[f].nodes();
    out.insert(out.end(), nodes.begin(), nodes.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> out;
  for (const auto& b : blocks_) out.push_back(static_cast<int>(b.size()));
  return out;
}

Partition singleton_partition(const FsuCollection& coll) {
  Blocks blocks;
  for (std::size_t f = 0; f < coll.size(); ++f) blocks.push_back({static_cast<int>(f)});
  return Partition(coll, std::move(blocks));
}

Partition single_block_partition(const FsuCollection& coll) {
  Blocks blocks(1);
  for (std::size_t f = 0; f < coll.size(); ++f) blocks[0].push_back(static_cast<int>(f));
  return Partition(coll, std::move(blocks));
}

Partition partition_from_labels(const FsuCollection& coll, const std::vector<int>& labels) {
  if (labels.size() != coll.size()) {
    throw Error("dimension_mismatch", "label vector length differs from FSU count");
  }
  int top = -1;
  for (int l : labels) {
    if (l < 0) throw Error("invalid_partition", "negative block label");
    top = std::max(top, l);
  }
  Blocks blocks(top + 1);
  for (std::size_t f = 0; f < labels.size(); ++f) blocks[labels[f]].push_back(static_cast<int>(f));
  return Partition(coll, std::move(blocks));
}

namespace {

// Block index of a vertex.
int vertex_block(const Partition& p, VertexId v) {
  return p.block_of()[p.source().owner(v)];
}

}  // namespace

double w_intra(const Partition& p) {
  const auto& g = p.source().graph();
  double total = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    for (VertexId s : p.block_nodes(static_cast<int>(b))) {
      for (const auto& e : g.out_edges(s)) {
        if (vertex_block(p, e.target) == static_cast<int>(b)) total += std::abs(e.weight);
      }
    }
  }
  return total;
}

double w_inter(const Partition& p) {
  const auto& g = p.source().graph();
  double total = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    const int self = static_cast<int>(b);
    for (VertexId s : frontier(p.block_subgraph(self))) {
      for (const auto& e : g.out_edges(s)) {
        if (vertex_block(p, e.target) != self) total += std::abs(e.weight);
      }
      for (const auto& e : g.in_edges(s)) {
        if (vertex_block(p, e.source) != self) total += std::abs(e.weight);
      }
    }
  }
  return total;
}

double w_size(const Partition& p, SizeMeasure measure) {
  double total = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    double s = 0.0;
    if (measure == SizeMeasure::Fsus) {
      s = static_cast<double>(p.blocks()[b].size());
    } else {
      for (int f : p.blocks()[b]) s += p.source().node_count(f);
    }
    total += s * s;
  }
  return total;
}

double index_ratio(const Components& c, double alpha) {
  return c.intra / (1.0 + c.inter) + alpha / (1.0 + c.size);
}

double index_ratio(const Partition& p, const IndexConfig& cfg) {
  if (p.size() == 0) return 0.0;
  Components c = p.components();
  if (cfg.size_measure == SizeMeasure::Nodes) c.size = w_size(p, SizeMeasure::Nodes);
  return index_ratio(c, cfg.alpha);
}

void AssignmentMatrix::validate() const {
  for (long i = 0; i < delta.rows(); ++i) {
    int sum = 0;
    for (long m = 0; m < delta.cols(); ++m) {
      const int v = delta(i, m);
      if (v != 0 && v != 1) {
        throw Error("invalid_assignment", "delta entries must be 0 or 1", {i, m});
      }
      sum += v;
    }
    if (sum != 1) {
      throw Error("invalid_assignment",
                  "row " + std::to_string(i) + " of delta sums to " + std::to_string(sum), {i});
    }
  }
}

AssignmentMatrix delta_from_partition(const Partition& p) {
  const long n = static_cast<long>(p.source().size());
  AssignmentMatrix d{Eigen::MatrixXi::Zero(n, n)};
  for (long i = 0; i < n; ++i) d.delta(i, p.block_of()[i]) = 1;
  return d;
}

Partition partition_from_delta(const AssignmentMatrix& d, const FsuCollection& coll) {
  d.validate();
  if (d.delta.rows() != static_cast<long>(coll.size())) {
    throw Error("dimension_mismatch", "delta has wrong number of rows");
  }
  Blocks blocks(d.delta.cols());
  for (long i = 0; i < d.delta.rows(); ++i) {
    for (long m = 0; m < d.delta.cols(); ++m) {
      if (d.delta(i, m)) blocks[m].push_back(static_cast<int>(i));
    }
  }
  return Partition(coll, std::move(blocks));
}

QuadraticTerms quadratic_terms(const AssignmentMatrix& d, const Matrix& condensed) {
  d.validate();
  const long n = d.delta.rows();
  const long cols = d.delta.cols();
  if (condensed.rows() != n || condensed.cols() != n) {
    throw Error("dimension_mismatch", "condensed matrix does not match delta");
  }
  auto w = [&](long i, long j) { return std::abs(condensed(i, j)); };
  QuadraticTerms t;
  for (long m = 0; m < cols; ++m) {
    for (long i = 0; i < n; ++i) {
      if (!d.delta(i, m)) continue;
      for (long j = 0; j < n; ++j) {
        if (d.delta(j, m)) t.intra += w(i, i) + w(i, j) + w(j, i) + w(j, j);
        if (j == i) continue;
        for (long l = 0; l < cols; ++l) {
          if (l != m && d.delta(j, l)) t.inter += w(i, j) + w(j, i);
        }
      }
    }
    double count = 0.0;
    for (long i = 0; i < n; ++i) count += d.delta(i, m);
    t.size += count * count;
  }
  return t;
}

double index_quadratic(const AssignmentMatrix& d, const FsuCollection& coll,
                       const IndexConfig& cfg) {
  const auto t = quadratic_terms(d, coll.condensed());
  return t.inter - t.intra + cfg.alpha * t.size;
}

double index_quadratic(const Partition& p, const IndexConfig& cfg) {
  return index_quadratic(delta_from_partition(p), p.source(), cfg);
}

}  // namespace fsupart
