#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fsupart/fsu.hpp"

namespace fsupart {

// Lists of FSU ids, one list per CSU.
using Blocks = std::vector<std::vector<int>>;

// What W_size squares per block: FSU count (the IQP reading, default) or
// vertex count.
enum class SizeMeasure { Fsus, Nodes };

struct IndexConfig {
  double alpha = 1.0;
  std::optional<double> kappa;
  // Applies to the ratio index only; the quadratic index always counts FSUs.
  SizeMeasure size_measure = SizeMeasure::Fsus;

  static IndexConfig from_alpha(double alpha);
  // alpha = (kappa / w_min)^2 with w_min from min_condensed_weight().
  static IndexConfig from_kappa(double kappa, const FsuCollection& coll);
  // alpha must be finite and >= 0. Zero is accepted as the limit case.
  void validate() const;
};

// Smallest nonzero off-diagonal |entry| of the condensed matrix, falling back
// to the smallest nonzero entry when the FSUs are uncoupled.
double min_condensed_weight(const FsuCollection& coll);

struct Components {
  double intra = 0.0;
  double inter = 0.0;
  double size = 0.0;
};

// Sorts members, drops empty blocks and orders blocks by smallest member.
Blocks canonical_blocks(Blocks blocks);

// Non-overlapping control partition of the FSUs of a collection. Blocks are
// kept in canonical order.
class Partition {
 public:
  Partition(std::shared_ptr<const FsuCollection> source, Blocks blocks);
  Partition(const FsuCollection& source, Blocks blocks);

  const Blocks& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const FsuCollection& source() const { return *source_; }
  const std::shared_ptr<const FsuCollection>& source_ptr() const { return source_; }

  // block_of()[fsu] is the block index of the FSU.
  const std::vector<int>& block_of() const { return block_of_; }
  // Node-level components, W_size counted in FSUs.
  const Components& components() const { return cache_; }

  std::vector<VertexId> block_nodes(int b) const;
  Subgraph block_subgraph(int b) const { return Subgraph(source_->graph(), block_nodes(b)); }
  std::vector<int> block_sizes() const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.blocks_ == b.blocks_; }

 private:
  std::shared_ptr<const FsuCollection> source_;
  Blocks blocks_;
  std::vector<int> block_of_;
  Components cache_;
};

Partition singleton_partition(const FsuCollection& coll);
Partition single_block_partition(const FsuCollection& coll);
// Block ids per FSU (any labels) to a partition.
Partition partition_from_labels(const FsuCollection& coll, const std::vector<int>& labels);

// Node-level sums over the equivalent graph, including self edges.
double w_intra(const Partition& p);
// Every cross-block edge is counted from both sides.
double w_inter(const Partition& p);
double w_size(const Partition& p, SizeMeasure measure = SizeMeasure::Fsus);

// W_intra / (1 + W_inter) + alpha / (1 + W_size); an empty partition scores 0.
double index_ratio(const Partition& p, const IndexConfig& cfg);
double index_ratio(const Components& c, double alpha);

// delta(i, m) = 1 iff FSU i sits in block m.
struct AssignmentMatrix {
  Eigen::MatrixXi delta;

  // Throws unless entries are binary and each row sums to one.
  void validate() const;
};

AssignmentMatrix delta_from_partition(const Partition& p);
// Empty columns are dropped.
Partition partition_from_delta(const AssignmentMatrix& d, const FsuCollection& coll);

struct QuadraticTerms {
  double inter = 0.0;
  double intra = 0.0;
  double size = 0.0;
};

// The three IQP sums evaluated term by term over the condensed weights. The
// intra sum counts |w(i,i)| and |w(j,j)| for every pair (i, j) in a block,
// as written.
QuadraticTerms quadratic_terms(const AssignmentMatrix& d, const Matrix& condensed);
// W_inter - W_intra + alpha * W_size, to be minimized.
double index_quadratic(const AssignmentMatrix& d, const FsuCollection& coll, const IndexConfig& cfg);
double index_quadratic(const Partition& p, const IndexConfig& cfg);

}  // namespace fsupart
