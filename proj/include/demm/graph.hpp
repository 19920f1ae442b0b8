#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "demm/types.hpp"

namespace demm {

// Undirected edge stored once with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Relation {
  std::string name;
  std::vector<Edge> edges;  // sorted, unique, u < v
};

/// A node set shared by R typed edge sets, with optional attributes and
/// ground-truth labels. Immutable once constructed.
///
/// The constructor canonicalizes edge orientation and sorts each edge list.
/// Self-loops, duplicate edges, out-of-range ids, and attribute/label row
/// count mismatches raise DataError.
class MultiRelGraph {
 public:
  MultiRelGraph(Index n_nodes, std::vector<Relation> relations,
                std::optional<Matrix> attributes = std::nullopt,
                std::optional<std::vector<int>> labels = std::nullopt);

  Index n_nodes() const { return n_nodes_; }
  Index n_relations() const { return static_cast<Index>(relations_.size()); }
  const std::vector<Relation>& relations() const { return relations_; }
  const Relation& relation(Index r) const { return relations_.at(static_cast<std::size_t>(r)); }
  Index total_edges() const;

  bool has_attributes() const { return attributes_.has_value(); }
  const Matrix& attributes() const;
  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const;

  // Same structure and labels, attributes removed.
  MultiRelGraph without_attributes() const;

 private:
  Index n_nodes_;
  std::vector<Relation> relations_;
  std::optional<Matrix> attributes_;
  std::optional<std::vector<int>> labels_;
};

// Per-relation matrices derived from one edge set. Nodes of degree zero get
// all-zero rows in norm_adj and incidence.
struct RelationViews {
  std::vector<Edge> edges;
  Vector degree;
  SparseMatrix norm_adj;   // D^{-1/2} A D^{-1/2}
  SparseMatrix incidence;  // N x M, column e = (+1/sqrt(d_u), -1/sqrt(d_v))
  double fro_sq = 0.0;     // squared Frobenius norm of norm_adj
};

RelationViews build_relation_views(Index n_nodes, std::span<const Edge> edges);
std::vector<RelationViews> build_views(const MultiRelGraph& graph);

struct SynthParams {
  int k = 2;
  int nodes_per_cluster = 10;
  // Per relation: within-cluster and between-cluster edge probability.
  // A relation with p_in == p_out carries no cluster signal.
  std::vector<double> p_in{1.0};
  std::vector<double> p_out{0.0};
  int attr_dim = 0;  // 0 builds an attribute-less graph
  double attr_sep = 4.0;
  double attr_noise = 1.0;
  std::uint64_t seed = 0;
};

/// Planted-partition multi-relational graph with Gaussian attribute blobs.
/// Nodes are laid out cluster by cluster, so labels form contiguous blocks.
MultiRelGraph synth_mrg(const SynthParams& params);

/// Convenience for the common case of one p_in shared by all relations.
MultiRelGraph synth_mrg(int k, int nodes_per_cluster, double p_in,
                        std::vector<double> p_out, int attr_dim, double attr_sep,
                        std::uint64_t seed);

}  // namespace demm
