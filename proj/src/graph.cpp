#include "demm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "demm/errors.hpp"

namespace demm {

MultiRelGraph::MultiRelGraph(Index n_nodes, std::vector<Relation> relations,
                             std::optional<Matrix> attributes,
                             std::optional<std::vector<int>> labels)
    : n_nodes_(n_nodes),
      relations_(std::move(relations)),
      attributes_(std::move(attributes)),
      labels_(std::move(labels)) {
  if (n_nodes_ < 0) throw DataError("negative node count");
  for (auto& rel : relations_) {
    for (auto& e : rel.edges) {
      if (e.u < 0 || e.v < 0 || e.u >= n_nodes_ || e.v >= n_nodes_) {
        throw DataError("relation '" + rel.name + "': node id out of range in edge (" +
                        std::to_string(e.u) + ", " + std::to_string(e.v) + ")");
      }
      if (e.u == e.v) {
        throw DataError("relation '" + rel.name + "': self-loop on node " + std::to_string(e.u));
      }
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(rel.edges.begin(), rel.edges.end());
    auto dup = std::adjacent_find(rel.edges.begin(), rel.edges.end());
    if (dup != rel.edges.end()) {
      throw DataError("relation '" + rel.name + "': duplicate edge (" + std::to_string(dup->u) +
                      ", " + std::to_string(dup->v) + ")");
    }
  }
  if (attributes_ && attributes_->rows() != n_nodes_) {
    throw DataError("attribute matrix has " + std::to_string(attributes_->rows()) +
                    " rows, expected " + std::to_string(n_nodes_));
  }
  if (labels_ && static_cast<Index>(labels_->size()) != n_nodes_) {
    throw DataError("label vector has " + std::to_string(labels_->size()) +
                    " entries, expected " + std::to_string(n_nodes_));
  }
}

Index MultiRelGraph::total_edges() const {
  Index m = 0;
  for (const auto& rel : relations_) m += static_cast<Index>(rel.edges.size());
  return m;
}

const Matrix& MultiRelGraph::attributes() const {
  if (!attributes_) throw ParameterError("graph has no attributes");
  return *attributes_;
}

const std::vector<int>& MultiRelGraph::labels() const {
  if (!labels_) throw ParameterError("graph has no labels");
  return *labels_;
}

MultiRelGraph MultiRelGraph::without_attributes() const {
  return MultiRelGraph(n_nodes_, relations_, std::nullopt, labels_);
}

RelationViews build_relation_views(Index n_nodes, std::span<const Edge> edges) {
  RelationViews views;
  views.edges.assign(edges.begin(), edges.end());
  views.degree = Vector::Zero(n_nodes);
  for (const auto& e : edges) {
    views.degree[e.u] += 1.0;
    views.degree[e.v] += 1.0;
  }
  Vector inv_sqrt(n_nodes);
  for (Index i = 0; i < n_nodes; ++i) {
    inv_sqrt[i] = views.degree[i] > 0.0 ? 1.0 / std::sqrt(views.degree[i]) : 0.0;
  }

  const auto m = static_cast<Index>(edges.size());
  std::vector<Eigen::Triplet<double, int>> adj;
  std::vector<Eigen::Triplet<double, int>> inc;
  adj.reserve(static_cast<std::size_t>(2 * m));
  inc.reserve(static_cast<std::size_t>(2 * m));
  for (Index col = 0; col < m; ++col) {
    const auto& e = edges[static_cast<std::size_t>(col)];
    const double w = inv_sqrt[e.u] * inv_sqrt[e.v];
    adj.emplace_back(e.u, e.v, w);
    adj.emplace_back(e.v, e.u, w);
    inc.emplace_back(e.u, static_cast<int>(col), inv_sqrt[e.u]);
    inc.emplace_back(e.v, static_cast<int>(col), -inv_sqrt[e.v]);
  }
  views.norm_adj.resize(n_nodes, n_nodes);
  views.norm_adj.setFromTriplets(adj.begin(), adj.end());
  views.norm_adj.makeCompressed();
  views.incidence.resize(n_nodes, m);
  views.incidence.setFromTriplets(inc.begin(), inc.end());
  views.incidence.makeCompressed();

  double fro = 0.0;
  for (Index k = 0; k < views.norm_adj.nonZeros(); ++k) {
    const double x = views.norm_adj.valuePtr()[k];
    fro += x * x;
  }
  views.fro_sq = fro;
  return views;
}

std::vector<RelationViews> build_views(const MultiRelGraph& graph) {
  std::vector<RelationViews> out;
  out.reserve(graph.relations().size());
  for (const auto& rel : graph.relations()) {
    out.push_back(build_relation_views(graph.n_nodes(), rel.edges));
  }
  return out;
}

MultiRelGraph synth_mrg(const SynthParams& p) {
  if (p.k < 1 || p.nodes_per_cluster < 1) throw ParameterError("synth: k and nodes_per_cluster must be >= 1");
  if (p.p_in.size() != p.p_out.size() || p.p_in.empty()) {
    throw ParameterError("synth: p_in and p_out must list one probability per relation");
  }
  for (std::size_t r = 0; r < p.p_in.size(); ++r) {
    if (p.p_in[r] < 0.0 || p.p_in[r] > 1.0 || p.p_out[r] < 0.0 || p.p_out[r] > 1.0) {
      throw ParameterError("synth: edge probabilities must lie in [0, 1]");
    }
  }
  if (p.attr_dim < 0) throw ParameterError("synth: attr_dim must be >= 0");

  const int n = p.k * p.nodes_per_cluster;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i / p.nodes_per_cluster;

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<Relation> relations;
  for (std::size_t r = 0; r < p.p_in.size(); ++r) {
    Relation rel;
    rel.name = "rel" + std::to_string(r);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double prob = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]
                                ? p.p_in[r]
                                : p.p_out[r];
        if (unif(rng) < prob) rel.edges.push_back({i, j});
      }
    }
    relations.push_back(std::move(rel));
  }

  std::optional<Matrix> attrs;
  if (p.attr_dim > 0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Centers sit at distance attr_sep from each other: scaled basis vectors
    // when there is room, random directions otherwise.
    Matrix centers = Matrix::Zero(p.k, p.attr_dim);
    const double radius = p.attr_sep / std::sqrt(2.0);
    for (int c = 0; c < p.k; ++c) {
      if (p.attr_dim >= p.k) {
        centers(c, c) = radius;
      } else {
        Vector dir(p.attr_dim);
        for (int j = 0; j < p.attr_dim; ++j) dir[j] = gauss(rng);
        centers.row(c) = radius * dir.normalized().transpose();
      }
    }
    Matrix x(n, p.attr_dim);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p.attr_dim; ++j) {
        x(i, j) = centers(labels[static_cast<std::size_t>(i)], j) + p.attr_noise * gauss(rng);
      }
    }
    attrs = std::move(x);
  }
  return MultiRelGraph(n, std::move(relations), std::move(attrs), std::move(labels));
}

MultiRelGraph synth_mrg(int k, int nodes_per_cluster, double p_in, std::vector<double> p_out,
                        int attr_dim, double attr_sep, std::uint64_t seed) {
  SynthParams p;
  p.k = k;
  p.nodes_per_cluster = nodes_per_cluster;
  p.p_in.assign(p_out.size(), p_in);
  p.p_out = std::move(p_out);
  p.attr_dim = attr_dim;
  p.attr_sep = attr_sep;
  p.seed = seed;
  return synth_mrg(p);
}

}  // namespace demm
