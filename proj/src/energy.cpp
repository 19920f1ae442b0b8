#include "demm/energy.hpp"

#include <cmath>

#include "demm/errors.hpp"
#include "demm/linalg.hpp"

namespace demm {
namespace {

void check_rows(const Matrix& h, const RelationViews& views) {
  if (h.rows() != views.degree.size()) {
    throw ParameterError("feature matrix has " + std::to_string(h.rows()) + " rows, graph has " +
                         std::to_string(views.degree.size()) + " nodes");
  }
}

void check_weights(std::span<const RelationViews> views, std::span<const double> weights) {
  if (views.size() != weights.size()) {
    throw ParameterError("expected " + std::to_string(views.size()) + " relation weights, got " +
                         std::to_string(weights.size()));
  }
}

}  // namespace

double dirichlet_energy(const Matrix& h, const RelationViews& views) {
  check_rows(h, views);
  double total = 0.0;
  for (const auto& e : views.edges) {
    const double su = 1.0 / std::sqrt(views.degree[e.u]);
    const double sv = 1.0 / std::sqrt(views.degree[e.v]);
    total += (h.row(e.u) * su - h.row(e.v) * sv).squaredNorm();
  }
  return total;
}

double dirichlet_energy_trace(const Matrix& h, const RelationViews& views) {
  check_rows(h, views);
  double diag = 0.0;
  for (Index i = 0; i < h.rows(); ++i) {
    if (views.degree[i] > 0.0) diag += h.row(i).squaredNorm();
  }
  const Matrix ah = views.norm_adj * h;
  return diag - (h.array() * ah.array()).sum();
}

double incidence_energy(const Matrix& h, const RelationViews& views) {
  check_rows(h, views);
  const Matrix proj = views.incidence.transpose() * h;
  return proj.squaredNorm();
}

double mrde(const Matrix& h, std::span<const RelationViews> views, std::span<const double> weights) {
  check_weights(views, weights);
  double total = 0.0;
  for (std::size_t r = 0; r < views.size(); ++r) total += weights[r] * dirichlet_energy(h, views[r]);
  return total;
}

EnergyReport energy_report(const Matrix& h, const Matrix& x, std::span<const RelationViews> views,
                           std::span<const double> weights, double alpha, double beta) {
  check_weights(views, weights);
  if (h.rows() != x.rows() || h.cols() != x.cols()) {
    throw ParameterError("energy_report: H and X shapes differ");
  }
  EnergyReport rep;
  rep.per_relation.reserve(views.size());
  for (std::size_t r = 0; r < views.size(); ++r) {
    rep.per_relation.push_back(dirichlet_energy(h, views[r]));
    rep.mrde += weights[r] * rep.per_relation.back();
    rep.reg += weights[r] * views[r].fro_sq;
  }
  rep.fit = (h - x).squaredNorm();
  rep.total = rep.fit + alpha * rep.mrde + beta * rep.reg;
  return rep;
}

double ome_from_spectrum(const Vector& eigenvalues, int l1, int l2) {
  double best = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double lam = eigenvalues[i];
    best = std::max(best, std::abs(std::pow(lam, l1) - std::pow(lam, l2)));
  }
  return best;
}

double ome(const SparseMatrix& norm_adj, int l1, int l2, Index dense_cap) {
  if (l1 < 0 || l2 < 0) throw ParameterError("ome: powers must be non-negative");
  if (norm_adj.rows() > dense_cap) {
    throw CapabilityError("ome: n=" + std::to_string(norm_adj.rows()) +
                          " exceeds the dense spectrum cap of " + std::to_string(dense_cap) +
                          "; estimate on a sampled subgraph instead");
  }
  return ome_from_spectrum(symmetric_spectrum(Matrix(norm_adj)), l1, l2);
}

}  // namespace demm
