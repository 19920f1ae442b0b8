#pragma once

#include <span>
#include <vector>

#include "demm/graph.hpp"
#include "demm/types.hpp"

namespace demm {

struct EnergyReport {
  std::vector<double> per_relation;  // Dirichlet energy on each relation
  double mrde = 0.0;                 // sum_r w_r * per_relation[r]
  double fit = 0.0;                  // ||H - X||_F^2
  double reg = 0.0;                  // sum_r w_r * ||Ahat_r||_F^2
  double total = 0.0;                // fit + alpha * mrde + beta * reg
};

/// Dirichlet energy of H over one relation, summing each undirected edge once:
///   sum_{(i,j)} || H_i / sqrt(d_i) - H_j / sqrt(d_j) ||^2
double dirichlet_energy(const Matrix& h, const RelationViews& views);

// trace(H^T (I_s - Ahat) H), where I_s is the identity restricted to nodes
// with nonzero degree. Equals dirichlet_energy.
double dirichlet_energy_trace(const Matrix& h, const RelationViews& views);

// ||H^T Ehat||_F^2 through the normalized incidence matrix.
double incidence_energy(const Matrix& h, const RelationViews& views);

double mrde(const Matrix& h, std::span<const RelationViews> views, std::span<const double> weights);

EnergyReport energy_report(const Matrix& h, const Matrix& x, std::span<const RelationViews> views,
                           std::span<const double> weights, double alpha, double beta);

/// Maximum eigengap max_i |lambda_i^l1 - lambda_i^l2| over the full spectrum of
/// a normalized adjacency. Dense diagnostic; refuses n > dense_cap.
double ome(const SparseMatrix& norm_adj, int l1, int l2, Index dense_cap = kDefaultDenseCap);

// Same quantity from a precomputed spectrum.
double ome_from_spectrum(const Vector& eigenvalues, int l1, int l2);

}  // namespace demm
