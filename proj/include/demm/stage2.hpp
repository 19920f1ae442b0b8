#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "demm/features.hpp"
#include "demm/linalg.hpp"
#include "demm/types.hpp"

namespace demm {

enum class Stage2Mode { oracle, fast };

struct Stage2Config {
  int k = 2;
  double sigma = 1.0;       // kernel width: S_ij = exp(-||H_i - H_j||^2 / sigma)
  int sk_iters = 10;        // Sinkhorn iteration cap
  double sk_tol = 1e-9;     // Sinkhorn stops once every row sum is within this of 1
  int kmeans_restarts = 10;
  int kmeans_iters = 300;
  std::uint64_t seed = 0;
  Index dense_cap = kDefaultDenseCap;

  void validate(Index n_points) const;
};

// Factored doubly stochastic affinity: S = z_left * z_right^T.
struct SKFactors {
  Matrix z_left;
  Matrix z_right;
  int iterations = 0;
  double row_deviation = 0.0;  // max |row sum - 1| at exit
  double col_deviation = 0.0;  // max |column sum - 1| at exit
};

struct ClusterResult {
  std::vector<int> assignment;        // values in [0, k)
  std::vector<Index> sizes;           // k entries, summing to N
  std::vector<int> empty_clusters;    // ids with size 0
  double objective = 0.0;             // within-cluster sum of squares
  std::vector<double> history;        // objective after each Lloyd step of the chosen restart
  int best_restart = 0;
  std::string method;
  std::map<std::string, double> timings;  // seconds per stage
};

/// Centers each row, then scales it to unit L2 norm. Rows with zero
/// variance come out as zero rows, with a warning.
FeatureMatrix pcc_normalize(const Matrix& h);

// Dense Gaussian kernel; refuses more than dense_cap rows.
Matrix exact_affinity(const Matrix& h_pcc, double sigma, Index dense_cap = kDefaultDenseCap);

/// Spectral clustering of a dense symmetric affinity: k-means over the rows
/// of its top-k eigenvectors.
ClusterResult spectral_cluster_oracle(const Matrix& s, const Stage2Config& config);

// Haar-distributed d x d orthogonal matrix from the QR of a Gaussian matrix.
Matrix orf_rotation(Index d, std::uint64_t seed);

/// Orthogonal random features: Z = [sin(Ht) | cos(Ht)] / sqrt(d) with
/// Ht = sqrt(d) * H * Q^T. Every output row has unit norm.
Matrix orf_map(const Matrix& h_pcc, std::uint64_t seed);

// Half steps of the factored Sinkhorn iteration. Each returns the scaling
// vector v it divided by: row sums of z_left z_right^T for the row step,
// column sums for the column step.
Vector sinkhorn_row_step(Matrix& z_left, const Matrix& z_right);
Vector sinkhorn_col_step(const Matrix& z_left, Matrix& z_right);

/// Alternating row/column scaling of Z Z^T, kept in factored form so no N x N
/// matrix is formed. Stops after max_iters rounds or once the row sums are
/// within tol of 1. Throws NumericalError on a nonpositive sum.
SKFactors sinkhorn_factors(const Matrix& z, int max_iters, double tol = 1e-9);

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` runs. Restart r
/// draws from seed + r. Ties on the objective go to the lower restart index.
/// An empty cluster takes over the point farthest from its center.
ClusterResult kmeans(const Matrix& points, int k, int restarts, int max_iters, std::uint64_t seed);

// Within-cluster sum of squares of a given assignment.
double kmeans_objective(const Matrix& points, const std::vector<int>& assignment, int k);

/// oracle: PCC -> exact affinity -> spectral clustering.
/// fast:   PCC -> ORF -> factored Sinkhorn -> k-means over z_right.
ClusterResult run_stage2(const Matrix& h, const Stage2Config& config, Stage2Mode mode);

}  // namespace demm
