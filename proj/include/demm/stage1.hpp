#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "demm/energy.hpp"
#include "demm/features.hpp"
#include "demm/graph.hpp"
#include "demm/types.hpp"

namespace demm {

enum class Stage1Mode { exact, fast };

enum class SketchMode {
  count_sketch,  // hashed sign sketch of the incidence matrix
  identity,      // no compression; the sketch is the incidence matrix itself
};

struct Stage1Config {
  double alpha = 4.0;              // weight of the multi-relational Dirichlet energy
  double beta = 2.5;               // weight of the relation-size regularizer
  int hops = 5;                    // truncation order of the propagation series
  std::vector<int> sketch_dims{16};  // one value for all relations, or one per relation
  int max_iters = 10;
  double h_tol = 1e-4;             // relative Frobenius change that ends the loop
  std::uint64_t seed = 0;
  SketchMode sketch = SketchMode::count_sketch;
  bool learn_weights = true;       // false keeps the uniform initial weights
  Index dense_cap = kDefaultDenseCap;

  void validate(Index n_relations) const;
  int sketch_dim(Index relation) const;
};

// Relation-type weights, kept on the probability simplex.
struct RelationWeights {
  std::vector<double> omega;

  static RelationWeights uniform(Index n_relations);
  Index size() const { return static_cast<Index>(omega.size()); }
  void validate() const;
};

struct SketchPack {
  std::vector<SparseMatrix> sketched;  // N x m_r each
  std::vector<double> fro_sq;
};

// Column -> (bucket, sign) assignment used by the count sketch.
struct SketchHash {
  std::function<Index(Index)> bucket;
  std::function<int(Index)> sign;

  // splitmix64-based, keyed by (seed, relation, column).
  static SketchHash keyed(std::uint64_t seed, Index relation, Index m);
  // bucket(j) = j, sign = +1.
  static SketchHash identity();
};

SparseMatrix unify_adjacency(std::span<const RelationViews> views, const RelationWeights& weights);

/// Minimizer of ||H - X||^2 + alpha * trace(H^T (I - A) H): solves
/// ((1 + alpha) I - alpha A) H = X. Dense LU up to dense_cap rows,
/// conjugate gradient beyond. alpha = 0 returns X.
Matrix exact_H(const Matrix& x, const SparseMatrix& a, double alpha,
               Index dense_cap = kDefaultDenseCap);

/// Truncated propagation: the first `hops` terms of the Neumann series of
/// exact_H, plus the remaining tail approximated with the last power of A.
Matrix approx_H(const Matrix& x, const SparseMatrix& a, double alpha, int hops);

SparseMatrix count_sketch(const SparseMatrix& incidence, Index m, const SketchHash& hash);
SparseMatrix count_sketch(const SparseMatrix& incidence, Index m, std::uint64_t seed,
                          Index relation = 0);

SketchPack build_sketches(std::span<const RelationViews> views, const Stage1Config& config);

// w_r proportional to c_r^-2. Zero costs take all the mass, split evenly.
RelationWeights weights_from_costs(std::span<const double> costs);

/// Closed-form weight update for fixed H. Uses the exact incidence energy
/// when `sketch` is null and the sketched estimate otherwise.
RelationWeights update_weights(const Matrix& h, std::span<const RelationViews> views,
                               const SketchPack* sketch, double alpha, double beta);

struct IterationRecord {
  RelationWeights weights;  // after this iteration's update
  EnergyReport energy;      // objective at (H, weights)
  double rel_change = 0.0;  // relative Frobenius change of H
};

struct Stage1Result {
  FeatureMatrix h;
  RelationWeights weights;
  std::vector<IterationRecord> trace;
  int iterations = 0;
  bool converged = false;
};

/// Alternating optimization of node features and relation weights. `exact`
/// solves the linear system and uses exact traces; `fast` uses truncated
/// propagation and sketched traces.
Stage1Result run_stage1(std::span<const RelationViews> views, const Matrix& x,
                        const Stage1Config& config, Stage1Mode mode);

}  // namespace demm
