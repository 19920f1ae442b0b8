#include "demm/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>

#include "demm/errors.hpp"

namespace demm {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_views(std::span<const RelationViews> views) {
  if (views.empty()) throw ParameterError("at least one relation is required");
  const Index n = views.front().degree.size();
  for (const auto& v : views) {
    if (v.degree.size() != n) throw ParameterError("relations disagree on the node count");
  }
}

}  // namespace

void Stage1Config::validate(Index n_relations) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be >= 0");
  if (hops < 1) throw ParameterError("L must be >= 1");
  if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
  if (!(h_tol >= 0.0)) throw ParameterError("h_tol must be >= 0");
  if (sketch_dims.size() != 1 && static_cast<Index>(sketch_dims.size()) != n_relations) {
    throw ParameterError("expected 1 or " + std::to_string(n_relations) + " sketch dimensions, got " +
                         std::to_string(sketch_dims.size()));
  }
  for (int m : sketch_dims) {
    if (m < 1) throw ParameterError("sketch dimension must be >= 1");
  }
}

int Stage1Config::sketch_dim(Index relation) const {
  return sketch_dims.size() == 1 ? sketch_dims.front()
                                 : sketch_dims.at(static_cast<std::size_t>(relation));
}

RelationWeights RelationWeights::uniform(Index n_relations) {
  if (n_relations < 1) throw ParameterError("at least one relation is required");
  return RelationWeights{std::vector<double>(static_cast<std::size_t>(n_relations),
                                             1.0 / static_cast<double>(n_relations))};
}

void RelationWeights::validate() const {
  if (omega.empty()) throw ParameterError("relation weights are empty");
  double sum = 0.0;
  for (double w : omega) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("relation weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ParameterError("relation weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

SketchHash SketchHash::keyed(std::uint64_t seed, Index relation, Index m) {
  const std::uint64_t bucket_key =
      splitmix64(splitmix64(seed) ^ splitmix64(0x6a09e667f3bcc909ULL + static_cast<std::uint64_t>(relation)));
  const std::uint64_t sign_key = splitmix64(bucket_key ^ 0xbb67ae8584caa73bULL);
  const auto mm = static_cast<std::uint64_t>(m);
  SketchHash hash;
  hash.bucket = [bucket_key, mm](Index col) {
    return static_cast<Index>(splitmix64(bucket_key ^ splitmix64(static_cast<std::uint64_t>(col))) % mm);
  };
  hash.sign = [sign_key](Index col) {
    return (splitmix64(sign_key ^ splitmix64(static_cast<std::uint64_t>(col))) >> 63) ? 1 : -1;
  };
  return hash;
}

SketchHash SketchHash::identity() {
  return SketchHash{[](Index col) { return col; }, [](Index) { return 1; }};
}

SparseMatrix unify_adjacency(std::span<const RelationViews> views, const RelationWeights& weights) {
  check_views(views);
  if (weights.size() != static_cast<Index>(views.size())) {
    throw ParameterError("expected " + std::to_string(views.size()) + " relation weights, got " +
                         std::to_string(weights.size()));
  }
  weights.validate();
  const Index n = views.front().degree.size();
  SparseMatrix a(n, n);
  for (std::size_t r = 0; r < views.size(); ++r) {
    if (weights.omega[r] != 0.0) a += weights.omega[r] * views[r].norm_adj;
  }
  a.makeCompressed();
  return a;
}

Matrix exact_H(const Matrix& x, const SparseMatrix& a, double alpha, Index dense_cap) {
  if (a.rows() != x.rows() || a.cols() != x.rows()) {
    throw ParameterError("exact_H: adjacency is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", features have " + std::to_string(x.rows()) +
                         " rows");
  }
  if (alpha == 0.0) return x;
  const Index n = x.rows();

  // System matrix has spectrum in [1, 1 + 2 alpha], so it is SPD.
  if (n <= dense_cap) {
    Matrix system = -alpha * Matrix(a);
    system.diagonal().array() += 1.0 + alpha;
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) throw NumericalError("exact_H: Cholesky factorization failed");
    return llt.solve(x);
  }

  Eigen::SparseMatrix<double> system = -alpha * Eigen::SparseMatrix<double>(a);
  Eigen::SparseMatrix<double> eye(n, n);
  eye.setIdentity();
  system += (1.0 + alpha) * eye;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-10);
  cg.setMaxIterations(std::max<Index>(1000, 10 * n));
  cg.compute(system);
  Matrix h = cg.solve(x);
  if (cg.info() != Eigen::Success) {
    throw NumericalError("exact_H: conjugate gradient did not converge (error " +
                         std::to_string(cg.error()) + ")");
  }
  return h;
}

Matrix approx_H(const Matrix& x, const SparseMatrix& a, double alpha, int hops) {
  if (hops < 1) throw ParameterError("approx_H: L must be >= 1");
  if (a.rows() != x.rows() || a.cols() != x.rows()) {
    throw ParameterError("approx_H: adjacency and feature sizes differ");
  }
  if (alpha == 0.0) return x;
  const double step = alpha / (1.0 + alpha);
  Matrix term = x / (1.0 + alpha);
  Matrix h = term;
  for (int l = 1; l <= hops; ++l) {
    term = step * (a * term);
    h += term;
  }
  // Tail sum_{l > L} step^l A^l X / (1 + alpha), with A^l replaced by A^L.
  h += alpha * term;
  return h;
}

SparseMatrix count_sketch(const SparseMatrix& incidence, Index m, const SketchHash& hash) {
  if (m < 1) throw ParameterError("sketch dimension must be >= 1");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(incidence.nonZeros()));
  for (Index i = 0; i < incidence.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(incidence, i); it; ++it) {
      const Index col = it.col();
      const Index b = hash.bucket(col);
      if (b < 0 || b >= m) throw ParameterError("sketch hash bucket out of range");
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(b), hash.sign(col) * it.value());
    }
  }
  SparseMatrix out(incidence.rows(), m);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.prune(0.0);
  out.makeCompressed();
  return out;
}

SparseMatrix count_sketch(const SparseMatrix& incidence, Index m, std::uint64_t seed, Index relation) {
  return count_sketch(incidence, m, SketchHash::keyed(seed, relation, m));
}

SketchPack build_sketches(std::span<const RelationViews> views, const Stage1Config& config) {
  check_views(views);
  config.validate(static_cast<Index>(views.size()));
  SketchPack pack;
  for (std::size_t r = 0; r < views.size(); ++r) {
    const auto ri = static_cast<Index>(r);
    if (config.sketch == SketchMode::identity) {
      pack.sketched.push_back(views[r].incidence);
    } else {
      pack.sketched.push_back(count_sketch(views[r].incidence, config.sketch_dim(ri), config.seed, ri));
    }
    pack.fro_sq.push_back(views[r].fro_sq);
  }
  return pack;
}

RelationWeights weights_from_costs(std::span<const double> costs) {
  if (costs.empty()) throw ParameterError("at least one relation is required");
  RelationWeights w{std::vector<double>(costs.size(), 0.0)};
  std::size_t zeros = 0;
  for (double c : costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw NumericalError("relation cost is negative or not finite");
    if (c == 0.0) ++zeros;
  }
  if (zeros > 0) {
    for (std::size_t r = 0; r < costs.size(); ++r) {
      if (costs[r] == 0.0) w.omega[r] = 1.0 / static_cast<double>(zeros);
    }
    return w;
  }
  // Scale by the smallest cost first so c^-2 cannot overflow.
  const double cmin = *std::min_element(costs.begin(), costs.end());
  double sum = 0.0;
  for (std::size_t r = 0; r < costs.size(); ++r) {
    const double q = cmin / costs[r];
    w.omega[r] = q * q;
    sum += w.omega[r];
  }
  for (double& x : w.omega) x /= sum;
  return w;
}

RelationWeights update_weights(const Matrix& h, std::span<const RelationViews> views,
                               const SketchPack* sketch, double alpha, double beta) {
  check_views(views);
  if (sketch && sketch->sketched.size() != views.size()) {
    throw ParameterError("sketch pack does not match the relation count");
  }
  std::vector<double> costs(views.size());
  for (std::size_t r = 0; r < views.size(); ++r) {
    double t = 0.0;
    if (sketch) {
      if (sketch->sketched[r].rows() != h.rows()) throw ParameterError("sketch and features differ in rows");
      t = (sketch->sketched[r].transpose() * h).squaredNorm();
    } else {
      t = incidence_energy(h, views[r]);
    }
    costs[r] = beta * views[r].fro_sq + alpha * t;
  }
  return weights_from_costs(costs);
}

Stage1Result run_stage1(std::span<const RelationViews> views, const Matrix& x,
                        const Stage1Config& config, Stage1Mode mode) {
  check_views(views);
  const auto n_rel = static_cast<Index>(views.size());
  config.validate(n_rel);
  if (x.rows() != views.front().degree.size()) {
    throw ParameterError("features have " + std::to_string(x.rows()) + " rows, graph has " +
                         std::to_string(views.front().degree.size()) + " nodes");
  }

  SketchPack pack;
  const SketchPack* sketch = nullptr;
  if (mode == Stage1Mode::fast) {
    pack = build_sketches(views, config);
    sketch = &pack;
  }

  Stage1Result result;
  result.weights = RelationWeights::uniform(n_rel);
  Matrix prev = row_normalize(x).data;
  for (int t = 0; t < config.max_iters; ++t) {
    const SparseMatrix a = unify_adjacency(views, result.weights);
    const Matrix raw = mode == Stage1Mode::exact ? exact_H(x, a, config.alpha, config.dense_cap)
                                                 : approx_H(x, a, config.alpha, config.hops);
    FeatureMatrix h = row_normalize(raw);
    if (config.learn_weights) {
      result.weights = update_weights(h.data, views, sketch, config.alpha, config.beta);
    }

    IterationRecord rec;
    rec.weights = result.weights;
    rec.energy = energy_report(h.data, x, views, result.weights.omega, config.alpha, config.beta);
    const double base = prev.norm();
    rec.rel_change = base > 0.0 ? (h.data - prev).norm() / base
                                : std::numeric_limits<double>::infinity();
    result.trace.push_back(std::move(rec));

    prev = h.data;
    result.h = std::move(h);
    result.iterations = t + 1;
    if (result.trace.back().rel_change < config.h_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace demm
