#include <limits>
#include <random>

#include "demm/errors.hpp"
#include "demm/stage2.hpp"

namespace demm {
namespace {

struct Run {
  std::vector<int> assignment;
  double objective = 0.0;
  std::vector<double> history;
};

Matrix plus_plus_init(const Matrix& points, int k, std::mt19937_64& rng) {
  const Index n = points.rows();
  Matrix centers(k, points.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  Vector dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= dist2[i];
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      // Every point coincides with a center already.
      chosen = pick(rng);
    }
    centers.row(c) = points.row(chosen);
    dist2 = dist2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

// Nearest center per point, lowest index on ties. Returns the objective.
double assign(const Matrix& points, const Matrix& centers, std::vector<int>& out, Vector& dist2) {
  const Index n = points.rows();
  const Index k = centers.rows();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < k; ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(i)] = best;
    dist2[i] = best_d;
    total += best_d;
  }
  return total;
}

Matrix centroids(const Matrix& points, const std::vector<int>& assignment, int k,
                 std::vector<Index>& counts) {
  Matrix centers = Matrix::Zero(k, points.cols());
  counts.assign(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    const int c = assignment[static_cast<std::size_t>(i)];
    centers.row(c) += points.row(i);
    ++counts[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
  }
  return centers;
}

Run lloyd(const Matrix& points, int k, int max_iters, std::mt19937_64& rng) {
  const Index n = points.rows();
  Matrix centers = plus_plus_init(points, k, rng);
  Run run;
  run.assignment.assign(static_cast<std::size_t>(n), 0);
  Vector dist2(n);
  std::vector<Index> counts;
  run.objective = assign(points, centers, run.assignment, dist2);
  run.history.push_back(run.objective);

  for (int it = 0; it < max_iters; ++it) {
    centers = centroids(points, run.assignment, k, counts);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Empty cluster: move the worst-served point into it.
      Index far = 0;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const int owner = run.assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double d = (points.row(i) - centers.row(owner)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d < 0.0) continue;
      const int owner = run.assignment[static_cast<std::size_t>(far)];
      run.assignment[static_cast<std::size_t>(far)] = c;
      --counts[static_cast<std::size_t>(owner)];
      counts[static_cast<std::size_t>(c)] = 1;
      centers = centroids(points, run.assignment, k, counts);
    }

    std::vector<int> next(run.assignment.size());
    const double obj = assign(points, centers, next, dist2);
    const bool same = next == run.assignment;
    run.assignment = std::move(next);
    run.objective = obj;
    run.history.push_back(obj);
    if (same) break;
  }
  run.objective = kmeans_objective(points, run.assignment, k);
  return run;
}

}  // namespace

double kmeans_objective(const Matrix& points, const std::vector<int>& assignment, int k) {
  if (static_cast<Index>(assignment.size()) != points.rows()) {
    throw ParameterError("assignment length differs from the number of points");
  }
  std::vector<Index> counts;
  const Matrix centers = centroids(points, assignment, k, counts);
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centers.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

ClusterResult kmeans(const Matrix& points, int k, int restarts, int max_iters, std::uint64_t seed) {
  const Index n = points.rows();
  if (k < 1 || k > n) {
    throw ParameterError("kmeans: need 1 <= k <= n (k=" + std::to_string(k) + ", n=" +
                         std::to_string(n) + ")");
  }
  if (restarts < 1 || max_iters < 1) throw ParameterError("kmeans: restarts and iterations must be >= 1");
  if (!points.allFinite()) throw NumericalError("kmeans: input contains non-finite values");

  Run best;
  int best_restart = -1;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r));
    Run run = lloyd(points, k, max_iters, rng);
    if (best_restart < 0 || run.objective < best.objective) {
      best = std::move(run);
      best_restart = r;
    }
  }

  ClusterResult res;
  res.assignment = std::move(best.assignment);
  res.objective = best.objective;
  res.history = std::move(best.history);
  res.best_restart = best_restart;
  res.method = "kmeans";
  res.sizes.assign(static_cast<std::size_t>(k), 0);
  for (int c : res.assignment) ++res.sizes[static_cast<std::size_t>(c)];
  for (int c = 0; c < k; ++c) {
    if (res.sizes[static_cast<std::size_t>(c)] == 0) res.empty_clusters.push_back(c);
  }
  return res;
}

}  // namespace demm
