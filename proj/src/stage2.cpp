#include "demm/stage2.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/QR>

#include "demm/errors.hpp"

namespace demm {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_abs_deviation(const Vector& v) {
  return v.size() == 0 ? 0.0 : (v.array() - 1.0).abs().maxCoeff();
}

void check_positive(const Vector& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw NumericalError(std::string("sinkhorn: nonpositive ") + what + " sum " +
                           std::to_string(v[i]) + " at index " + std::to_string(i));
    }
  }
}

}  // namespace

void Stage2Config::validate(Index n_points) const {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (k > n_points) {
    throw ParameterError("k=" + std::to_string(k) + " exceeds the number of nodes " +
                         std::to_string(n_points));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be > 0");
  if (sk_iters < 1) throw ParameterError("sk_iters must be >= 1");
  if (!(sk_tol >= 0.0)) throw ParameterError("sk_tol must be >= 0");
  if (kmeans_restarts < 1) throw ParameterError("kmeans_restarts must be >= 1");
  if (kmeans_iters < 1) throw ParameterError("kmeans_iters must be >= 1");
}

FeatureMatrix pcc_normalize(const Matrix& h) {
  if (h.cols() < 2) throw ParameterError("pcc_normalize: need at least 2 feature columns");
  FeatureMatrix out{h, NormState::pcc};
  Index flat = 0;
  for (Index i = 0; i < out.data.rows(); ++i) {
    auto row = out.data.row(i);
    row.array() -= row.mean();
    const double norm = row.norm();
    // Relative test so rows equal to a constant up to rounding count as flat.
    if (norm <= 1e-12 * std::max(1.0, h.row(i).cwiseAbs().maxCoeff())) {
      row.setZero();
      ++flat;
    } else {
      row /= norm;
    }
  }
  if (flat > 0) {
    log_warning("pcc_normalize: " + std::to_string(flat) + " zero-variance row(s) set to zero");
  }
  return out;
}

Matrix exact_affinity(const Matrix& h_pcc, double sigma, Index dense_cap) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be > 0");
  const Index n = h_pcc.rows();
  if (n > dense_cap) {
    throw CapabilityError("exact_affinity: n=" + std::to_string(n) + " exceeds the dense cap of " +
                          std::to_string(dense_cap) + "; use the fast mode");
  }
  const Vector sq = h_pcc.rowwise().squaredNorm();
  Matrix s = h_pcc * h_pcc.transpose();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double dist = i == j ? 0.0 : std::max(0.0, sq[i] + sq[j] - 2.0 * s(i, j));
      s(i, j) = std::exp(-dist / sigma);
    }
  }
  return s;
}

ClusterResult spectral_cluster_oracle(const Matrix& s, const Stage2Config& config) {
  if (s.rows() != s.cols()) throw ParameterError("affinity matrix must be square");
  config.validate(s.rows());
  LanczosOptions opts;
  opts.seed = config.seed;
  const EigenPairs eig = top_eigenvectors(s, config.k, opts);
  ClusterResult res =
      kmeans(eig.vectors, config.k, config.kmeans_restarts, config.kmeans_iters, config.seed);
  res.method = "spectral";
  return res;
}

Matrix orf_rotation(Index d, std::uint64_t seed) {
  if (d < 1) throw ParameterError("orf_rotation: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix orf_map(const Matrix& h_pcc, std::uint64_t seed) {
  const Index d = h_pcc.cols();
  const Matrix q = orf_rotation(d, seed);
  const double root = std::sqrt(static_cast<double>(d));
  const Matrix ht = root * h_pcc * q.transpose();
  Matrix z(h_pcc.rows(), 2 * d);
  z.leftCols(d) = ht.array().sin().matrix() / root;
  z.rightCols(d) = ht.array().cos().matrix() / root;
  return z;
}

Vector sinkhorn_row_step(Matrix& z_left, const Matrix& z_right) {
  const Vector col_total = z_right.colwise().sum().transpose();
  Vector v = z_left * col_total;
  check_positive(v, "row");
  z_left.array().colwise() /= v.array();
  return v;
}

Vector sinkhorn_col_step(const Matrix& z_left, Matrix& z_right) {
  const Vector row_total = z_left.colwise().sum().transpose();
  Vector v = z_right * row_total;
  check_positive(v, "column");
  z_right.array().colwise() /= v.array();
  return v;
}

SKFactors sinkhorn_factors(const Matrix& z, int max_iters, double tol) {
  if (max_iters < 1) throw ParameterError("sinkhorn: iteration count must be >= 1");
  SKFactors f{z, z, 0, 0.0, 0.0};
  for (int t = 0; t < max_iters; ++t) {
    sinkhorn_row_step(f.z_left, f.z_right);
    sinkhorn_col_step(f.z_left, f.z_right);
    f.iterations = t + 1;
    const Vector rows = f.z_left * f.z_right.colwise().sum().transpose();
    f.row_deviation = max_abs_deviation(rows);
    if (f.row_deviation <= tol) break;
  }
  const Vector cols = f.z_right * f.z_left.colwise().sum().transpose();
  f.col_deviation = max_abs_deviation(cols);
  return f;
}

ClusterResult run_stage2(const Matrix& h, const Stage2Config& config, Stage2Mode mode) {
  config.validate(h.rows());
  const auto start = std::chrono::steady_clock::now();
  const FeatureMatrix pcc = pcc_normalize(h);
  ClusterResult res;
  if (mode == Stage2Mode::oracle) {
    const Matrix s = exact_affinity(pcc.data, config.sigma, config.dense_cap);
    res = spectral_cluster_oracle(s, config);
    res.method = "oracle";
  } else {
    const Matrix z = orf_map(pcc.data, config.seed);
    const SKFactors f = sinkhorn_factors(z, config.sk_iters, config.sk_tol);
    res = kmeans(f.z_right, config.k, config.kmeans_restarts, config.kmeans_iters, config.seed);
    res.method = "fast";
  }
  res.timings["stage2"] = seconds_since(start);
  return res;
}

}  // namespace demm
