#include "demm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace demm {
namespace {

Vector random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v.normalized();
}

// Classical Gram-Schmidt applied twice against the first `cols` columns of q.
void orthogonalize(const Matrix& q, Index cols, Vector& v) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    Vector coeff = q.leftCols(cols).transpose() * v;
    v.noalias() -= q.leftCols(cols) * coeff;
  }
}

}  // namespace

void fix_column_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    m.col(j).cwiseAbs().maxCoeff(&arg);
    if (m(arg, j) < 0.0) m.col(j) *= -1.0;
  }
}

EigenPairs top_eigenvectors(const SymmetricOperator& op, Index n, Index k,
                            const LanczosOptions& options) {
  if (k < 1 || k > n) {
    throw ParameterError("top_eigenvectors: need 1 <= k <= n (k=" + std::to_string(k) +
                         ", n=" + std::to_string(n) + ")");
  }
  const Index budget = options.max_matvecs > 0 ? options.max_matvecs : 300 * k;
  const Index basis_max = std::min(n, std::max<Index>(2 * k + 16, 32));
  const Index keep = std::min(basis_max - 1, k + (basis_max - k) / 2);

  std::mt19937_64 rng(options.seed);
  Matrix q(n, basis_max);
  Matrix w(n, basis_max);
  Index cur = 0;
  Index matvecs = 0;
  double best_residual = std::numeric_limits<double>::infinity();
  Vector y(n);

  // Appends the normalized component of v orthogonal to the basis. Returns
  // false once the basis spans the whole space.
  auto expand = [&](Vector v) {
    if (cur >= n) return false;
    const double scale = std::max(v.norm(), 1e-300);
    orthogonalize(q, cur, v);
    for (int attempt = 0; v.norm() <= 1e-10 * scale && attempt < 8; ++attempt) {
      // Invariant subspace reached; continue with a fresh random direction.
      v = random_unit(n, rng);
      orthogonalize(q, cur, v);
    }
    const double norm = v.norm();
    if (norm <= 1e-12) return false;
    q.col(cur) = v / norm;
    op(q.col(cur), y);
    w.col(cur) = y;
    ++cur;
    ++matvecs;
    return true;
  };

  expand(random_unit(n, rng));
  while (true) {
    while (cur < basis_max) {
      if (!expand(w.col(cur - 1))) break;
    }

    Matrix projected = q.leftCols(cur).transpose() * w.leftCols(cur);
    projected = 0.5 * (projected + projected.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> small(projected);
    const Vector& theta = small.eigenvalues();  // ascending
    const Matrix& s = small.eigenvectors();
    const double op_norm = std::max(theta.cwiseAbs().maxCoeff(), 1e-300);

    const Index take = std::min(k, cur);
    Matrix ritz(n, take);
    Vector values(take);
    double worst = 0.0;
    Index worst_col = 0;
    Matrix residuals(n, take);
    for (Index j = 0; j < take; ++j) {
      const Index src = cur - 1 - j;
      values[j] = theta[src];
      ritz.col(j) = q.leftCols(cur) * s.col(src);
      residuals.col(j) = w.leftCols(cur) * s.col(src) - theta[src] * ritz.col(j);
      const double r = residuals.col(j).norm();
      if (r > worst) {
        worst = r;
        worst_col = j;
      }
    }
    best_residual = std::min(best_residual, worst);

    if (take == k && (worst <= options.tol * op_norm || cur == n)) {
      EigenPairs out;
      out.values = values;
      out.vectors = ritz;
      fix_column_signs(out.vectors);
      out.matvecs = matvecs;
      out.max_residual = worst;
      return out;
    }
    if (matvecs >= budget) {
      std::ostringstream msg;
      msg << "top_eigenvectors: no convergence after " << matvecs
          << " matvecs (best residual " << best_residual << ")";
      throw EigenConvergenceError(msg.str(), best_residual);
    }

    // Thick restart: keep the leading Ritz vectors, continue from the residual.
    const Index kept = std::min(keep, cur - 1);
    Matrix sk(cur, kept);
    for (Index j = 0; j < kept; ++j) sk.col(j) = s.col(cur - 1 - j);
    Matrix qk = q.leftCols(cur) * sk;
    Matrix wk = w.leftCols(cur) * sk;
    q.leftCols(kept) = qk;
    w.leftCols(kept) = wk;
    cur = kept;
    Vector next = residuals.col(worst_col);
    if (!expand(next)) {
      expand(random_unit(n, rng));
    }
  }
}

EigenPairs top_eigenvectors(const SparseMatrix& m, Index k, const LanczosOptions& options) {
  if (m.rows() != m.cols()) throw ParameterError("top_eigenvectors: matrix must be square");
  return top_eigenvectors([&m](const Vector& x, Vector& y) { y.noalias() = m * x; }, m.rows(), k,
                          options);
}

EigenPairs top_eigenvectors(const Matrix& m, Index k, const LanczosOptions& options) {
  if (m.rows() != m.cols()) throw ParameterError("top_eigenvectors: matrix must be square");
  return top_eigenvectors([&m](const Vector& x, Vector& y) { y.noalias() = m * x; }, m.rows(), k,
                          options);
}

Vector symmetric_spectrum(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double spectral_radius_estimate(const SparseMatrix& m, int iters, std::uint64_t seed) {
  const Index n = m.rows();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(seed);
  Vector v = random_unit(n, rng);
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector u = m * (m * v);
    const double norm = u.norm();
    if (norm == 0.0) return 0.0;
    estimate = std::sqrt(v.dot(u));
    v = u / norm;
  }
  return estimate;
}

}  // namespace demm
