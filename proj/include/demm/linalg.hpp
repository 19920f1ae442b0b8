#pragma once

#include <cstdint>
#include <functional>

#include "demm/errors.hpp"
#include "demm/types.hpp"

namespace demm {

// y = M x for a symmetric operator M.
using SymmetricOperator = std::function<void(const Vector& x, Vector& y)>;

struct LanczosOptions {
  double tol = 1e-8;           // residual bound relative to the operator norm estimate
  Index max_matvecs = 0;       // 0 selects 300 * k
  std::uint64_t seed = 0;
};

struct EigenPairs {
  Vector values;        // descending
  Matrix vectors;       // n x k, orthonormal columns
  Index matvecs = 0;
  double max_residual = 0.0;
};

class EigenConvergenceError : public NumericalError {
 public:
  EigenConvergenceError(const std::string& what, double best_residual)
      : NumericalError(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Eigenpairs for the k algebraically largest eigenvalues of a symmetric
/// operator, by thick-restarted Lanczos with full reorthogonalization and
/// explicit Rayleigh-Ritz projection on the retained basis.
///
/// Each column is sign-fixed so its largest-magnitude entry is positive, which
/// makes the output deterministic for a given seed. Throws
/// EigenConvergenceError carrying the best residual seen if the matvec budget
/// runs out.
EigenPairs top_eigenvectors(const SymmetricOperator& op, Index n, Index k,
                            const LanczosOptions& options = {});
EigenPairs top_eigenvectors(const SparseMatrix& m, Index k, const LanczosOptions& options = {});
EigenPairs top_eigenvectors(const Matrix& m, Index k, const LanczosOptions& options = {});

// Flip each column so its largest-magnitude entry is positive.
void fix_column_signs(Matrix& m);

// Full spectrum of a dense symmetric matrix, ascending.
Vector symmetric_spectrum(const Matrix& m);

// Estimate of max |lambda| by power iteration on M^2.
double spectral_radius_estimate(const SparseMatrix& m, int iters = 500, std::uint64_t seed = 0);

}  // namespace demm
