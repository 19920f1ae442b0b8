#include "demm/features.hpp"

#include <cmath>
#include <iostream>

#include "demm/errors.hpp"
#include "demm/linalg.hpp"

namespace demm {

namespace {
bool g_warnings_enabled = true;
}

void log_warning(const std::string& message) {
  if (g_warnings_enabled) std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings_enabled = enabled; }

FeatureMatrix row_normalize(const Matrix& h) {
  FeatureMatrix out{h, NormState::row_unit};
  for (Index i = 0; i < out.data.rows(); ++i) {
    const double norm = out.data.row(i).norm();
    if (norm > 0.0) out.data.row(i) /= norm;
  }
  return out;
}

FeatureMatrix reduce_attributes(const Matrix& attrs, Index d) {
  const Index n = attrs.rows();
  const Index dim = attrs.cols();
  if (d < 1 || d > std::min(n, dim)) {
    throw ParameterError("reduce_attributes: d=" + std::to_string(d) + " outside [1, " +
                         std::to_string(std::min(n, dim)) + "]");
  }
  const Eigen::RowVectorXd mean = attrs.colwise().mean();
  const Matrix centered = attrs.rowwise() - mean;

  Matrix projected;
  if (dim <= n) {
    const Matrix cov = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    Matrix basis = eig.eigenvectors().rightCols(d).rowwise().reverse();
    fix_column_signs(basis);
    projected = centered * basis;
  } else {
    const Matrix gram = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    Matrix u = eig.eigenvectors().rightCols(d).rowwise().reverse();
    const Vector lambda = eig.eigenvalues().tail(d).reverse();
    fix_column_signs(u);
    projected = u * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  return FeatureMatrix{std::move(projected), NormState::raw};
}

}  // namespace demm
