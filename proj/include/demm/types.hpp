#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace demm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Compressed row storage with sorted column indices.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Dense-path routines refuse inputs above this many rows unless told otherwise.
inline constexpr Index kDefaultDenseCap = 4096;

}  // namespace demm
