#pragma once

#include "demm/types.hpp"

namespace demm {

enum class NormState { raw, row_unit, pcc };

// Dense N x d node features with a record of the normalization applied.
struct FeatureMatrix {
  Matrix data;
  NormState state = NormState::raw;

  Index rows() const { return data.rows(); }
  Index cols() const { return data.cols(); }
};

// L2-normalize every row. Zero rows stay zero.
FeatureMatrix row_normalize(const Matrix& h);

/// Projects the column-centered attributes onto their top-d principal
/// directions. Uses the eigendecomposition of whichever of the D x D
/// covariance or N x N Gram matrix is smaller. Output columns come out in
/// non-increasing variance order.
FeatureMatrix reduce_attributes(const Matrix& attrs, Index d);

}  // namespace demm
