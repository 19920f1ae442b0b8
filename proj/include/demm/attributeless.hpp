#pragma once

#include <span>

#include "demm/graph.hpp"
#include "demm/linalg.hpp"
#include "demm/stage1.hpp"

namespace demm {

// Top-d eigenvectors of a symmetric adjacency, sign-fixed, before any row
// normalization.
EigenPairs na_embedding(const SparseMatrix& a, Index d, std::uint64_t seed = 0);

/// Stage I for graphs without attributes. Each round takes H as the top-d
/// eigenvectors of the unified adjacency (orthonormal columns), row-normalizes
/// it, and updates the relation weights with alpha fixed at 1; config.alpha
/// and config.hops are ignored. The energy trace reports fit = 0 since there
/// is no X.
Stage1Result run_stage1_na(std::span<const RelationViews> views, Index d, const Stage1Config& config,
                           Stage1Mode mode);

}  // namespace demm
