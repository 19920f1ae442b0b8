#pragma once

#include <span>
#include <vector>

#include "demm/types.hpp"

namespace demm {

/// Fraction of nodes whose predicted cluster maps to their true class under
/// the best one-to-one relabeling (Hungarian assignment on the confusion
/// matrix, zero-padded to square).
double acc(std::span<const int> pred, std::span<const int> truth);

/// Mutual information over the geometric mean of the two entropies, natural
/// log. Two single-cluster partitions score 1; one single-cluster side
/// against a non-trivial one scores 0.
double nmi(std::span<const int> pred, std::span<const int> truth);

// Adjusted Rand index. Requires at least two points.
double ari(std::span<const int> pred, std::span<const int> truth);

// Counts n_ij. Rows follow the sorted distinct pred labels, columns the
// sorted distinct truth labels.
std::vector<std::vector<Index>> contingency(std::span<const int> pred, std::span<const int> truth);

/// Minimum-cost perfect matching on a square cost matrix. Returns col[i], the
/// column assigned to row i.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

}  // namespace demm
