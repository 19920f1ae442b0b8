#pragma once

#include <vector>

#include "demm/graph.hpp"

namespace fixture {

// Six-node, two-relation running example for the multi-relational Dirichlet
// energy. Printed totals: 2.2, 2.9 and 2.34 at weights (0.8, 0.2).
inline demm::MultiRelGraph mrde_example() {
  std::vector<demm::Relation> rels{
      {"r1", {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}},
      {"r2", {{0, 3}, {1, 4}, {2, 5}, {0, 5}, {3, 4}}},
  };
  demm::Matrix x(6, 3);
  x << 1.0, 0.7, 0.9,
       0.5, 0.2, 0.5,
       0.9, 0.9, 0.1,
       0.2, 0.6, 0.0,
       0.1, 0.3, 0.9,
       0.7, 0.0, 0.2;
  return demm::MultiRelGraph(6, std::move(rels), x);
}

// Six-row feature matrix for the Sinkhorn running example. First row sums of
// Z Z^T: 114, 276, 438, 36, 18, 108.
inline demm::Matrix sinkhorn_example() {
  demm::Matrix z(6, 3);
  z << 1, 2, 3,
       4, 5, 6,
       7, 8, 9,
       1, 0, 1,
       0, 1, 0,
       2, 2, 2;
  return z;
}

}  // namespace fixture
