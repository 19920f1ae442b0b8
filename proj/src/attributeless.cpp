#include "demm/attributeless.hpp"

#include <limits>

#include "demm/errors.hpp"

namespace demm {

EigenPairs na_embedding(const SparseMatrix& a, Index d, std::uint64_t seed) {
  if (d < 1 || d > a.rows()) {
    throw ParameterError("d=" + std::to_string(d) + " outside [1, " + std::to_string(a.rows()) + "]");
  }
  LanczosOptions opts;
  opts.seed = seed;
  return top_eigenvectors(a, d, opts);
}

Stage1Result run_stage1_na(std::span<const RelationViews> views, Index d, const Stage1Config& config,
                           Stage1Mode mode) {
  if (views.empty()) throw ParameterError("at least one relation is required");
  const auto n_rel = static_cast<Index>(views.size());
  config.validate(n_rel);
  const Index n = views.front().degree.size();
  if (d < 1 || d > n) {
    throw ParameterError("d=" + std::to_string(d) + " outside [1, " + std::to_string(n) + "]");
  }
  constexpr double kAlpha = 1.0;

  SketchPack pack;
  const SketchPack* sketch = nullptr;
  if (mode == Stage1Mode::fast) {
    pack = build_sketches(views, config);
    sketch = &pack;
  }

  Stage1Result result;
  result.weights = RelationWeights::uniform(n_rel);
  Matrix prev;
  for (int t = 0; t < config.max_iters; ++t) {
    const SparseMatrix a = unify_adjacency(views, result.weights);
    FeatureMatrix h = row_normalize(na_embedding(a, d, config.seed).vectors);
    if (config.learn_weights) {
      result.weights = update_weights(h.data, views, sketch, kAlpha, config.beta);
    }

    IterationRecord rec;
    rec.weights = result.weights;
    rec.energy = energy_report(h.data, h.data, views, result.weights.omega, kAlpha, config.beta);
    rec.rel_change = std::numeric_limits<double>::infinity();
    if (t > 0 && prev.norm() > 0.0) rec.rel_change = (h.data - prev).norm() / prev.norm();
    result.trace.push_back(std::move(rec));

    prev = h.data;
    result.h = std::move(h);
    result.iterations = t + 1;
    if (result.trace.back().rel_change < config.h_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace demm
