#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "demm/graph.hpp"
#include "demm/stage1.hpp"
#include "demm/stage2.hpp"

namespace demm {

enum class Method { demm, demm_plus, demm_na };

Method parse_method(const std::string& name);
std::string method_name(Method method);

struct RunConfig {
  Method method = Method::demm_plus;
  Stage1Config stage1;
  Stage2Config stage2;
  Index d = 128;           // requested feature dimension, clamped to what the data supports
  std::uint64_t seed = 0;  // overrides the stage seeds
};

struct PipelineResult {
  ClusterResult clusters;
  Stage1Result stage1;
  Index d_used = 0;
  std::map<std::string, double> timings;  // seconds, excluding I/O
};

/// demm:    reduce_attributes -> exact Stage I -> oracle Stage II
/// demm+:   reduce_attributes -> fast Stage I  -> fast Stage II
/// demm-na: attribute-free Stage I           -> fast Stage II
/// Errors keep their type and gain a prefix naming the failing stage.
PipelineResult run_pipeline(const MultiRelGraph& graph, const RunConfig& config);

// Synthetic family for timing runs: fixed expected degree as N grows.
struct BenchGraph {
  int k = 4;
  int relations = 2;
  double degree_in = 8.0;   // expected within-cluster neighbours per node and relation
  double degree_out = 2.0;  // expected between-cluster neighbours per node and relation
  int attr_dim = 32;
  double attr_sep = 4.0;
  std::uint64_t seed = 0;
};

struct BenchRow {
  Method method = Method::demm_plus;
  Index n = 0;
  int repeats = 0;
  std::map<std::string, double> timings;  // median seconds per stage over repeats
};

/// Times each method at each size on a fresh BenchGraph instance. Graph
/// generation is not timed.
std::vector<BenchRow> bench(const RunConfig& base, const std::vector<Method>& methods,
                            const std::vector<Index>& sizes, const BenchGraph& family, int repeats);

MultiRelGraph bench_graph(const BenchGraph& family, Index n);

}  // namespace demm
