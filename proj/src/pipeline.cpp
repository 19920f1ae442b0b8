#include "demm/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "demm/attributeless.hpp"
#include "demm/errors.hpp"
#include "demm/features.hpp"

namespace demm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn, re-raising library errors with the stage name prepended.
template <typename Fn>
auto tagged(const char* stage, Fn&& fn) -> decltype(fn()) {
  const std::string tag = std::string(stage) + ": ";
  try {
    return fn();
  } catch (const CapabilityError& e) {
    throw CapabilityError(tag + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(tag + e.what());
  } catch (const DataError& e) {
    throw DataError(tag + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(tag + e.what());
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "demm") return Method::demm;
  if (name == "demm+" || name == "demm_plus") return Method::demm_plus;
  if (name == "demm-na" || name == "demm_na") return Method::demm_na;
  throw ParameterError("unknown method '" + name + "' (expected demm, demm+ or demm-na)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::demm: return "demm";
    case Method::demm_plus: return "demm+";
    case Method::demm_na: return "demm-na";
  }
  return "unknown";
}

PipelineResult run_pipeline(const MultiRelGraph& graph, const RunConfig& config) {
  if (config.d < 1) throw ParameterError("d must be >= 1");
  Stage1Config s1 = config.stage1;
  Stage2Config s2 = config.stage2;
  s1.seed = config.seed;
  s2.seed = config.seed;
  const Index n = graph.n_nodes();
  tagged("config", [&] {
    s1.validate(graph.n_relations());
    s2.validate(n);
  });

  PipelineResult out;
  const auto total_start = Clock::now();
  auto start = Clock::now();
  const auto views = build_views(graph);
  out.timings["views"] = seconds_since(start);

  if (config.method == Method::demm_na) {
    out.d_used = std::min(config.d, n);
    start = Clock::now();
    out.stage1 = tagged("stage1", [&] { return run_stage1_na(views, out.d_used, s1, Stage1Mode::fast); });
    out.timings["stage1"] = seconds_since(start);
  } else {
    if (!graph.has_attributes()) {
      throw ParameterError("method " + method_name(config.method) +
                           " needs node attributes; use demm-na for attribute-less graphs");
    }
    out.d_used = std::min({config.d, n, graph.attributes().cols()});
    start = Clock::now();
    const FeatureMatrix x = tagged("reduce", [&] { return reduce_attributes(graph.attributes(), out.d_used); });
    out.timings["reduce"] = seconds_since(start);

    const Stage1Mode mode = config.method == Method::demm ? Stage1Mode::exact : Stage1Mode::fast;
    start = Clock::now();
    out.stage1 = tagged("stage1", [&] { return run_stage1(views, x.data, s1, mode); });
    out.timings["stage1"] = seconds_since(start);
  }

  // Stage II needs at least two columns for the row centering.
  Matrix h = out.stage1.h.data;
  if (h.cols() < 2) {
    log_warning("feature dimension 1 padded with a zero column for stage2");
    h.conservativeResize(Eigen::NoChange, 2);
    h.col(1).setZero();
  }
  const Stage2Mode mode2 = config.method == Method::demm ? Stage2Mode::oracle : Stage2Mode::fast;
  start = Clock::now();
  out.clusters = tagged("stage2", [&] { return run_stage2(h, s2, mode2); });
  out.timings["stage2"] = seconds_since(start);
  out.timings["total"] = seconds_since(total_start);
  out.clusters.method = method_name(config.method);
  out.clusters.timings = out.timings;
  return out;
}

MultiRelGraph bench_graph(const BenchGraph& family, Index n) {
  if (n < family.k) throw ParameterError("bench: size below the cluster count");
  SynthParams p;
  p.k = family.k;
  p.nodes_per_cluster = static_cast<int>(n / family.k);
  const double inside = std::max(1, p.nodes_per_cluster - 1);
  const double outside = std::max<double>(1.0, static_cast<double>(p.nodes_per_cluster) * (family.k - 1));
  p.p_in.assign(static_cast<std::size_t>(family.relations), std::min(1.0, family.degree_in / inside));
  p.p_out.assign(static_cast<std::size_t>(family.relations), std::min(1.0, family.degree_out / outside));
  p.attr_dim = family.attr_dim;
  p.attr_sep = family.attr_sep;
  p.seed = family.seed + static_cast<std::uint64_t>(n);
  return synth_mrg(p);
}

std::vector<BenchRow> bench(const RunConfig& base, const std::vector<Method>& methods,
                            const std::vector<Index>& sizes, const BenchGraph& family, int repeats) {
  if (repeats < 1) throw ParameterError("bench: repeats must be >= 1");
  std::vector<BenchRow> rows;
  for (Index n : sizes) {
    const MultiRelGraph graph = bench_graph(family, n);
    const MultiRelGraph bare = graph.without_attributes();
    for (Method m : methods) {
      RunConfig cfg = base;
      cfg.method = m;
      std::map<std::string, std::vector<double>> samples;
      for (int r = 0; r < repeats; ++r) {
        const PipelineResult res = run_pipeline(m == Method::demm_na ? bare : graph, cfg);
        for (const auto& [stage, secs] : res.timings) samples[stage].push_back(secs);
      }
      BenchRow row;
      row.method = m;
      row.n = graph.n_nodes();
      row.repeats = repeats;
      for (auto& [stage, v] : samples) row.timings[stage] = median(std::move(v));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace demm
