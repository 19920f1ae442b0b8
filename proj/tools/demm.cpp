// demm: command-line front end for the clustering library.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "demm/attributeless.hpp"
#include "demm/energy.hpp"
#include "demm/errors.hpp"
#include "demm/io.hpp"
#include "demm/metrics.hpp"
#include "demm/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace demm;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const auto& tok : split(s, ',')) {
    try {
      std::size_t used = 0;
      T value{};
      if constexpr (std::is_integral_v<T>) {
        value = static_cast<T>(std::stoll(tok, &used));
      } else {
        value = static_cast<T>(std::stod(tok, &used));
      }
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(value);
    } catch (const std::logic_error&) {
      throw ParameterError(std::string("--") + what + ": cannot parse '" + tok + "'");
    }
  }
  if (out.empty()) throw ParameterError(std::string("--") + what + ": empty list");
  return out;
}

std::string fixed4(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

json energy_json(const EnergyReport& e) {
  return json{{"per_relation", e.per_relation}, {"mrde", e.mrde}, {"fit", e.fit},
              {"reg", e.reg}, {"total", e.total}};
}

json trace_json(const Stage1Result& s1) {
  json trace = json::array();
  for (const auto& rec : s1.trace) {
    json item = energy_json(rec.energy);
    item["omega"] = rec.weights.omega;
    item["rel_change"] = std::isfinite(rec.rel_change) ? json(rec.rel_change) : json(nullptr);
    trace.push_back(item);
  }
  return trace;
}

// Shared Stage I / Stage II knobs.
struct Knobs {
  double alpha = 4.0;
  double beta = 2.5;
  int hops = 5;
  std::string m = "16";
  Index d = 128;
  int k = 2;
  double sigma = 1.0;
  int sk_iters = 10;
  int max_iters = 10;
  double h_tol = 1e-4;
  int restarts = 10;
  std::uint64_t seed = 0;
};

void add_stage1_flags(CLI::App* cmd, Knobs& kn) {
  cmd->add_option("--alpha", kn.alpha, "MRDE coefficient")->capture_default_str();
  cmd->add_option("--beta", kn.beta, "regularization coefficient")->capture_default_str();
  cmd->add_option("--L", kn.hops, "propagation hops")->capture_default_str();
  cmd->add_option("--m", kn.m, "sketch dimension, scalar or per relation (M1,M2,...)")->capture_default_str();
  cmd->add_option("--d", kn.d, "feature dimension")->capture_default_str();
  cmd->add_option("--max-iters", kn.max_iters, "alternating iterations")->capture_default_str();
  cmd->add_option("--h-tol", kn.h_tol, "relative change that ends Stage I")->capture_default_str();
}

void add_stage2_flags(CLI::App* cmd, Knobs& kn) {
  cmd->add_option("--k", kn.k, "number of clusters")->capture_default_str();
  cmd->add_option("--sigma", kn.sigma, "kernel width")->capture_default_str();
  cmd->add_option("--sk-iters", kn.sk_iters, "Sinkhorn iterations")->capture_default_str();
  cmd->add_option("--restarts", kn.restarts, "k-means restarts")->capture_default_str();
}

RunConfig to_config(const Knobs& kn) {
  RunConfig cfg;
  cfg.stage1.alpha = kn.alpha;
  cfg.stage1.beta = kn.beta;
  cfg.stage1.hops = kn.hops;
  cfg.stage1.sketch_dims = parse_list<int>(kn.m, "m");
  cfg.stage1.max_iters = kn.max_iters;
  cfg.stage1.h_tol = kn.h_tol;
  cfg.stage2.k = kn.k;
  cfg.stage2.sigma = kn.sigma;
  cfg.stage2.sk_iters = kn.sk_iters;
  cfg.stage2.kmeans_restarts = kn.restarts;
  cfg.d = kn.d;
  cfg.seed = kn.seed;
  return cfg;
}

// Applies a JSON RunConfig on top of the flag values.
void apply_config_file(const fs::path& path, RunConfig& cfg, bool& method_set) {
  std::ifstream in(path);
  if (!in) throw ParameterError(path.string() + ": cannot open config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ParameterError(path.string() + ": config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "method") {
        cfg.method = parse_method(v.get<std::string>());
        method_set = true;
      } else if (key == "alpha") {
        cfg.stage1.alpha = v.get<double>();
      } else if (key == "beta") {
        cfg.stage1.beta = v.get<double>();
      } else if (key == "L") {
        cfg.stage1.hops = v.get<int>();
      } else if (key == "m") {
        cfg.stage1.sketch_dims = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      } else if (key == "max_iters") {
        cfg.stage1.max_iters = v.get<int>();
      } else if (key == "h_tol") {
        cfg.stage1.h_tol = v.get<double>();
      } else if (key == "d") {
        cfg.d = v.get<Index>();
      } else if (key == "k") {
        cfg.stage2.k = v.get<int>();
      } else if (key == "sigma") {
        cfg.stage2.sigma = v.get<double>();
      } else if (key == "sk_iters") {
        cfg.stage2.sk_iters = v.get<int>();
      } else if (key == "kmeans_restarts") {
        cfg.stage2.kmeans_restarts = v.get<int>();
      } else if (key == "kmeans_iters") {
        cfg.stage2.kmeans_iters = v.get<int>();
      } else if (key == "seed") {
        cfg.seed = v.get<std::uint64_t>();
      } else {
        throw ParameterError(path.string() + ": unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

std::pair<fs::path, fs::path> two_paths(const std::string& out) {
  const auto parts = split(out, ',');
  if (parts.size() != 2) throw ParameterError("--out expects two comma-separated paths");
  return {parts[0], parts[1]};
}

int cmd_cluster(const fs::path& graph_dir, const fs::path& out_dir, const std::string& method,
                const fs::path& config_path, const Knobs& kn) {
  const auto wall = std::chrono::steady_clock::now();
  RunConfig cfg = to_config(kn);
  bool method_set = !method.empty();
  if (method_set) cfg.method = parse_method(method);
  if (!config_path.empty()) apply_config_file(config_path, cfg, method_set);

  const MultiRelGraph graph = load_graph(graph_dir);
  if (!method_set && !graph.has_attributes()) cfg.method = Method::demm_na;
  const MultiRelGraph& input = cfg.method == Method::demm_na && graph.has_attributes()
                                   ? graph.without_attributes()
                                   : graph;
  const PipelineResult res = run_pipeline(input, cfg);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError(out_dir.string() + ": " + ec.message());
  write_labels(out_dir / "clusters.txt", res.clusters.assignment);

  json j;
  j["schema"] = 1;
  j["method"] = method_name(cfg.method);
  j["n_nodes"] = graph.n_nodes();
  j["k"] = cfg.stage2.k;
  j["d"] = res.d_used;
  j["seed"] = cfg.seed;
  j["sizes"] = res.clusters.sizes;
  j["empty_clusters"] = res.clusters.empty_clusters;
  j["objective"] = res.clusters.objective;
  j["omega"] = res.stage1.weights.omega;
  j["iters"] = res.stage1.iterations;
  j["converged"] = res.stage1.converged;
  j["energy_trace"] = trace_json(res.stage1);
  if (graph.has_labels()) {
    const auto& truth = graph.labels();
    j["metrics"] = {{"acc", acc(res.clusters.assignment, truth)},
                    {"nmi", nmi(res.clusters.assignment, truth)},
                    {"ari", ari(res.clusters.assignment, truth)}};
  }
  write_json(out_dir / "result.json", j);

  json t = res.timings;
  t["schema"] = 1;
  t["wall_including_io"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count();
  write_json(out_dir / "timings.json", t);
  return 0;
}

int cmd_stage1(const fs::path& graph_dir, const std::string& mode, const std::string& out,
               const Knobs& kn) {
  const auto [h_path, w_path] = two_paths(out);
  RunConfig cfg = to_config(kn);
  cfg.stage1.seed = kn.seed;
  Stage1Mode m;
  if (mode == "fast") {
    m = Stage1Mode::fast;
  } else if (mode == "exact") {
    m = Stage1Mode::exact;
  } else {
    throw ParameterError("--mode must be fast or exact");
  }
  const MultiRelGraph graph = load_graph(graph_dir);
  const auto views = build_views(graph);
  Stage1Result res;
  if (graph.has_attributes()) {
    const Index d = std::min({cfg.d, graph.n_nodes(), graph.attributes().cols()});
    const FeatureMatrix x = reduce_attributes(graph.attributes(), d);
    res = run_stage1(views, x.data, cfg.stage1, m);
  } else {
    res = run_stage1_na(views, std::min(cfg.d, graph.n_nodes()), cfg.stage1, m);
  }
  write_matrix_tsv(h_path, res.h.data);
  json energies = json::array();
  for (const auto& rec : res.trace) energies.push_back(rec.energy.total);
  write_json(w_path, json{{"omega", res.weights.omega},
                          {"iters", res.iterations},
                          {"energy_trace", energies}});
  return 0;
}

int cmd_stage2(const fs::path& features, const std::string& mode, const fs::path& out,
               const fs::path& affinity_out, const Knobs& kn) {
  Stage2Config cfg = to_config(kn).stage2;
  cfg.seed = kn.seed;
  Stage2Mode m;
  if (mode == "fast") {
    m = Stage2Mode::fast;
  } else if (mode == "oracle") {
    m = Stage2Mode::oracle;
  } else {
    throw ParameterError("--mode must be fast or oracle");
  }
  if (!affinity_out.empty() && m != Stage2Mode::oracle) {
    throw ParameterError("--emit-affinity is only available in oracle mode");
  }
  const Matrix h = read_matrix_tsv(features);
  const ClusterResult res = run_stage2(h, cfg, m);
  write_labels(out, res.assignment);
  if (!affinity_out.empty()) {
    write_matrix_tsv(affinity_out, exact_affinity(pcc_normalize(h).data, cfg.sigma, cfg.dense_cap));
  }
  return 0;
}

int cmd_eval(const fs::path& pred_path, const fs::path& truth_path) {
  const auto pred = read_labels(pred_path);
  const auto truth = read_labels(truth_path);
  std::cout << "{\"acc\": " << fixed4(acc(pred, truth)) << ", \"nmi\": " << fixed4(nmi(pred, truth))
            << ", \"ari\": " << fixed4(ari(pred, truth)) << "}\n";
  return 0;
}

int cmd_energy(const fs::path& graph_dir, const fs::path& features, const std::string& weights,
               const fs::path& initial, double alpha, double beta) {
  const MultiRelGraph graph = load_graph(graph_dir);
  const Matrix h = read_matrix_tsv(features);
  const auto w = parse_list<double>(weights, "weights");
  const auto views = build_views(graph);
  const bool has_x = !initial.empty();
  const Matrix x = has_x ? read_matrix_tsv(initial) : h;
  const EnergyReport rep = energy_report(h, x, views, w, alpha, beta);
  json j = energy_json(rep);
  if (!has_x) j["fit"] = nullptr;
  j["alpha"] = alpha;
  j["beta"] = beta;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-energy clustering of multi-relational graphs"};
  app.require_subcommand(1);
  Knobs kn;

  fs::path graph_dir;
  fs::path out_dir;
  fs::path config_path;
  std::string method;
  auto* cluster = app.add_subcommand("cluster", "run the full two-stage pipeline");
  cluster->add_option("--graph", graph_dir, "graph directory")->required();
  cluster->add_option("--out", out_dir, "output directory")->required();
  cluster->add_option("--method", method, "demm | demm+ | demm-na (default: demm+, or demm-na without attributes)");
  cluster->add_option("--config", config_path, "JSON RunConfig; its keys override flags");
  cluster->add_option("--seed", kn.seed)->capture_default_str();
  add_stage1_flags(cluster, kn);
  add_stage2_flags(cluster, kn);

  std::string mode = "fast";
  std::string out_pair;
  auto* stage1 = app.add_subcommand("stage1", "learn node features and relation weights");
  stage1->add_option("--graph", graph_dir, "graph directory")->required();
  stage1->add_option("--mode", mode, "fast | exact")->capture_default_str();
  stage1->add_option("--out", out_pair, "H.tsv,weights.json")->required();
  stage1->add_option("--seed", kn.seed)->capture_default_str();
  add_stage1_flags(stage1, kn);

  fs::path features;
  fs::path clusters_out;
  fs::path affinity_out;
  auto* stage2 = app.add_subcommand("stage2", "cluster a feature matrix");
  stage2->add_option("--features", features, "N x d TSV")->required();
  stage2->add_option("--mode", mode, "fast | oracle")->capture_default_str();
  stage2->add_option("--out", clusters_out, "cluster ids, one per line")->required();
  stage2->add_option("--emit-affinity", affinity_out, "write the dense affinity (oracle mode)");
  stage2->add_option("--seed", kn.seed)->capture_default_str();
  add_stage2_flags(stage2, kn);

  fs::path pred_path;
  fs::path truth_path;
  auto* eval = app.add_subcommand("eval", "score a clustering against ground truth");
  eval->add_option("--pred", pred_path)->required();
  eval->add_option("--truth", truth_path)->required();

  std::string weights;
  fs::path initial;
  auto* energy = app.add_subcommand("energy", "evaluate the Stage I objective terms");
  energy->add_option("--graph", graph_dir)->required();
  energy->add_option("--features", features, "H as N x d TSV")->required();
  energy->add_option("--weights", weights, "w1,w2,...")->required();
  energy->add_option("--initial", initial, "X as N x d TSV; without it fit is null");
  energy->add_option("--alpha", kn.alpha)->capture_default_str();
  energy->add_option("--beta", kn.beta)->capture_default_str();

  SynthParams sp;
  std::string p_in = "0.5";
  std::string p_out = "0.05,0.05";
  auto* synth = app.add_subcommand("synth", "write a planted-partition graph directory");
  synth->add_option("--out", out_dir)->required();
  synth->add_option("--k", sp.k)->capture_default_str();
  synth->add_option("--nodes-per-cluster", sp.nodes_per_cluster)->capture_default_str();
  synth->add_option("--p-in", p_in, "one value, or one per relation")->capture_default_str();
  synth->add_option("--p-out", p_out, "one value per relation")->capture_default_str();
  synth->add_option("--attr-dim", sp.attr_dim, "0 for no attributes")->capture_default_str();
  synth->add_option("--attr-sep", sp.attr_sep)->capture_default_str();
  synth->add_option("--attr-noise", sp.attr_noise)->capture_default_str();
  synth->add_option("--seed", sp.seed)->capture_default_str();

  BenchGraph bg;
  std::string sizes = "1000,2000,4000";
  std::string methods = "demm+,demm";
  int repeats = 3;
  fs::path csv_out;
  auto* benchcmd = app.add_subcommand("bench", "per-stage timings on synthetic graphs (CSV)");
  benchcmd->add_option("--sizes", sizes)->capture_default_str();
  benchcmd->add_option("--methods", methods)->capture_default_str();
  benchcmd->add_option("--repeats", repeats)->capture_default_str();
  benchcmd->add_option("--relations", bg.relations)->capture_default_str();
  benchcmd->add_option("--degree-in", bg.degree_in)->capture_default_str();
  benchcmd->add_option("--degree-out", bg.degree_out)->capture_default_str();
  benchcmd->add_option("--attr-dim", bg.attr_dim)->capture_default_str();
  benchcmd->add_option("--out", csv_out, "CSV path (default stdout)");
  benchcmd->add_option("--seed", kn.seed)->capture_default_str();
  add_stage1_flags(benchcmd, kn);
  add_stage2_flags(benchcmd, kn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*cluster) return cmd_cluster(graph_dir, out_dir, method, config_path, kn);
    if (*stage1) return cmd_stage1(graph_dir, mode, out_pair, kn);
    if (*stage2) return cmd_stage2(features, mode, clusters_out, affinity_out, kn);
    if (*eval) return cmd_eval(pred_path, truth_path);
    if (*energy) return cmd_energy(graph_dir, features, weights, initial, kn.alpha, kn.beta);
    if (*synth) {
      const auto outs = parse_list<double>(p_out, "p-out");
      auto ins = parse_list<double>(p_in, "p-in");
      if (ins.size() == 1) ins.assign(outs.size(), ins.front());
      sp.p_in = ins;
      sp.p_out = outs;
      save_graph(synth_mrg(sp), out_dir);
      return 0;
    }
    if (*benchcmd) {
      std::vector<Method> ms;
      for (const auto& name : split(methods, ',')) ms.push_back(parse_method(name));
      std::vector<Index> ns;
      for (long long n : parse_list<long long>(sizes, "sizes")) ns.push_back(static_cast<Index>(n));
      bg.k = kn.k;
      bg.seed = kn.seed;
      const auto rows = bench(to_config(kn), ms, ns, bg, repeats);
      std::ostringstream csv;
      csv << "method,n,repeats,views,reduce,stage1,stage2,total\n";
      for (const auto& r : rows) {
        auto get = [&](const char* s) {
          auto it = r.timings.find(s);
          return it == r.timings.end() ? 0.0 : it->second;
        };
        csv << method_name(r.method) << ',' << r.n << ',' << r.repeats << ',' << get("views") << ','
            << get("reduce") << ',' << get("stage1") << ',' << get("stage2") << ',' << get("total")
            << '\n';
      }
      if (csv_out.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream f(csv_out);
        if (!f) throw DataError(csv_out.string() + ": cannot open for writing");
        f << csv.str();
      }
      return 0;
    }
  } catch (const demm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
