#include "demm/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "demm/errors.hpp"

namespace demm {
namespace fs = std::filesystem;
namespace {

[[noreturn]] void fail(const fs::path& file, std::size_t line, const std::string& msg) {
  throw DataError(file.string() + ":" + std::to_string(line) + ": " + msg);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  return out;
}

// Splits on spaces and tabs.
std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool skippable(std::string_view line) {
  const auto f = fields(line);
  return f.empty() || f.front().front() == '#';
}

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw NumericalError("cannot format value");
  return std::string(buf, ptr);
}

std::vector<Edge> read_edges(const fs::path& path, Index n_nodes) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::map<Edge, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto f = fields(line);
    long long u = 0;
    long long v = 0;
    if (f.size() != 2 || !parse(f[0], u) || !parse(f[1], v)) {
      fail(path, lineno, "expected two integer node ids, got '" + line + "'");
    }
    if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes) {
      fail(path, lineno, "node id out of range [0, " + std::to_string(n_nodes) + ")");
    }
    if (u == v) fail(path, lineno, "self-loop on node " + std::to_string(u));
    Edge e{static_cast<int>(std::min(u, v)), static_cast<int>(std::max(u, v))};
    auto [it, fresh] = seen.emplace(e, lineno);
    if (!fresh) {
      fail(path, lineno, "duplicate edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                             "), first seen on line " + std::to_string(it->second));
    }
    edges.push_back(e);
  }
  return edges;
}

}  // namespace

Matrix read_matrix_tsv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = fields(line);
    if (f.empty()) continue;
    std::vector<double> row;
    row.reserve(f.size());
    for (auto tok : f) {
      double x = 0.0;
      if (!parse(tok, x)) fail(path, lineno, "not a number: '" + std::string(tok) + "'");
      row.push_back(x);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(path, lineno, "expected " + std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path.string() + ": no rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_matrix_tsv(const fs::path& path, const Matrix& m) {
  auto out = open_out(path);
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += '\t';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

std::vector<int> read_labels(const fs::path& path) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = fields(line);
    if (f.empty()) continue;
    int x = 0;
    if (f.size() != 1 || !parse(f[0], x)) fail(path, lineno, "expected one integer label");
    labels.push_back(x);
  }
  return labels;
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  for (int l : labels) out << l << '\n';
  if (!out) throw DataError(path.string() + ": write failed");
}

MultiRelGraph load_graph(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  nlohmann::json meta;
  try {
    auto in = open_in(meta_path);
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(meta_path.string() + ": " + e.what());
  }
  Index n = 0;
  std::vector<std::string> names;
  std::optional<std::string> attr_file;
  std::optional<std::string> label_file;
  try {
    n = meta.at("n_nodes").get<Index>();
    names = meta.at("relations").get<std::vector<std::string>>();
    if (meta.contains("attributes") && !meta["attributes"].is_null()) {
      attr_file = meta["attributes"].get<std::string>();
    }
    if (meta.contains("labels") && !meta["labels"].is_null()) {
      label_file = meta["labels"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(meta_path.string() + ": " + e.what());
  }
  if (n < 1) throw DataError(meta_path.string() + ": n_nodes must be positive");
  if (names.empty()) throw DataError(meta_path.string() + ": no relations listed");
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
    throw DataError(meta_path.string() + ": duplicate relation name");
  }

  std::vector<Relation> relations;
  for (const auto& name : names) {
    relations.push_back(Relation{name, read_edges(dir / "relations" / (name + ".edges"), n)});
  }
  std::optional<Matrix> attrs;
  if (attr_file) {
    const fs::path p = dir / *attr_file;
    attrs = read_matrix_tsv(p);
    if (attrs->rows() != n) {
      throw DataError(p.string() + ": " + std::to_string(attrs->rows()) + " rows, expected " +
                      std::to_string(n));
    }
  }
  std::optional<std::vector<int>> labels;
  if (label_file) {
    const fs::path p = dir / *label_file;
    labels = read_labels(p);
    if (static_cast<Index>(labels->size()) != n) {
      throw DataError(p.string() + ": " + std::to_string(labels->size()) + " labels, expected " +
                      std::to_string(n));
    }
  }
  return MultiRelGraph(n, std::move(relations), std::move(attrs), std::move(labels));
}

void save_graph(const MultiRelGraph& graph, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "relations", ec);
  if (ec) throw DataError(dir.string() + ": " + ec.message());

  nlohmann::json meta;
  meta["n_nodes"] = graph.n_nodes();
  std::vector<std::string> names;
  for (const auto& rel : graph.relations()) {
    names.push_back(rel.name);
    auto out = open_out(dir / "relations" / (rel.name + ".edges"));
    for (const auto& e : rel.edges) out << e.u << ' ' << e.v << '\n';
    if (!out) throw DataError(rel.name + ".edges: write failed");
  }
  meta["relations"] = names;
  if (graph.has_attributes()) {
    meta["attributes"] = "attributes.tsv";
    write_matrix_tsv(dir / "attributes.tsv", graph.attributes());
  }
  if (graph.has_labels()) {
    meta["labels"] = "labels.txt";
    write_labels(dir / "labels.txt", graph.labels());
  }
  auto out = open_out(dir / "meta.json");
  out << meta.dump(2) << '\n';
}

}  // namespace demm
