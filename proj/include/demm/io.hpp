#pragma once

#include <filesystem>
#include <vector>

#include "demm/graph.hpp"
#include "demm/types.hpp"

namespace demm {

/// Reads a graph directory:
///   meta.json            {"n_nodes": N, "relations": [names], "attributes": file?, "labels": file?}
///   relations/<name>.edges   one "u v" pair per line, 0-based
///   attributes file      N lines of tab-separated reals
///   labels file          N lines of one integer
/// Blank lines and lines starting with '#' are skipped in edge files. Errors
/// are DataError and name the file and line.
MultiRelGraph load_graph(const std::filesystem::path& dir);

// Writes the layout above, creating the directory if needed.
void save_graph(const MultiRelGraph& graph, const std::filesystem::path& dir);

// Tab-separated dense matrix, one row per line. Every row needs the same width.
Matrix read_matrix_tsv(const std::filesystem::path& path);
void write_matrix_tsv(const std::filesystem::path& path, const Matrix& m);

std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

}  // namespace demm
