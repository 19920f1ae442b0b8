#include "demm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "demm/errors.hpp"

namespace demm {
namespace {

void check_lengths(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw ParameterError("label vectors differ in length (" + std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  }
  if (pred.empty()) throw ParameterError("label vectors are empty");
}

std::vector<int> dense_ids(std::span<const int> labels, Index& count) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = next;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids.at(l));
  return out;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

std::vector<std::vector<Index>> contingency(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth);
  Index kp = 0;
  Index kt = 0;
  const auto p = dense_ids(pred, kp);
  const auto t = dense_ids(truth, kt);
  std::vector<std::vector<Index>> table(static_cast<std::size_t>(kp),
                                        std::vector<Index>(static_cast<std::size_t>(kt), 0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++table[static_cast<std::size_t>(p[i])][static_cast<std::size_t>(t[i])];
  }
  return table;
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& row : cost) {
    if (row.size() != n) throw ParameterError("hungarian: cost matrix must be square");
  }
  // Shortest augmenting paths with potentials; index 0 is a sentinel column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0);  // match[col] = row
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of(n, 0);
  for (std::size_t j = 1; j <= n; ++j) col_of[match[j] - 1] = static_cast<int>(j - 1);
  return col_of;
}

double acc(std::span<const int> pred, std::span<const int> truth) {
  const auto table = contingency(pred, truth);
  const std::size_t n = std::max(table.size(), table.front().size());
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < table[i].size(); ++j) cost[i][j] = -static_cast<double>(table[i][j]);
  }
  const auto col = hungarian(cost);
  Index matched = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto j = static_cast<std::size_t>(col[i]);
    if (j < table[i].size()) matched += table[i][j];
  }
  return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  const auto table = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  std::vector<double> rows(table.size(), 0.0);
  std::vector<double> cols(table.front().size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      rows[i] += static_cast<double>(table[i][j]);
      cols[j] += static_cast<double>(table[i][j]);
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double nij = static_cast<double>(table[i][j]);
      if (nij > 0.0) mi += nij * std::log(n * nij / (rows[i] * cols[j]));
    }
  }
  auto entropy = [n](const std::vector<double>& marg) {
    double h = 0.0;
    for (double c : marg) {
      if (c > 0.0) h -= c * std::log(c / n);
    }
    return h;
  };
  const double hp = entropy(rows);
  const double ht = entropy(cols);
  if (rows.size() == 1 && cols.size() == 1) return 1.0;
  if (hp <= 0.0 || ht <= 0.0) return 0.0;
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

double ari(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth);
  if (pred.size() < 2) throw ParameterError("ari needs at least 2 points");
  const auto table = contingency(pred, truth);
  double index = 0.0;
  std::vector<double> rows(table.size(), 0.0);
  std::vector<double> cols(table.front().size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double nij = static_cast<double>(table[i][j]);
      index += choose2(nij);
      rows[i] += nij;
      cols[j] += nij;
    }
  }
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (double a : rows) sum_a += choose2(a);
  for (double b : cols) sum_b += choose2(b);
  const double total = choose2(static_cast<double>(pred.size()));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) {
    // Both partitions are all-singletons or all-one-cluster.
    return sum_a == sum_b ? 1.0 : 0.0;
  }
  return (index - expected) / denom;
}

}  // namespace demm
