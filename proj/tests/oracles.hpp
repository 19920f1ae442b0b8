#pragma once

// Reference implementations used only by tests. Each one is written from the
// defining formula with dense matrices or exhaustive search, sharing no code
// with the library beyond the Edge and matrix types.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "demm/graph.hpp"

namespace oracle {

using demm::Edge;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd dense_adjacency(int n, const std::vector<Edge>& edges) {
  MatrixXd a = MatrixXd::Zero(n, n);
  for (const auto& e : edges) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

inline MatrixXd dense_norm_adj(int n, const std::vector<Edge>& edges) {
  const MatrixXd a = dense_adjacency(n, edges);
  const VectorXd deg = a.rowwise().sum();
  MatrixXd dinv = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) dinv(i, i) = deg[i] > 0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  return dinv * a * dinv;
}

// Oriented incidence E with E E^T = D - A, scaled by D^{-1/2}.
inline MatrixXd dense_norm_incidence(int n, const std::vector<Edge>& edges) {
  const VectorXd deg = dense_adjacency(n, edges).rowwise().sum();
  MatrixXd e = MatrixXd::Zero(n, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t c = 0; c < edges.size(); ++c) {
    e(edges[c].u, c) = 1.0 / std::sqrt(deg[edges[c].u]);
    e(edges[c].v, c) = -1.0 / std::sqrt(deg[edges[c].v]);
  }
  return e;
}

// Erdos-Renyi edges, optionally with a Hamiltonian path so no node is isolated.
inline std::vector<Edge> random_graph(int n, double p, std::mt19937_64& rng, bool spanning_path) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((spanning_path && j == i + 1) || coin(rng)) edges.push_back({i, j});
    }
  }
  return edges;
}

inline MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = g(rng);
  }
  return m;
}

// Sum over each undirected edge once of ||h_u/sqrt(d_u) - h_v/sqrt(d_v)||^2.
inline double dirichlet(const MatrixXd& h, int n, const std::vector<Edge>& edges) {
  const VectorXd deg = dense_adjacency(n, edges).rowwise().sum();
  double total = 0.0;
  for (const auto& e : edges) {
    total += (h.row(e.u) / std::sqrt(deg[e.u]) - h.row(e.v) / std::sqrt(deg[e.v])).squaredNorm();
  }
  return total;
}

// H = (1/(1+a)) (I - a/(1+a) A)^{-1} X through an explicit inverse.
inline MatrixXd exact_h(const MatrixXd& x, const MatrixXd& a, double alpha) {
  const auto n = a.rows();
  const MatrixXd m = MatrixXd::Identity(n, n) - alpha / (1.0 + alpha) * a;
  return m.fullPivLu().inverse() * x / (1.0 + alpha);
}

// 1/(1+a) sum_{l<=L} c^l A^l X + c^{L+1} A^L X with c = a/(1+a), by dense powers.
inline MatrixXd truncated_h(const MatrixXd& x, const MatrixXd& a, double alpha, int hops) {
  const double c = alpha / (1.0 + alpha);
  MatrixXd power = MatrixXd::Identity(a.rows(), a.cols());
  MatrixXd h = x / (1.0 + alpha);
  for (int l = 1; l <= hops; ++l) {
    power = power * a;
    h += std::pow(c, l) * power * x / (1.0 + alpha);
  }
  h += std::pow(c, hops + 1) * power * x;
  return h;
}

inline VectorXd spectrum(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

// (c)^{L+1} ||X||_F max_l mu_{L,L+l}, with the max over l <= max_l and the
// l -> infinity limit.
inline double truncation_bound(const MatrixXd& a, double alpha, int hops, double x_norm,
                               int max_l = 200) {
  const VectorXd lam = spectrum(a);
  double mu = 0.0;
  for (int l = 1; l <= max_l; ++l) {
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      mu = std::max(mu, std::abs(std::pow(lam[i], hops) - std::pow(lam[i], hops + l)));
    }
  }
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam[i]) < 1.0) mu = std::max(mu, std::pow(std::abs(lam[i]), hops));
  }
  return std::pow(alpha / (1.0 + alpha), hops + 1) * x_norm * mu;
}

inline double wcss(const MatrixXd& pts, const std::vector<int>& labels, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    VectorXd mean = VectorXd::Zero(pts.cols());
    int count = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) {
        mean += pts.row(static_cast<Eigen::Index>(i)).transpose();
        ++count;
      }
    }
    if (count == 0) continue;
    mean /= count;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) total += (pts.row(static_cast<Eigen::Index>(i)).transpose() - mean).squaredNorm();
    }
  }
  return total;
}

// Calls fn on every labeling of n points with values in [0, k).
template <typename Fn>
void for_each_labeling(int n, int k, Fn&& fn) {
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  while (true) {
    fn(labels);
    int i = 0;
    while (i < n && ++labels[static_cast<std::size_t>(i)] == k) labels[static_cast<std::size_t>(i++)] = 0;
    if (i == n) return;
  }
}

inline double brute_kmeans(const MatrixXd& pts, int k) {
  double best = std::numeric_limits<double>::infinity();
  for_each_labeling(static_cast<int>(pts.rows()), k,
                    [&](const std::vector<int>& l) { best = std::min(best, wcss(pts, l, k)); });
  return best;
}

inline std::vector<int> compact(const std::vector<int>& labels) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, static_cast<int>(ids.size()));
  std::vector<int> out;
  for (int l : labels) out.push_back(ids[l]);
  return out;
}

// Best accuracy over all injective relabelings of pred.
inline double brute_acc(const std::vector<int>& pred, const std::vector<int>& truth) {
  const auto p = compact(pred);
  const auto t = compact(truth);
  const int kp = *std::max_element(p.begin(), p.end()) + 1;
  const int kt = *std::max_element(t.begin(), t.end()) + 1;
  const int k = std::max(kp, kt);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hits += perm[static_cast<std::size_t>(p[i])] == t[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(p.size());
}

// Mutual information from joint and marginal frequencies, natural log.
inline double direct_nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, long> joint_count;
  std::map<int, long> a_count;
  std::map<int, long> b_count;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint_count[{a[i], b[i]}];
    ++a_count[a[i]];
    ++b_count[b[i]];
  }
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pa;
  std::map<int, double> pb;
  for (const auto& [k, c] : joint_count) joint[k] = static_cast<double>(c) / n;
  for (const auto& [k, c] : a_count) pa[k] = static_cast<double>(c) / n;
  for (const auto& [k, c] : b_count) pb[k] = static_cast<double>(c) / n;
  double mi = 0.0;
  for (const auto& [key, pij] : joint) mi += pij * std::log(pij / (pa[key.first] * pb[key.second]));
  double ha = 0.0;
  double hb = 0.0;
  for (const auto& [k, p] : pa) ha -= p * std::log(p);
  for (const auto& [k, p] : pb) hb -= p * std::log(p);
  if (pa.size() == 1 && pb.size() == 1) return 1.0;
  if (pa.size() == 1 || pb.size() == 1) return 0.0;
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

// Adjusted Rand index from explicit enumeration of all point pairs.
inline double pair_ari(const std::vector<int>& a, const std::vector<int>& b) {
  double both = 0.0;
  double in_a = 0.0;
  double in_b = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
      pairs += 1.0;
    }
  }
  const double expected = in_a * in_b / pairs;
  const double top = 0.5 * (in_a + in_b);
  if (top == expected) return compact(a) == compact(b) ? 1.0 : 0.0;
  return (both - expected) / (top - expected);
}

// Ranks with ties sharing their average rank.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
