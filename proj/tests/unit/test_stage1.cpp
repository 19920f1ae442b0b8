#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "demm/errors.hpp"
#include "demm/stage1.hpp"

using namespace demm;

namespace {

RelationViews random_views(int n, double p, std::mt19937_64& rng, bool spanning = true) {
  return build_relation_views(n, oracle::random_graph(n, p, rng, spanning));
}

double objective(const Matrix& h, const Matrix& x, const Matrix& a, double alpha) {
  const Matrix lap = Matrix::Identity(a.rows(), a.cols()) - a;
  return (h - x).squaredNorm() + alpha * (h.transpose() * lap * h).trace();
}

}  // namespace

TEST_SUITE("stage1") {

TEST_CASE("unify_adjacency") {
  std::mt19937_64 rng(1);
  const auto v = random_views(8, 0.4, rng);
  std::vector<RelationViews> one{v};
  CHECK(Matrix(unify_adjacency(one, RelationWeights{{1.0}})) == Matrix(v.norm_adj));

  std::vector<RelationViews> twin{v, v};
  CHECK((Matrix(unify_adjacency(twin, RelationWeights{{0.5, 0.5}})) - Matrix(v.norm_adj)).cwiseAbs().maxCoeff() <
        1e-15);

  const auto g = fixture::mrde_example();
  const auto views = build_views(g);
  const Matrix a = unify_adjacency(views, RelationWeights{{0.8, 0.2}});
  const Matrix ref = 0.8 * oracle::dense_norm_adj(6, g.relation(0).edges) +
                     0.2 * oracle::dense_norm_adj(6, g.relation(1).edges);
  CHECK((a - ref).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(oracle::spectrum(a).cwiseAbs().maxCoeff() <= 1.0 + 1e-12);

  CHECK_THROWS_AS(unify_adjacency(views, RelationWeights{{0.7, 0.2}}), ParameterError);
  CHECK_THROWS_AS(unify_adjacency(views, RelationWeights{{1.0}}), ParameterError);
}

TEST_CASE("exact_H special cases") {
  std::mt19937_64 rng(2);
  const Matrix x = oracle::random_matrix(5, 2, rng);
  const SparseMatrix zero(5, 5);
  CHECK(exact_H(x, zero, 0.0) == x);
  CHECK((exact_H(x, zero, 3.0) - x / 4.0).cwiseAbs().maxCoeff() < 1e-14);

  const auto k2 = build_relation_views(2, std::vector<Edge>{{0, 1}});
  Matrix x2(2, 1);
  x2 << 1, 0;
  // [[2, -1], [-1, 2]] h = (1, 0)  =>  h = (2/3, 1/3).
  const Matrix h = exact_H(x2, k2.norm_adj, 1.0);
  CHECK(h(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(h(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("exact_H solves the system on both paths") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 20 + 5 * trial;
    const auto v = random_views(n, 0.2, rng, trial % 2 == 0);
    const Matrix x = oracle::random_matrix(n, 3, rng);
    const double alpha = trial % 3 == 0 ? 16.0 : 4.0;
    const Matrix dense = exact_H(x, v.norm_adj, alpha);
    const Matrix iterative = exact_H(x, v.norm_adj, alpha, 0);
    const Matrix a(v.norm_adj);
    const Matrix system = (1.0 + alpha) * Matrix::Identity(n, n) - alpha * a;
    CHECK((system * dense - x).norm() <= 1e-8 * x.norm());
    CHECK((system * iterative - x).norm() <= 1e-8 * x.norm());
    CHECK((dense - oracle::exact_h(x, a, alpha)).norm() <= 1e-10 * x.norm());
  }
}

TEST_CASE("exact_H is the unique minimizer for fixed weights") {
  std::mt19937_64 rng(4);
  const int n = 15;
  const auto v = random_views(n, 0.3, rng);
  const Matrix a(v.norm_adj);
  const Matrix x = oracle::random_matrix(n, 3, rng);
  const double alpha = 4.0;
  const Matrix h = exact_H(x, v.norm_adj, alpha);
  const double best = objective(h, x, a, alpha);
  for (int t = 0; t < 100; ++t) {
    const double scale = std::pow(10.0, -3.0 + 3.0 * t / 100.0);
    const Matrix delta = scale * oracle::random_matrix(n, 3, rng);
    CHECK(objective(h + delta, x, a, alpha) > best);
  }
}

TEST_CASE("approx_H special cases and dense reference") {
  std::mt19937_64 rng(5);
  const Matrix x = oracle::random_matrix(6, 2, rng);
  const SparseMatrix zero(6, 6);
  CHECK(approx_H(x, zero, 0.0, 3) == x);
  CHECK((approx_H(x, zero, 2.0, 3) - x / 3.0).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(approx_H(x, zero, 2.0, 0), ParameterError);

  for (int trial = 0; trial < 10; ++trial) {
    const int n = 12;
    const auto v = random_views(n, 0.3, rng);
    const Matrix xn = oracle::random_matrix(n, 3, rng);
    const int hops = 1 + trial;
    const Matrix ref = oracle::truncated_h(xn, Matrix(v.norm_adj), 4.0, hops);
    CHECK((approx_H(xn, v.norm_adj, 4.0, hops) - ref).norm() <= 1e-12 * ref.norm());
  }
}

TEST_CASE("approx_H error obeys the truncation bound") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 10 + trial;
    const auto v = random_views(n, 0.25, rng, trial % 2 == 0);
    const Matrix x = oracle::random_matrix(n, 3, rng);
    const double alpha = std::array{1.0, 4.0, 16.0}[trial % 3];
    const int hops = std::array{2, 5, 10}[(trial / 3) % 3];
    const Matrix a(v.norm_adj);
    const double err = (approx_H(x, v.norm_adj, alpha, hops) - exact_H(x, v.norm_adj, alpha)).norm();
    CHECK(err <= oracle::truncation_bound(a, alpha, hops, x.norm()) * (1 + 1e-9) + 1e-12);
  }
  const auto v = random_views(30, 0.2, rng);
  const Matrix x = oracle::random_matrix(30, 4, rng);
  const double err = (approx_H(x, v.norm_adj, 4.0, 30) - exact_H(x, v.norm_adj, 4.0)).norm();
  CHECK(err <= 1e-3 * x.norm());
  CHECK(err <= oracle::truncation_bound(Matrix(v.norm_adj), 4.0, 30, x.norm()) * (1 + 1e-9) + 1e-12);
}

TEST_CASE("count sketch with the identity hook is exact") {
  std::mt19937_64 rng(7);
  const auto v = random_views(15, 0.3, rng);
  const Index m = v.incidence.cols();
  const SparseMatrix s = count_sketch(v.incidence, m, SketchHash::identity());
  CHECK(Matrix(s) == Matrix(v.incidence));
  const Matrix h = oracle::random_matrix(15, 4, rng);
  CHECK((s.transpose() * h).squaredNorm() == doctest::Approx(incidence_energy(h, v)).epsilon(1e-14));
}

TEST_CASE("count sketch of a single edge keeps the norm") {
  const auto v = build_relation_views(3, std::vector<Edge>{{0, 2}});
  std::mt19937_64 rng(8);
  const Matrix h = oracle::random_matrix(3, 2, rng);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SparseMatrix s = count_sketch(v.incidence, 1, seed);
    CHECK(s.cols() == 1);
    CHECK((s.transpose() * h).squaredNorm() == doctest::Approx(incidence_energy(h, v)).epsilon(1e-14));
  }
}

TEST_CASE("count sketch shape, sparsity and determinism") {
  std::mt19937_64 rng(9);
  const auto v = random_views(25, 0.3, rng);
  for (Index m : {1, 4, 16, 64}) {
    const SparseMatrix s = count_sketch(v.incidence, m, 42, 1);
    CHECK(s.cols() == m);
    CHECK(s.rows() == 25);
    CHECK(s.nonZeros() <= 2 * v.incidence.cols());
    CHECK(Matrix(s) == Matrix(count_sketch(v.incidence, m, 42, 1)));
  }
  CHECK(Matrix(count_sketch(v.incidence, 16, 42, 0)) != Matrix(count_sketch(v.incidence, 16, 42, 1)));
}

TEST_CASE("count sketch hash is balanced") {
  const auto hash = SketchHash::keyed(5, 0, 8);
  std::vector<int> buckets(8, 0);
  int positive = 0;
  for (Index col = 0; col < 80000; ++col) {
    ++buckets[static_cast<std::size_t>(hash.bucket(col))];
    positive += hash.sign(col) > 0;
  }
  for (int b : buckets) CHECK(std::abs(b - 10000) < 500);
  CHECK(std::abs(positive - 40000) < 1000);
}

TEST_CASE("sketched energy concentrates at m = 64") {
  std::mt19937_64 rng(10);
  const auto v = random_views(20, 0.4, rng);
  const Matrix h = oracle::random_matrix(20, 8, rng);
  const double exact = incidence_energy(h, v);
  std::vector<double> errs;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SparseMatrix s = count_sketch(v.incidence, 64, seed);
    errs.push_back(std::abs((s.transpose() * h).squaredNorm() - exact) / exact);
  }
  std::nth_element(errs.begin(), errs.begin() + 100, errs.end());
  CHECK(errs[100] <= 0.15);
}

TEST_CASE("weights from costs") {
  CHECK(weights_from_costs(std::vector<double>{3.0}).omega == std::vector<double>{1.0});
  const auto w = weights_from_costs(std::vector<double>{2.0, 1.0});
  CHECK(w.omega[0] == doctest::Approx(0.2));
  CHECK(w.omega[1] == doctest::Approx(0.8));
  CHECK(weights_from_costs(std::vector<double>{1.0, 0.0, 2.0}).omega == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(weights_from_costs(std::vector<double>{0.0, 5.0, 0.0}).omega == std::vector<double>{0.5, 0.0, 0.5});
  const auto tiny = weights_from_costs(std::vector<double>{1e-200, 2e-200});
  CHECK(tiny.omega[0] == doctest::Approx(0.8));
  CHECK_THROWS_AS(weights_from_costs(std::vector<double>{-1.0}), NumericalError);
}

TEST_CASE("update_weights uses the exact or sketched trace") {
  std::mt19937_64 rng(11);
  const auto a = random_views(12, 0.4, rng);
  const auto b = random_views(12, 0.2, rng);
  std::vector<RelationViews> views{a, b};
  const Matrix h = oracle::random_matrix(12, 3, rng);
  const double alpha = 4.0;
  const double beta = 2.5;
  std::vector<double> costs;
  for (const auto& v : views) {
    const Matrix lap = Matrix::Identity(12, 12) - Matrix(v.norm_adj);
    costs.push_back(beta * Matrix(v.norm_adj).squaredNorm() + alpha * (h.transpose() * lap * h).trace());
  }
  const double z = 1 / (costs[0] * costs[0]) + 1 / (costs[1] * costs[1]);
  const auto w = update_weights(h, views, nullptr, alpha, beta);
  CHECK(w.omega[0] == doctest::Approx(1 / (costs[0] * costs[0]) / z).epsilon(1e-12));
  w.validate();

  Stage1Config cfg;
  cfg.sketch = SketchMode::identity;
  const auto pack = build_sketches(views, cfg);
  const auto ws = update_weights(h, views, &pack, alpha, beta);
  CHECK(ws.omega[0] == doctest::Approx(w.omega[0]).epsilon(1e-12));

  std::vector<RelationViews> twin{a, a};
  const auto wt = update_weights(h, twin, nullptr, alpha, beta);
  CHECK(wt.omega[0] == doctest::Approx(0.5));
  std::vector<RelationViews> one{a};
  CHECK(update_weights(h, one, nullptr, alpha, beta).omega == std::vector<double>{1.0});
}

TEST_CASE("weight update minimizes the cost over the sqrt-simplex") {
  // c^-2 weights minimize sum w_r c_r on {w >= 0, sum sqrt(w_r) = 1}; the
  // output is that minimizer rescaled onto the simplex.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::gamma_distribution<double> gam(1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> c{u(rng), u(rng), u(rng)};
    const auto w = weights_from_costs(c);
    double s = 0.0;
    for (double x : w.omega) s += std::sqrt(x);
    double best = 0.0;
    for (int r = 0; r < 3; ++r) best += w.omega[r] / (s * s) * c[r];
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> p{gam(rng), gam(rng), gam(rng)};
      const double tot = p[0] + p[1] + p[2];
      double val = 0.0;
      for (int r = 0; r < 3; ++r) val += (p[r] / tot) * (p[r] / tot) * c[r];
      CHECK(val >= best * (1 - 1e-12));
    }
  }
}

TEST_CASE("unnormalized alternation does not increase the objective") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthParams p;
    p.k = 3;
    p.nodes_per_cluster = 15;
    p.p_in = {0.5, 0.3};
    p.p_out = {0.05, 0.1};
    p.attr_dim = 6;
    p.seed = 200 + seed;
    const auto g = synth_mrg(p);
    const auto views = build_views(g);
    const Matrix& x = g.attributes();
    auto w = RelationWeights::uniform(2);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 6; ++it) {
      const Matrix h = exact_H(x, unify_adjacency(views, w), 4.0);
      const double after_h = energy_report(h, x, views, w.omega, 4.0, 2.5).total;
      CHECK(after_h <= prev * (1 + 1e-12));
      w = update_weights(h, views, nullptr, 4.0, 2.5);
      prev = energy_report(h, x, views, w.omega, 4.0, 2.5).total;
      CHECK(prev <= after_h * (1 + 1e-12));
    }
  }
}

TEST_CASE("stage1 config validation") {
  Stage1Config cfg;
  CHECK_NOTHROW(cfg.validate(2));
  cfg.sketch_dims = {4, 5, 6};
  CHECK_THROWS_AS(cfg.validate(2), ParameterError);
  cfg.sketch_dims = {4, 5};
  CHECK(cfg.sketch_dim(1) == 5);
  cfg.hops = 0;
  CHECK_THROWS_AS(cfg.validate(2), ParameterError);
  cfg.hops = 1;
  cfg.alpha = -1;
  CHECK_THROWS_AS(cfg.validate(2), ParameterError);
}

TEST_CASE("stage1 on disjoint cliques aligns features within a clique") {
  SynthParams p;
  p.k = 2;
  p.nodes_per_cluster = 10;
  p.p_in = {1.0};
  p.p_out = {0.0};
  p.attr_dim = 4;
  p.attr_sep = 4.0;
  p.attr_noise = 0.5;
  p.seed = 3;
  const auto g = synth_mrg(p);
  const auto views = build_views(g);
  for (Stage1Mode mode : {Stage1Mode::exact, Stage1Mode::fast}) {
    const auto res = run_stage1(views, g.attributes(), Stage1Config{}, mode);
    const Matrix& h = res.h.data;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        if (i / 10 == j / 10) CHECK(h.row(i).dot(h.row(j)) >= 0.99);
      }
    }
    for (const auto& rec : res.trace) rec.weights.validate();
  }
}

TEST_CASE("fast stage1 with L = 40 and exact sketches matches the exact path") {
  SynthParams p;
  p.k = 2;
  p.nodes_per_cluster = 25;
  p.p_in = {0.3, 0.2};
  p.p_out = {0.05, 0.1};
  p.attr_dim = 6;
  p.seed = 8;
  const auto g = synth_mrg(p);
  const auto views = build_views(g);
  Stage1Config cfg;
  cfg.hops = 40;
  cfg.sketch = SketchMode::identity;
  const auto exact = run_stage1(views, g.attributes(), cfg, Stage1Mode::exact);
  const auto fast = run_stage1(views, g.attributes(), cfg, Stage1Mode::fast);
  CHECK((fast.h.data - exact.h.data).norm() <= 1e-4 * exact.h.data.norm());
  CHECK(fast.weights.omega[0] == doctest::Approx(exact.weights.omega[0]).epsilon(1e-4));
}

TEST_CASE("stage1 down-weights a pure-noise relation") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthParams p;
    p.k = 3;
    p.nodes_per_cluster = 20;
    const double noise = (3 * 190 * 0.5 + 1200 * 0.05) / 1770.0;
    p.p_in = {0.5, noise};
    p.p_out = {0.05, noise};
    p.attr_dim = 8;
    p.seed = 50 + seed;
    const auto g = synth_mrg(p);
    Stage1Config cfg;
    cfg.max_iters = 3;
    cfg.h_tol = 0.0;
    const auto res = run_stage1(build_views(g), g.attributes(), cfg, Stage1Mode::exact);
    CHECK(res.iterations == 3);
    wins += res.weights.omega[0] > res.weights.omega[1];
  }
  CHECK(wins >= 8);
}

TEST_CASE("frozen weights stay uniform") {
  const auto g = synth_mrg(2, 8, 0.6, {0.1, 0.3}, 3, 3.0, 1);
  Stage1Config cfg;
  cfg.learn_weights = false;
  const auto res = run_stage1(build_views(g), g.attributes(), cfg, Stage1Mode::fast);
  for (const auto& rec : res.trace) CHECK(rec.weights.omega == std::vector<double>{0.5, 0.5});
}

TEST_CASE("alpha = 0 returns the row-normalized input") {
  const auto g = synth_mrg(2, 6, 0.6, {0.1}, 3, 3.0, 2);
  Stage1Config cfg;
  cfg.alpha = 0.0;
  const auto res = run_stage1(build_views(g), g.attributes(), cfg, Stage1Mode::exact);
  CHECK((res.h.data - row_normalize(g.attributes()).data).cwiseAbs().maxCoeff() < 1e-15);
}

}  // TEST_SUITE
