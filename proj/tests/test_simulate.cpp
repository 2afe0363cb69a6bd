#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

#include "cat/benchmark.hpp"
#include "cat/error.hpp"
#include "cat/simulate.hpp"
#include "cat/smoother.hpp"
#include "helpers.hpp"

using namespace cat;
using namespace cat::simulate;

namespace {

// Uniformly relabelled Type 2 tree, so roots and shapes vary.
DirectedTree random_tree(std::size_t p, Rng& rng) {
  const auto base = gen_tree_type2(p, rng());
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::optional<std::size_t>> parents(p);
  for (std::size_t i = 0; i < p; ++i)
    if (auto j = base.parent(i)) parents[perm[i]] = perm[*j];
  return DirectedTree::from_parents(parents);
}

double ks_statistic(std::vector<double> x, double sigma) {
  std::sort(x.begin(), x.end());
  const boost::math::normal_distribution<double> nd(0.0, sigma);
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = boost::math::cdf(nd, x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("type 1 trees") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto t = gen_tree_type1(2, 0.1, s);
    CHECK(t.has_edge(0, 1));
  }
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto t = gen_tree_type1(30, 0.1, s);
    CHECK(t.root() == 0);
    for (std::size_t i = 1; i < 30; ++i) {
      REQUIRE(t.parent(i));
      CHECK(*t.parent(i) < i);
    }
  }
  double leaves = 0;
  for (std::uint64_t s = 0; s < 200; ++s) leaves += static_cast<double>(leaf_count(gen_tree_type1(100, 0.1, s)));
  leaves /= 200;
  CHECK(leaves >= 60);
  CHECK(leaves <= 80);
}

TEST_CASE("type 2 trees") {
  CHECK(gen_tree_type2(2, 9).has_edge(0, 1));
  double leaves = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto t = gen_tree_type2(100, s);
    for (std::size_t i = 1; i < 100; ++i) CHECK(*t.parent(i) < i);
    leaves += static_cast<double>(leaf_count(t));
  }
  leaves /= 200;
  CHECK(leaves >= 40);
  CHECK(leaves <= 58);
}

TEST_CASE("generators are reproducible") {
  CHECK(gen_tree_type1(40, 0.1, 5) == gen_tree_type1(40, 0.1, 5));
  CHECK(gen_tree_type2(40, 5) == gen_tree_type2(40, 5));
  CHECK(sample_noise(2.0, 1.5, 100, 3) == sample_noise(2.0, 1.5, 100, 3));
  const auto scm = random_scm(gen_tree_type2(6, 1), ScmOptions{}, 2);
  const auto a = sample_scm(scm, 50, 3);
  const auto b = sample_scm(random_scm(gen_tree_type2(6, 1), ScmOptions{}, 2), 50, 3);
  for (std::size_t c = 0; c < 6; ++c)
    for (std::size_t r = 0; r < 50; ++r) CHECK(a.at(r, c) == b.at(r, c));
}

TEST_CASE("Fourier features approximate the RBF covariance") {
  const std::size_t draws = 4000;
  double s00 = 0, s03 = 0, s33 = 0;
  for (std::uint64_t s = 0; s < draws; ++s) {
    const auto f = CausalFunction::fourier(s);
    const double a = f(0.0), b = f(3.0);
    s00 += a * a;
    s03 += a * b;
    s33 += b * b;
  }
  const double ratio = s03 / std::sqrt(s00 * s33);
  CHECK(std::abs(ratio - std::exp(-4.5)) <= 0.1);
  CHECK(s00 / draws == doctest::Approx(1.0).epsilon(0.1));

  const auto f = CausalFunction::fourier(7);
  const auto g = CausalFunction::fourier(7);
  for (double x = -3; x <= 3; x += 0.1) CHECK(f(x) == g(x));
  for (std::uint64_t s = 0; s < 100; ++s) CHECK(nowhere_constant(CausalFunction::fourier(s)));
  CHECK_FALSE(nowhere_constant(CausalFunction::polynomial(0.0, 0.0)));
}

TEST_CASE("noise family") {
  const auto g = sample_noise(1.0, 2.0, 100000, 1);
  CHECK(ks_statistic(g, 2.0) * std::sqrt(100000.0) < 1.628);

  const auto h = sample_noise(2.0, 1.0, 100000, 2);
  double m = 0, m2 = 0, m4 = 0;
  for (double v : h) m += v;
  m /= static_cast<double>(h.size());
  for (double v : h) {
    m2 += (v - m) * (v - m);
    m4 += std::pow(v - m, 4);
  }
  m2 /= static_cast<double>(h.size());
  m4 /= static_cast<double>(h.size());
  CHECK(m4 / (m2 * m2) > 6.0);
  CHECK(std::abs(m) <= 3 * std::sqrt(m2 / static_cast<double>(h.size())));

  // exact transform of the Gaussian draw
  const auto z = sample_noise(1.0, 1.0, 1000, 3);
  const auto t = sample_noise(0.5, 1.0, 1000, 3);
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(t[i] == doctest::Approx(std::copysign(std::sqrt(std::abs(z[i])), z[i])).epsilon(1e-12));
}

TEST_CASE("random SCM noise scales") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto t = gen_tree_type1(10, 0.1, s);
    const auto scm = random_scm(t, ScmOptions{}, s);
    for (std::size_t i = 0; i < 10; ++i) {
      const double sg = scm.noise[i].sigma;
      if (i == t.root()) {
        CHECK(sg > 1.0);
        CHECK(sg < 2.0);
      } else {
        CHECK(sg > 0.2);
        CHECK(sg < std::sqrt(2.0) / 5.0);
      }
      for (const auto& term : scm.parents[i]) CHECK(nowhere_constant(term.f));
    }
    REQUIRE(scm.tree());
    CHECK(*scm.tree() == t);
  }
}

TEST_CASE("presets") {
  const auto c = chain3();
  CHECK(c.names == std::vector<std::string>{"X", "Y", "Z"});
  CHECK(c.noise[0].sigma * c.noise[0].sigma == doctest::Approx(1.5));
  CHECK(c.noise[1].sigma * c.noise[1].sigma == doctest::Approx(0.5));
  // Var(X^3) for X ~ N(0, 1.5) is 15 * 1.5^3
  CHECK(15 * std::pow(1.5, 3) == doctest::Approx(50.625));
  const auto d = sample_scm(c, 200000, 4);
  double vx = data::variance(d.column(0));
  CHECK(vx == doctest::Approx(1.5).epsilon(0.02));

  // root column equals its noise draw
  const auto b = bivariate(0.5, 2.0);
  const auto bd = sample_scm(b, 100, 5);
  CHECK(b.noise[0].alpha == 2.0);
  CHECK(b.parents[1].size() == 1);
  CHECK(b.parents[1][0].f(2.0) == doctest::Approx(0.5 * 8 + 0.5 * 2));
  CHECK(std::isfinite(bd.at(0, 1)));

  const auto dag = experimental_dag(8, 0.3, ScmOptions{}, 6);
  std::size_t edges = 0, roots = 0;
  for (const auto& ps : dag.parents) {
    edges += ps.size();
    roots += ps.empty();
  }
  CHECK(roots == 1);
  CHECK(edges >= 7);
}

TEST_CASE("near-deterministic chain") {
  ScmSpec s;
  s.names = {"A", "B", "C"};
  s.parents = {{}, {{0, CausalFunction::polynomial(0, 1)}}, {{1, CausalFunction::polynomial(0, 2)}}};
  s.noise = {{1.0, 1.0}, {1.0, 1e-4}, {1.0, 1e-4}};
  const auto d = sample_scm(s, 5000, 7);
  std::vector<double> a(d.column(0).begin(), d.column(0).end());
  std::vector<double> c(d.column(2).begin(), d.column(2).end());
  CHECK(testing::correlation(a, c) > 0.9999);
}

TEST_CASE("Markov property of sampled chains") {
  ScmSpec s;
  s.names = {"A", "B", "C"};
  s.parents = {{}, {{0, CausalFunction::polynomial(0.1, 1)}}, {{1, CausalFunction::polynomial(0, 1)}}};
  s.noise = {{1.0, 1.0}, {1.0, 0.5}, {1.0, 0.5}};
  const auto d = sample_scm(s, 50000, 8);
  std::vector<double> a(d.column(0).begin(), d.column(0).end());
  std::vector<double> c(d.column(2).begin(), d.column(2).end());
  const auto f = smoother::fit(d.column(1), d.column(2), smoother::SmootherConfig{});
  std::vector<double> r(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) r[i] = c[i] - f.predict(d.at(i, 1));
  const double raw = std::abs(testing::correlation(a, c));
  const double partial = std::abs(testing::correlation(a, r));
  CHECK(raw > 0.5);
  CHECK(partial < 0.05);
}

TEST_CASE("structural Hamming distance") {
  const auto chain = DirectedTree::from_parents({std::nullopt, 0, 1});
  const auto fork = DirectedTree::from_parents({std::nullopt, 0, 0});
  const auto flipped = DirectedTree::from_parents({1, std::nullopt, 1});
  CHECK(shd(chain, chain) == 0);
  CHECK(shd(chain, flipped) == 1);
  CHECK(shd(chain, fork) == 2);

  Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    const auto a = random_tree(5, rng), b = random_tree(5, rng), c = random_tree(5, rng);
    CHECK(shd(a, b) == shd(b, a));
    CHECK((shd(a, b) == 0) == (a == b));
    CHECK(shd(a, c) <= shd(a, b) + shd(b, c));
  }
  CHECK_THROWS_AS(shd(chain, gen_tree_type2(4, 1)), ConfigError);
}

TEST_CASE("ancestor metrics") {
  const auto truth = Graph::from_tree(DirectedTree::from_parents({std::nullopt, 0, 1}));
  const auto same = ancestor_metrics(truth, truth);
  CHECK(*same.tpr == 1.0);
  CHECK(*same.recall == 1.0);
  // fork 0 -> 1, 0 -> 2: predicts {0<1, 0<2}; truth {0<1, 0<2, 1<2}
  const auto fork = Graph::from_tree(DirectedTree::from_parents({std::nullopt, 0, 0}));
  const auto m = ancestor_metrics(truth, fork);
  CHECK(*m.tpr == 1.0);
  CHECK(*m.recall == doctest::Approx(2.0 / 3.0));
  // reversed chain predicts only wrong relations
  const auto rev = Graph::from_tree(DirectedTree::from_parents({1, 2, std::nullopt}));
  const auto r = ancestor_metrics(truth, rev);
  CHECK(*r.tpr == 0.0);
  CHECK(*r.recall == 0.0);
  Graph empty;
  empty.parents.resize(3);
  CHECK_FALSE(ancestor_metrics(truth, empty).tpr);
  CHECK(*ancestor_metrics(truth, empty).recall == 0.0);
}

TEST_CASE("benchmark") {
  benchmark::Grid g;
  g.p = {2};
  g.n = {5000};
  g.reps = 20;
  const auto res = benchmark::run_benchmark(g, 1, 1);
  REQUIRE(res.rows.size() == 20);
  int zeros = 0;
  for (const auto& r : res.rows) {
    CHECK(r.error.empty());
    zeros += r.shd && *r.shd == 0;
  }
  CHECK(zeros >= 18);

  benchmark::Grid two;
  two.p = {4};
  two.n = {200, 400};
  two.reps = 3;
  const auto a = benchmark::run_benchmark(two, 7, 1);
  const auto b = benchmark::run_benchmark(two, 7, 3);
  CHECK(a.summary.size() == 2);
  CHECK(a.rows.size() == 6);
  CHECK(benchmark::to_csv(a) == benchmark::to_csv(b));
  CHECK(benchmark::to_csv(a).rfind("p,n,tree_type,alpha,score,rep,shd,ancestor_tpr,ancestor_recall\n", 0) == 0);

  CHECK(benchmark::quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(benchmark::quantile({4, 1, 3, 2}, 0.25) == 1.75);
  CHECK(benchmark::quantile({5}, 0.75) == 5);
}

TEST_SUITE_END();
