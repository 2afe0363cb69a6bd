#include <doctest.h>

#include <cmath>

#include "cat/error.hpp"
#include "cat/simulate.hpp"
#include "cat/weights.hpp"
#include "helpers.hpp"

using namespace cat;
using namespace cat::weights;

namespace {

data::Dataset pair_data(std::size_t n, std::uint64_t seed) {
  const auto x = testing::normals(n, seed);
  const auto e = testing::normals(n, seed + 1, 0.5);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(x[i]) + e[i];
  return data::Dataset({"x", "y"}, {x, y});
}

}  // namespace

TEST_SUITE_BEGIN("weights");

TEST_CASE("pair index groups by head") {
  const std::size_t p = 4;
  std::vector<int> seen(p * (p - 1), 0);
  for (std::size_t to = 0; to < p; ++to)
    for (std::size_t from = 0; from < p; ++from)
      if (from != to) ++seen.at(pair_index(from, to, p));
  for (int s : seen) CHECK(s == 1);
  CHECK(pair_index(1, 0, p) == 0);
  CHECK(pair_index(3, 0, p) == 2);
  CHECK(pair_index(0, 1, p) == 3);
}

TEST_CASE("Gaussian weight by hand") {
  const std::vector<double> m{1, -1, 1, -1};
  CHECK(gaussian_weight(m, m) == 0.0);
  const std::vector<double> r{0.5, -0.5, 0.5, -0.5};
  CHECK(gaussian_weight(r, m) == doctest::Approx(0.5 * std::log(0.25)).epsilon(1e-15));
  CHECK(gaussian_weight(r, m) == doctest::Approx(-0.6931).epsilon(1e-4));
  const std::vector<double> zero(4, 0.0);
  CHECK_THROWS_AS(gaussian_weight(zero, m), DegenerateError);
  CHECK_THROWS_AS(gaussian_weight(m, zero), DegenerateError);

  // centred vs uncentred numerator
  const std::vector<double> shifted{1.5, 0.5, 1.5, 0.5};
  CHECK(gaussian_weight(shifted, m) == doctest::Approx(0.5 * std::log(0.25)).epsilon(1e-15));
  CHECK(gaussian_weight_split(shifted, m) == doctest::Approx(0.5 * std::log(1.25)).epsilon(1e-15));
}

TEST_CASE("entropy weight closed forms") {
  const entropy::EntropyConfig cfg;
  const auto m = testing::normals(100000, 1);
  CHECK(entropy_weight(m, m, cfg) == 0.0);
  const auto r = testing::normals(100000, 2, 0.5);
  CHECK(std::abs(entropy_weight(r, m, cfg) - std::log(0.5)) <= 0.03);
  const auto u1 = testing::uniforms(100000, 3, 0, 1);
  const auto u2 = testing::uniforms(100000, 4, 0, 2);
  CHECK(std::abs(entropy_weight(u2, u1, cfg) - std::log(2.0)) <= 0.03);
}

TEST_CASE("two nodes give two weights") {
  const auto d = pair_data(500, 5);
  const auto w = weight_matrix(d, WeightOptions{});
  CHECK(w.p() == 2);
  CHECK(std::isfinite(w(0, 1)));
  CHECK(std::isfinite(w(1, 0)));
  CHECK(std::isnan(w(0, 0)));
  REQUIRE(w.has_residuals());
  CHECK(w.residuals(0, 1).size() == 500);
  // the stored residuals reproduce the weight
  CHECK(gaussian_weight(w.residuals(0, 1), d.column(1)) == w(0, 1));
  // causal direction scores lower
  CHECK(w(0, 1) < w(1, 0));
}

TEST_CASE("relabelling equivariance") {
  const std::size_t n = 400;
  const auto a = testing::normals(n, 6);
  const auto e1 = testing::normals(n, 7, 0.4);
  const auto e2 = testing::normals(n, 8, 0.4);
  std::vector<double> b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = std::tanh(a[i]) + e1[i];
    c[i] = b[i] * b[i] + e2[i];
  }
  const data::Dataset d({"a", "b", "c"}, {a, b, c});
  const data::Dataset dp({"c", "a", "b"}, {c, a, b});
  WeightOptions opt;
  for (auto kind : {ScoreKind::Gaussian, ScoreKind::Entropy}) {
    opt.kind = kind;
    const auto w = weight_matrix(d, opt);
    const auto wp = weight_matrix(dp, opt);
    const std::size_t perm[] = {2, 0, 1};
    const auto moved = w.permuted(perm);
    CHECK(moved.names() == wp.names());
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) CHECK(moved(i, j) == doctest::Approx(wp(i, j)).epsilon(1e-10));
  }
}

TEST_CASE("centering invariance") {
  const auto d = pair_data(600, 9);
  std::vector<double> x(d.column(0).begin(), d.column(0).end());
  std::vector<double> y(d.column(1).begin(), d.column(1).end());
  for (double& v : x) v += 100.0;
  for (double& v : y) v -= 42.0;
  const auto w = weight_matrix(d, WeightOptions{});
  const auto ws = weight_matrix(data::Dataset({"x", "y"}, {x, y}), WeightOptions{});
  CHECK(std::abs(w(0, 1) - ws(0, 1)) <= 1e-10);
  CHECK(std::abs(w(1, 0) - ws(1, 0)) <= 1e-10);
}

TEST_CASE("Gaussian and entropy kinds agree for Gaussian data") {
  const std::size_t n = 20000;
  const auto x = testing::normals(n, 10);
  const auto e = testing::normals(n, 11, 0.6);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.8 * x[i] + e[i];
  const data::Dataset d({"x", "y"}, {x, y});
  WeightOptions g, h;
  h.kind = ScoreKind::Entropy;
  const auto wg = weight_matrix(d, g);
  const auto wh = weight_matrix(d, h);
  CHECK(std::abs(wg(0, 1) - wh(0, 1)) <= 0.05);
  CHECK(std::abs(wg(1, 0) - wh(1, 0)) <= 0.05);
}

TEST_CASE("parallel computation matches sequential") {
  const auto d = simulate::sample_scm(simulate::chain3(), 800, 12);
  WeightOptions seq, par;
  par.threads = 4;
  for (auto kind : {ScoreKind::Gaussian, ScoreKind::Entropy}) {
    seq.kind = par.kind = kind;
    const auto a = weight_matrix(d, seq);
    const auto b = weight_matrix(d, par);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) CHECK(a(i, j) == b(i, j));
  }
}

TEST_CASE("split weights use the main half") {
  const auto d = pair_data(400, 13);
  const auto s = data::split(d, 0.5, 3);
  const auto w = weight_matrix(s, WeightOptions{});
  CHECK(w.residuals(0, 1).size() == s.main.n());
  CHECK(std::isfinite(w(0, 1)));
}

TEST_CASE("degenerate pairs are reported") {
  std::vector<double> x = testing::normals(100, 14);
  std::vector<double> c(100, 1.0);
  CHECK_THROWS_AS(weight_matrix(data::Dataset({"x", "c"}, {x, c}), WeightOptions{}),
                  DegenerateError);
}

TEST_CASE("three-node chain ordering at n = 1e6") {
  const auto d = simulate::sample_scm(simulate::chain3(), 1000000, 3);
  const auto w = weight_matrix(d, WeightOptions{});
  const std::size_t X = 0, Y = 1, Z = 2;
  CHECK(w(Z, Y) < w(Y, Z));
  CHECK(w(Y, Z) < w(X, Y));
  CHECK(w(X, Y) < w(Y, X));
}

TEST_SUITE_END();
