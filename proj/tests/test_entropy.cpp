#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cat/entropy.hpp"
#include "cat/error.hpp"
#include "helpers.hpp"

using namespace cat;
using namespace cat::entropy;

namespace {

const EntropyConfig kCfg{};

// Brute-force k-th neighbour distance, independent of the sorted sweep.
std::vector<double> knn_brute(const std::vector<double>& x, const std::vector<double>* y, int k) {
  const std::size_t n = x.size();
  std::vector<double> out(n), d;
  for (std::size_t i = 0; i < n; ++i) {
    d.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = x[i] - x[j];
      const double dy = y ? (*y)[i] - (*y)[j] : 0.0;
      d.push_back(std::hypot(dx, dy));
    }
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    out[i] = d[k - 1];
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("entropy");

TEST_CASE("neighbour distances match brute force") {
  const auto x = testing::normals(300, 1);
  const auto y = testing::normals(300, 2);
  for (int k : {1, 3, 7}) {
    const auto a = knn_distances_1d(x, k);
    const auto b = knn_brute(x, nullptr, k);
    const auto c = knn_distances_2d(x, y, k);
    const auto d = knn_brute(x, &y, k);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
      CHECK(c[i] == doctest::Approx(d[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("estimator formula") {
  const auto x = testing::normals(200, 3);
  const auto rho = knn_brute(x, nullptr, 3);
  double s = 0;
  for (double r : rho) s += std::log(r);
  // psi(n) - psi(k) + log 2 for d = 1
  const double want = kl_offset(200, 3, 1) + s / 200.0;
  CHECK(entropy_knn(x, kCfg) == doctest::Approx(want).epsilon(1e-12));
  const double euler = 0.57721566490153286;
  double harmonic = 0;
  for (int i = 1; i < 200; ++i) harmonic += 1.0 / i;
  const double psi_n = -euler + harmonic;
  const double psi_k = -euler + 1.0 + 0.5;
  CHECK(kl_offset(200, 3, 1) == doctest::Approx(psi_n - psi_k + std::log(2.0)).epsilon(1e-12));
  CHECK(kl_offset(200, 3, 2) == doctest::Approx(psi_n - psi_k + std::log(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("standard normal closed form") {
  const double truth = 0.5 * std::log(2 * std::numbers::pi * std::numbers::e);
  double mean = 0;
  for (std::uint64_t s = 0; s < 20; ++s) mean += entropy_knn(testing::normals(100000, 100 + s), kCfg);
  mean /= 20;
  CHECK(std::abs(mean - truth) <= 0.02);
}

TEST_CASE("uniform closed form") {
  double mean = 0;
  for (std::uint64_t s = 0; s < 20; ++s) mean += entropy_knn(testing::uniforms(100000, 200 + s), kCfg);
  mean /= 20;
  CHECK(std::abs(mean) <= 0.02);
}

TEST_CASE("scaling law") {
  const auto x = testing::normals(20000, 4);
  const auto y = testing::normals(20000, 5);
  for (double a : {0.1, 3.0, 50.0}) {
    std::vector<double> ax(x.size()), ay(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      ax[i] = a * x[i];
      ay[i] = a * y[i];
    }
    CHECK(std::abs(entropy_knn(ax, kCfg) - entropy_knn(x, kCfg) - std::log(a)) <= 0.02);
    CHECK(std::abs(entropy_knn(ax, ay, kCfg) - entropy_knn(x, y, kCfg) - 2 * std::log(a)) <= 0.02);
  }
}

TEST_CASE("mutual information") {
  const auto x = testing::normals(50000, 6);
  const auto z = testing::normals(50000, 7);
  CHECK(std::abs(mutual_information(x, z, kCfg)) <= 0.02);

  const double rho = 0.5;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = rho * x[i] + std::sqrt(1 - rho * rho) * z[i];
  const double truth = -0.5 * std::log(1 - rho * rho);
  CHECK(truth == doctest::Approx(0.1438).epsilon(1e-3));
  CHECK(std::abs(mutual_information(x, y, kCfg) - truth) <= 0.03);

  CHECK_THROWS_AS(mutual_information(x, x, kCfg), DegenerateError);
}

TEST_CASE("invariances") {
  const auto x = testing::normals(3000, 8);
  const auto y = testing::uniforms(3000, 9);
  const double h = entropy_knn(x, kCfg);
  const double hxy = entropy_knn(x, y, kCfg);

  std::vector<std::size_t> perm(x.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng rng(10);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> px(x.size()), py(y.size()), sx(x.size()), sy(y.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    px[i] = x[perm[i]];
    py[i] = y[perm[i]];
    sx[i] = x[i] + 7.5;
    sy[i] = y[i] - 3.25;
  }
  CHECK(std::abs(entropy_knn(px, kCfg) - h) < 1e-12);
  CHECK(std::abs(entropy_knn(px, py, kCfg) - hxy) < 1e-12);
  CHECK(std::abs(entropy_knn(sx, kCfg) - h) < 1e-10);
  CHECK(std::abs(entropy_knn(sx, sy, kCfg) - hxy) < 1e-10);

  CHECK(mutual_information(x, y, kCfg) == mutual_information(y, x, kCfg));
}

TEST_CASE("duplicates are separated deterministically") {
  std::vector<double> x = testing::normals(1000, 11);
  for (std::size_t i = 0; i < 200; ++i) x[500 + i] = x[i];
  const auto a = separate_duplicates(x, 1);
  const auto b = separate_duplicates(x, 1);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(a[i] - x[i]) < 1e-8);
  CHECK(std::isfinite(entropy_knn(x, kCfg)));

  // row order does not change which copy gets which offset
  std::vector<double> rev(x.rbegin(), x.rend());
  auto ra = separate_duplicates(rev, 1);
  std::sort(ra.begin(), ra.end());
  CHECK(ra == sorted);
}

TEST_CASE("preconditions") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(entropy_knn(x, kCfg), ConfigError);
  EntropyConfig zero;
  zero.k = 0;
  CHECK_THROWS_AS(entropy_knn(testing::normals(10, 1), zero), ConfigError);
  const std::vector<double> c(100, 2.0);
  CHECK_THROWS_AS(entropy_knn(c, kCfg), DegenerateError);
}

TEST_SUITE_END();
