#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cat/arborescence.hpp"
#include "cat/matrix.hpp"
#include "cat/rng.hpp"

namespace testing {

inline std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  cat::Rng rng(seed);
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline std::vector<double> uniforms(std::size_t n, std::uint64_t seed, double lo = 0.0,
                                    double hi = 1.0) {
  cat::Rng rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline cat::Matrix random_weights(std::size_t p, cat::Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  cat::Matrix w(p, p, std::nan(""));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (i != j) w(i, j) = d(rng);
  return w;
}

// Random constraint set; may be infeasible.
inline cat::arborescence::EdgeConstraintSet random_constraints(std::size_t p, cat::Rng& rng) {
  cat::arborescence::EdgeConstraintSet c;
  std::uniform_int_distribution<std::size_t> node(0, p - 1);
  std::uniform_int_distribution<int> count(0, 2);
  auto edge = [&] {
    std::size_t a = node(rng), b = node(rng);
    while (b == a) b = node(rng);
    return cat::arborescence::Edge{a, b};
  };
  for (int k = count(rng); k > 0; --k) c.required.push_back(edge());
  for (int k = count(rng); k > 0; --k) c.forbidden.push_back(edge());
  if (std::bernoulli_distribution(0.3)(rng)) c.root = node(rng);
  return c;
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace testing
