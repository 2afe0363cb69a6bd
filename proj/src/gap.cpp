#include "cat/gap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cat/error.hpp"
#include "cat/parallel.hpp"
#include "cat/rng.hpp"

namespace cat::gap {

namespace {

constexpr std::size_t kMinSample = 100;

std::vector<double> anticausal_residual(std::span<const double> x, std::span<const double> y,
                                        const smoother::SmootherConfig& scfg) {
  if (x.size() != y.size()) throw ConfigError("gap: x and y differ in length");
  if (x.size() < kMinSample) throw ConfigError("gap: at least 100 observations are required");
  const auto f = smoother::fit(y, x, scfg);
  std::vector<double> r(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) r[k] = x[k] - f.predict(y[k]);
  return r;
}

}  // namespace

BivariateGap bivariate_gap(std::span<const double> x, std::span<const double> y,
                           const smoother::SmootherConfig& scfg,
                           const entropy::EntropyConfig& ecfg) {
  const auto r = anticausal_residual(x, y, scfg);
  BivariateGap g;
  g.mi = entropy::mutual_information(r, y, ecfg);
  g.gap = std::max(g.mi, 0.0);
  return g;
}

BivariateGap bivariate_gap_test(std::span<const double> x, std::span<const double> y,
                                const smoother::SmootherConfig& scfg,
                                const entropy::EntropyConfig& ecfg, std::size_t permutations,
                                std::uint64_t seed, unsigned threads) {
  const auto r = anticausal_residual(x, y, scfg);
  const double hr = entropy::entropy_knn(r, ecfg);
  const double hy = entropy::entropy_knn(y, ecfg);
  BivariateGap g;
  g.mi = hr + hy - entropy::entropy_knn(r, y, ecfg);
  g.gap = std::max(g.mi, 0.0);
  g.permutations = permutations;
  if (permutations == 0) return g;

  // Marginal entropies are permutation invariant; only the joint changes.
  std::vector<double> mi(permutations);
  parallel_for(permutations, threads, [&](std::size_t b) {
    Rng rng(child_seed(seed, {0x9e7, b}));
    std::vector<double> yp(y.begin(), y.end());
    std::shuffle(yp.begin(), yp.end(), rng);
    mi[b] = hr + hy - entropy::entropy_knn(r, yp, ecfg);
  });
  const auto exceed = std::count_if(mi.begin(), mi.end(), [&](double v) { return v >= g.mi; });
  g.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + permutations);
  return g;
}

Matrix edge_reversal_gaps(const Matrix& w) {
  const std::size_t p = w.rows();
  Matrix d(p, p, std::nan(""));
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      if (i != j) d(j, i) = w(i, j) - w(j, i);
  return d;
}

GapReport empirical_gap(const Matrix& w, const Matrix* entropy) {
  GapReport rep;
  rep.best = arborescence::min_arborescence(w);
  auto alternatives = arborescence::second_best_trees(w);
  rep.second_best = std::move(alternatives.front());
  rep.empirical_gap = rep.second_best.total - rep.best.total;
  if (entropy) {
    rep.reversal = edge_reversal_gaps(*entropy);
    for (const auto& e : rep.best.tree.edges()) {
      const double v = (*rep.reversal)(e.from, e.to);
      if (!rep.min_reversal_gap || v < *rep.min_reversal_gap) rep.min_reversal_gap = v;
    }
  }
  return rep;
}

GapReport empirical_gap(const weights::WeightMatrix& w, const weights::WeightMatrix* entropy) {
  if (entropy && entropy->names() != w.names())
    throw ConfigError("gap: weight matrices have different nodes");
  const Matrix* e = entropy ? &entropy->values()
                    : w.kind() == weights::ScoreKind::Entropy ? &w.values()
                                                              : nullptr;
  return empirical_gap(w.values(), e);
}

}  // namespace cat::gap
