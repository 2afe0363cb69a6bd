#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cat/arborescence.hpp"
#include "cat/entropy.hpp"
#include "cat/matrix.hpp"
#include "cat/smoother.hpp"
#include "cat/weights.hpp"

namespace cat::gap {

struct BivariateGap {
  double mi = 0.0;   // raw estimate I(x - E[x|y]; y)
  double gap = 0.0;  // max(mi, 0)
  std::size_t permutations = 0;
  std::optional<double> p_value;
};

/// Entropy-score gap of the pair x -> y: I(x - phi(y); y), where phi is the
/// regression of x on y.
BivariateGap bivariate_gap(std::span<const double> x, std::span<const double> y,
                           const smoother::SmootherConfig& scfg,
                           const entropy::EntropyConfig& ecfg);

/// As bivariate_gap plus a permutation p-value: y is permuted against the
/// fixed residual, p = (1 + #{I_perm >= I_obs}) / (1 + permutations).
BivariateGap bivariate_gap_test(std::span<const double> x, std::span<const double> y,
                                const smoother::SmootherConfig& scfg,
                                const entropy::EntropyConfig& ecfg, std::size_t permutations,
                                std::uint64_t seed, unsigned threads = 1);

/// D(j, i) = w(i -> j) - w(j -> i), the score change from reversing j -> i.
/// Antisymmetric; the diagonal is NaN.
Matrix edge_reversal_gaps(const Matrix& w);

struct GapReport {
  arborescence::TreeSolution best;
  arborescence::TreeSolution second_best;
  double empirical_gap = 0.0;  // second_best.total - best.total
  std::optional<Matrix> reversal;
  /// Smallest reversal gap over the edges of the best tree.
  std::optional<double> min_reversal_gap;
  std::optional<BivariateGap> bivariate;
};

/// Best and second-best trees under w; reversal gaps come from `entropy`
/// when given, else from w itself if it holds entropy weights.
GapReport empirical_gap(const weights::WeightMatrix& w,
                        const weights::WeightMatrix* entropy = nullptr);
GapReport empirical_gap(const Matrix& w, const Matrix* entropy = nullptr);

}  // namespace cat::gap
