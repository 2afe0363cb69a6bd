#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cat/data.hpp"
#include "cat/entropy.hpp"
#include "cat/matrix.hpp"
#include "cat/smoother.hpp"

namespace cat::weights {

enum class ScoreKind { Gaussian, Entropy };

std::string to_string(ScoreKind k);
ScoreKind score_from_string(const std::string& s);

/// Position of the ordered pair (from -> to) in the p(p-1) vector that
/// groups pairs by head: all edges into node 0, then into node 1, ...
std::size_t pair_index(std::size_t from, std::size_t to, std::size_t p);

/// Directed edge weights w(j -> i) over p named nodes, with the residuals
/// X_i - phi_ji(X_j) they were computed from.
class WeightMatrix {
 public:
  WeightMatrix(std::vector<std::string> names, ScoreKind kind, Matrix values);

  std::size_t p() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  ScoreKind kind() const { return kind_; }

  /// p x p, row = tail, column = head. The diagonal is NaN.
  const Matrix& values() const { return values_; }
  double operator()(std::size_t from, std::size_t to) const { return values_(from, to); }

  bool has_residuals() const { return !residuals_.empty(); }
  std::span<const double> residuals(std::size_t from, std::size_t to) const;
  void set_residuals(std::vector<std::vector<double>> by_pair_index);

  /// Same weights with nodes reordered: new node k is old node perm[k].
  WeightMatrix permuted(std::span<const std::size_t> perm) const;

 private:
  std::vector<std::string> names_;
  ScoreKind kind_;
  Matrix values_;
  std::vector<std::vector<double>> residuals_;
};

/// 1/2 log(Var(resid) / Var(marginal)), both variances about their means
/// with divisor n. Throws DegenerateError when either variance is zero.
double gaussian_weight(std::span<const double> residuals, std::span<const double> marginal);

/// Sample-split form: 1/2 log(mean(resid^2) / Var(marginal)); the residual
/// second moment is not centred.
double gaussian_weight_split(std::span<const double> residuals, std::span<const double> marginal);

/// h(resid) - h(marginal) with the kNN entropy estimator.
double entropy_weight(std::span<const double> residuals, std::span<const double> marginal,
                      const entropy::EntropyConfig& cfg);

struct WeightOptions {
  ScoreKind kind = ScoreKind::Gaussian;
  smoother::SmootherConfig smoother;
  entropy::EntropyConfig entropy;
  unsigned threads = 1;
  bool keep_residuals = true;
};

/// All p(p-1) weights, regressions fitted and evaluated on the same sample.
WeightMatrix weight_matrix(const data::Dataset& d, const WeightOptions& opt);

/// Regressions fitted on the auxiliary half, residuals and weights computed
/// on the main half.
WeightMatrix weight_matrix(const data::SplitDataset& d, const WeightOptions& opt);

}  // namespace cat::weights
