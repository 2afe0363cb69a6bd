#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cat/arborescence.hpp"
#include "cat/data.hpp"
#include "cat/matrix.hpp"
#include "cat/weights.hpp"

namespace cat::inference {

/// Empirical first and second moments of the squared residuals
/// M_k = (X_ki - phi_ji(X_kj))^2 (one per ordered pair, pair_index order)
/// and the centred squares V_k = (X_ki - mean_i)^2 (one per node).
struct MomentSummaries {
  std::vector<std::string> names;
  std::size_t n = 0;
  std::vector<double> mu;  // p(p-1)
  std::vector<double> nu;  // p
  /// Covariance (divisor n) of the stacked vector (M, V), p(p-1) + p square.
  Matrix sigma;

  std::size_t p() const { return names.size(); }
  double sigma_m(std::size_t a, std::size_t b) const { return sigma(a, b); }
  double sigma_v(std::size_t i, std::size_t k) const { return sigma(offset() + i, offset() + k); }
  double sigma_mv(std::size_t a, std::size_t i) const { return sigma(a, offset() + i); }

 private:
  std::size_t offset() const { return mu.size(); }
};

/// Moments from residual vectors in pair_index order, each evaluated on the
/// rows of `main`. Throws DegenerateError if some mu or nu is zero.
MomentSummaries moment_summaries(std::span<const std::vector<double>> residuals,
                                 const data::Dataset& main);
/// Same, using the residual cache of a sample-split weight matrix.
MomentSummaries moment_summaries(const weights::WeightMatrix& w, const data::Dataset& main);

struct EdgeInterval {
  std::size_t from = 0;
  std::size_t to = 0;
  double w = 0.0;
  double sigma = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct ConfidenceReport {
  std::vector<std::string> names;
  std::size_t n = 0;
  double alpha = 0.0;
  double z = 0.0;
  std::vector<EdgeInterval> edges;  // pair_index order
  Matrix estimate, lower, upper;    // p x p, row = tail
  std::vector<std::string> warnings;

  std::size_t p() const { return names.size(); }
};

/// Upper alpha / (2 p (p-1)) standard normal quantile.
double bonferroni_z(double alpha, std::size_t p);

/// Simultaneous intervals w -/+ z sigma / (2 sqrt(n)) with
/// w = 1/2 log(mu_ji / nu_i) and the delta-method variance
/// sigma^2 = S_M/mu^2 + S_V/nu^2 - 2 S_MV/(mu nu).
/// A negative sigma^2 is clamped to 0 and noted in `warnings`.
ConfidenceReport confidence_intervals(const MomentSummaries& ms, double alpha);

struct TestReport {
  arborescence::EdgeConstraintSet constraints;
  double alpha = 0.0;
  /// Constrained minimum under the lower bounds; absent when infeasible.
  std::optional<double> s_lower;
  /// Unconstrained minimum under the upper bounds.
  double s_upper = 0.0;
  bool reject = false;
  bool infeasible = false;
  std::string reason;  // why the constraint set is infeasible
};

/// Rejects H0(R) when the R-constrained minimum tree score under the lower
/// bounds exceeds the unconstrained minimum under the upper bounds. An
/// infeasible R is rejected with the flag set.
TestReport test_substructure(const ConfidenceReport& cr, const arborescence::EdgeConstraintSet& r);

/// Every hypothesis against the same confidence region; no further
/// multiplicity correction.
std::vector<TestReport> test_many(const ConfidenceReport& cr,
                                  std::span<const arborescence::EdgeConstraintSet> rs,
                                  unsigned threads = 1);

/// Splits d, fits Gaussian weights with regressions trained on the
/// auxiliary half and builds the confidence region from the main half.
ConfidenceReport split_confidence(const data::Dataset& d, double split_fraction,
                                  std::uint64_t seed, weights::WeightOptions opt, double alpha);

}  // namespace cat::inference
