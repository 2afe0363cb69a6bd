#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cat::smoother {

enum class Backend { LocalLinear, PenalizedSpline };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct SmootherConfig {
  Backend backend = Backend::LocalLinear;
  /// Bandwidth (local-linear, in units of x) or roughness penalty (spline).
  /// Empty means "auto": chosen by k-fold cross-validation.
  std::optional<double> tuning;
  int cv_folds = 10;
  std::uint64_t seed = 0;
  /// Number of binning nodes used by the local-linear backend.
  std::size_t grid_size = 128;
};

/// Number of candidates in the cross-validation grid.
inline constexpr std::size_t kTuningGridSize = 25;

/// Estimate of E[Y | X = x] from a univariate sample. Prediction is defined
/// on the whole real line: outside the training range it continues linearly
/// from the boundary value with the boundary slope.
class RegressionFit {
 public:
  struct LocalLinear {
    double first_node = 0.0;
    double step = 0.0;
    std::vector<double> level;  // fitted value at each node
    std::vector<double> slope;  // local slope at each node
  };
  struct Spline {
    std::vector<double> knots;
    std::vector<double> values;
    std::vector<double> second_derivative;  // zero at both ends
  };

  RegressionFit(LocalLinear m, Backend b, double tuning, std::size_t n);
  RegressionFit(Spline m, double tuning, std::size_t n);

  double predict(double x) const;
  std::vector<double> predict(std::span<const double> x) const;

  Backend backend() const { return backend_; }
  double tuning() const { return tuning_; }
  std::size_t training_size() const { return n_; }
  double lower() const;
  double upper() const;

 private:
  std::variant<LocalLinear, Spline> model_;
  Backend backend_;
  double tuning_;
  std::size_t n_;
};

/// Fits the backend to (x, y). Requires at least 5 points and non-constant x.
RegressionFit fit(std::span<const double> x, std::span<const double> y,
                  const SmootherConfig& cfg);

/// The 25 log-spaced candidates for x, ascending. Later entries smooth more.
/// Local-linear: [0.05, 20] times Silverman's 1.06 sd(x) n^(-1/5).
/// Spline: [1e-6, 1e6] times a scale matching penalty and data terms.
std::vector<double> tuning_grid(std::span<const double> x, Backend backend);

/// Sum of held-out squared errors for each candidate under k-fold CV.
std::vector<double> cv_scores(std::span<const double> x, std::span<const double> y,
                              const SmootherConfig& cfg, std::span<const double> candidates);

/// Candidate minimizing the CV error; ties go to the smoother candidate.
double select_tuning(std::span<const double> x, std::span<const double> y,
                     const SmootherConfig& cfg, std::span<const double> candidates);
double select_tuning(std::span<const double> x, std::span<const double> y,
                     const SmootherConfig& cfg);

}  // namespace cat::smoother
