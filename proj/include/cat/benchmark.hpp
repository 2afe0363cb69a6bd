#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cat/simulate.hpp"
#include "cat/weights.hpp"

namespace cat::benchmark {

struct Grid {
  std::vector<std::size_t> p{8};
  std::vector<std::size_t> n{500};
  std::vector<simulate::TreeType> tree_types{simulate::TreeType::Type1};
  std::vector<double> alpha{1.0};
  std::vector<weights::ScoreKind> scores{weights::ScoreKind::Gaussian};
  std::size_t reps = 10;
  smoother::SmootherConfig smoother;
  entropy::EntropyConfig entropy;
};

struct Row {
  std::size_t p = 0, n = 0;
  simulate::TreeType tree_type = simulate::TreeType::Type1;
  double alpha = 1.0;
  weights::ScoreKind score = weights::ScoreKind::Gaussian;
  std::size_t rep = 0;
  std::optional<std::size_t> shd;
  std::optional<double> ancestor_tpr, ancestor_recall;
  std::string error;  // non-empty when the replicate failed
};

struct Summary {
  std::size_t p = 0, n = 0;
  simulate::TreeType tree_type = simulate::TreeType::Type1;
  double alpha = 1.0;
  weights::ScoreKind score = weights::ScoreKind::Gaussian;
  std::size_t reps = 0, failures = 0;
  std::optional<double> shd_median, shd_q1, shd_q3;
  std::optional<double> tpr_median, recall_median;
};

struct Result {
  std::vector<Row> rows;
  std::vector<Summary> summary;  // one per grid cell, grid order
};

/// Runs every cell of the grid. Replicate r of a (p, tree type, alpha)
/// combination uses the same model across sample sizes and score kinds, so
/// cells are paired. Failed replicates are recorded, not fatal.
Result run_benchmark(const Grid& grid, std::uint64_t seed, unsigned threads = 1);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> v, double q);

std::string to_csv(const Result& r);

}  // namespace cat::benchmark
