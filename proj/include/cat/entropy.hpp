#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cat::entropy {

struct EntropyConfig {
  int k = 3;  // neighbour order
  /// Seed of the stream used to separate exactly duplicated values.
  std::uint64_t jitter_seed = 0x6a177e5;
};

/// Kozachenko-Leonenko k-nearest-neighbour estimate of differential entropy
/// (nats) for d = columns.size() in {1, 2}, Euclidean distance:
///   psi(n) - psi(k) + log(c_d) + (d/n) sum_m log rho_{k,m}
/// where c_d is the volume of the unit d-ball. Exactly repeated values within
/// a column are separated by a deterministic jitter of order 1e-10 sd.
double entropy_knn(std::span<const std::span<const double>> columns, const EntropyConfig& cfg);
double entropy_knn(std::span<const double> x, const EntropyConfig& cfg);
double entropy_knn(std::span<const double> x, std::span<const double> y, const EntropyConfig& cfg);

/// I(x; y) = h(x) + h(y) - h(x, y). Raw estimate; may be slightly negative.
double mutual_information(std::span<const double> x, std::span<const double> y,
                          const EntropyConfig& cfg);

/// Repeated values replaced by value + u * 1e-10 * sd, u ~ U(-1, 1), assigned
/// in sorted order so the result does not depend on row order.
std::vector<double> separate_duplicates(std::span<const double> x, std::uint64_t seed);

/// Digamma-based constant psi(n) - psi(k) + log(c_d).
double kl_offset(std::size_t n, int k, std::size_t d);

/// Distance from every point to its k-th nearest neighbour, in input order.
std::vector<double> knn_distances_1d(std::span<const double> x, int k);
std::vector<double> knn_distances_2d(std::span<const double> x, std::span<const double> y, int k);

}  // namespace cat::entropy
