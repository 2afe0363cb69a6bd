#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cat::data {

/// An n x p sample of finite reals with unique column names. Stored column
/// major; immutable after construction.
class Dataset {
 public:
  /// Validates shape (n >= 2, p >= 2), finiteness and name uniqueness.
  Dataset(std::vector<std::string> names, std::vector<std::vector<double>> columns);

  std::size_t n() const { return n_; }
  std::size_t p() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::span<const double> column(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }
  double at(std::size_t row, std::size_t col) const { return values_[col * n_ + row]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// New dataset holding the given rows, in the given order.
  Dataset select_rows(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::size_t n_ = 0;
};

/// Main half (residual evaluation) and auxiliary half (regression training).
struct SplitDataset {
  Dataset main;
  Dataset auxiliary;
};

/// Default column names X1..Xp.
std::vector<std::string> default_names(std::size_t p);

Dataset load_csv(const std::filesystem::path& path, bool has_header);
Dataset parse_csv(std::string_view text, bool has_header);
/// Writes a header line and every value with 17 significant digits.
void save_csv(const Dataset& d, const std::filesystem::path& path);
std::string to_csv(const Dataset& d);

/// Deterministic random row partition. The auxiliary half receives
/// floor(fraction * n) rows, the main half the rest.
SplitDataset split(const Dataset& d, double fraction, std::uint64_t seed);

/// Population (divisor n) variance computed about the mean.
double variance(std::span<const double> x);
double mean(std::span<const double> x);

struct ColumnVariance {
  double value = 0.0;
  bool degenerate = false;  // value <= 0
};
ColumnVariance column_variance(const Dataset& d, std::size_t i);

/// Centers every column and scales it to unit (divisor n) variance.
/// Throws DegenerateError on a constant column.
Dataset standardize(const Dataset& d);

}  // namespace cat::data
