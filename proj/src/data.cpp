#include "cat/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "cat/error.hpp"
#include "cat/rng.hpp"

namespace cat::data {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string location(std::size_t line, std::size_t col) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t col) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty())
    throw DataError("cannot parse '" + std::string(cell) + "' as a number at " +
                    location(line, col));
  if (!std::isfinite(v))
    throw DataError("non-finite value '" + std::string(cell) + "' at " + location(line, col));
  return v;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> names, std::vector<std::vector<double>> columns)
    : names_(std::move(names)) {
  if (names_.size() != columns.size())
    throw DataError("column name count does not match column count");
  if (names_.size() < 2) throw DataError("dataset needs at least 2 columns");
  n_ = columns.front().size();
  if (n_ < 2) throw DataError("dataset needs at least 2 rows");
  std::set<std::string> seen;
  for (const auto& nm : names_)
    if (!seen.insert(nm).second) throw DataError("duplicate column name '" + nm + "'");
  values_.reserve(n_ * names_.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n_) throw DataError("columns have unequal lengths");
    for (std::size_t r = 0; r < n_; ++r) {
      if (!std::isfinite(columns[c][r]))
        throw DataError("non-finite value at row " + std::to_string(r + 1) + ", column " +
                        std::to_string(c + 1));
      values_.push_back(columns[c][r]);
    }
  }
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> cols(p(), std::vector<double>(rows.size()));
  for (std::size_t c = 0; c < p(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r) cols[c][r] = at(rows[r], c);
  return Dataset(names_, std::move(cols));
}

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> out;
  out.reserve(p);
  for (std::size_t i = 1; i <= p; ++i) out.push_back("X" + std::to_string(i));
  return out;
}

Dataset parse_csv(std::string_view text, bool has_header) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_pending = has_header;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (header_pending) {
      header_pending = false;
      for (auto f : fields) names.emplace_back(f);
      width = names.size();
      cols.assign(width, {});
      continue;
    }
    if (width == 0) {
      width = fields.size();
      cols.assign(width, {});
    }
    if (fields.size() != width)
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(width));
    for (std::size_t c = 0; c < width; ++c) cols[c].push_back(parse_cell(fields[c], line_no, c + 1));
  }
  if (width == 0) throw DataError("empty CSV input");
  if (width < 2) throw DataError("CSV input needs at least 2 columns");
  if (names.empty()) names = default_names(width);
  if (cols.front().size() < 2) throw DataError("CSV input needs at least 2 data rows");
  return Dataset(std::move(names), std::move(cols));
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), has_header);
}

std::string to_csv(const Dataset& d) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t c = 0; c < d.p(); ++c) out << (c ? "," : "") << d.names()[c];
  out << '\n';
  for (std::size_t r = 0; r < d.n(); ++r) {
    for (std::size_t c = 0; c < d.p(); ++c) out << (c ? "," : "") << d.at(r, c);
    out << '\n';
  }
  return out.str();
}

void save_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << to_csv(d);
}

SplitDataset split(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split fraction must lie in (0,1)");
  const auto n_aux = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d.n())));
  if (n_aux == 0 || n_aux >= d.n())
    throw ConfigError("split fraction " + std::to_string(fraction) + " leaves an empty half at n=" +
                      std::to_string(d.n()));
  std::vector<std::size_t> perm(d.n());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(child_seed(seed, {0x5917}));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::span<const std::size_t> all(perm);
  return {d.select_rows(all.subspan(n_aux)), d.select_rows(all.first(n_aux))};
}

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  // Constant input is exactly zero regardless of rounding in the mean.
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

ColumnVariance column_variance(const Dataset& d, std::size_t i) {
  double v = variance(d.column(i));
  return {v, !(v > 0.0)};
}

Dataset standardize(const Dataset& d) {
  std::vector<std::vector<double>> cols(d.p());
  for (std::size_t c = 0; c < d.p(); ++c) {
    auto col = d.column(c);
    double m = mean(col);
    double v = variance(col);
    if (!(v > 0.0)) throw DegenerateError("cannot standardize constant column '" + d.names()[c] + "'");
    double s = std::sqrt(v);
    cols[c].reserve(col.size());
    for (double x : col) cols[c].push_back((x - m) / s);
  }
  return Dataset(d.names(), std::move(cols));
}

}  // namespace cat::data
