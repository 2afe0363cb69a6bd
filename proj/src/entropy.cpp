#include "cat/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/special_functions/digamma.hpp>

#include "cat/data.hpp"
#include "cat/error.hpp"
#include "cat/rng.hpp"

namespace cat::entropy {

namespace {

void check_k(std::size_t n, int k) {
  if (k < 1) throw ConfigError("entropy: k must be at least 1");
  if (static_cast<std::size_t>(k) >= n)
    throw ConfigError("entropy: k must be smaller than the sample size");
}

// Inserts d2 into the ascending list `best` if it beats the current last.
inline void offer(std::vector<double>& best, double d2) {
  if (d2 >= best.back()) return;
  std::size_t pos = best.size() - 1;
  while (pos > 0 && best[pos - 1] > d2) {
    best[pos] = best[pos - 1];
    --pos;
  }
  best[pos] = d2;
}

}  // namespace

std::vector<double> separate_duplicates(std::span<const double> x, std::uint64_t seed) {
  std::vector<double> out(x.begin(), x.end());
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  bool any = false;
  for (std::size_t r = 1; r < order.size() && !any; ++r) any = x[order[r]] == x[order[r - 1]];
  if (!any) return out;
  const double sd = std::sqrt(data::variance(x));
  if (!(sd > 0.0)) throw DegenerateError("entropy: constant sample has no density");
  Rng rng(child_seed(seed, {0x717}));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t r = 1; r < order.size(); ++r)
    if (x[order[r]] == x[order[r - 1]]) out[order[r]] = x[order[r]] + unif(rng) * 1e-10 * sd;
  return out;
}

double kl_offset(std::size_t n, int k, std::size_t d) {
  const double unit_ball = d == 1 ? 2.0 : std::numbers::pi;
  return boost::math::digamma(static_cast<double>(n)) - boost::math::digamma(static_cast<double>(k)) +
         std::log(unit_ball);
}

std::vector<double> knn_distances_1d(std::span<const double> x, int k) {
  const std::size_t n = x.size();
  check_k(n, k);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> sorted(n);
  for (std::size_t r = 0; r < n; ++r) sorted[r] = x[order[r]];
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t left = r, right = r;  // next candidates are left-1 and right+1
    double dist = 0.0;
    for (int step = 0; step < k; ++step) {
      const double dl = left > 0 ? sorted[r] - sorted[left - 1] : std::numeric_limits<double>::infinity();
      const double dr = right + 1 < n ? sorted[right + 1] - sorted[r] : std::numeric_limits<double>::infinity();
      if (dl <= dr) {
        dist = dl;
        --left;
      } else {
        dist = dr;
        ++right;
      }
    }
    out[order[r]] = dist;
  }
  return out;
}

std::vector<double> knn_distances_2d(std::span<const double> x, std::span<const double> y, int k) {
  const std::size_t n = x.size();
  check_k(n, k);
  // Equal-count vertical strips in x order, each sorted by y. A query scans
  // strips outward from its own until the x gap to the next strip exceeds
  // the current k-th best distance, and within a strip scans outward in y
  // from a binary-search start under the same rule.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && a < b);
  });
  const std::size_t width = std::max<std::size_t>(
      static_cast<std::size_t>(k) + 1, static_cast<std::size_t>(std::sqrt(4.0 * static_cast<double>(n))));
  const std::size_t strips = (n + width - 1) / width;
  std::vector<double> sx(n), sy(n), xlo(strips), xhi(strips);
  std::vector<std::size_t> strip_of(n), pos_of(n);
  for (std::size_t s = 0; s < strips; ++s) {
    const std::size_t lo = s * width, hi = std::min(n, lo + width);
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(lo),
              order.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                return y[a] < y[b] || (y[a] == y[b] && a < b);
              });
    xlo[s] = std::numeric_limits<double>::infinity();
    xhi[s] = -xlo[s];
    for (std::size_t t = lo; t < hi; ++t) {
      sx[t] = x[order[t]];
      sy[t] = y[order[t]];
      strip_of[order[t]] = s;
      pos_of[order[t]] = t;
      xlo[s] = std::min(xlo[s], sx[t]);
      xhi[s] = std::max(xhi[s], sx[t]);
    }
  }

  std::vector<double> out(n);
  std::vector<double> best(static_cast<std::size_t>(k));
  auto scan = [&](std::size_t s, std::size_t start, double qx, double qy, std::size_t self) {
    const std::size_t lo = s * width, hi = std::min(n, lo + width);
    for (std::size_t t = start; t < hi; ++t) {
      const double dy = sy[t] - qy;
      if (dy * dy >= best.back()) break;
      if (t == self) continue;
      const double dx = sx[t] - qx;
      offer(best, dx * dx + dy * dy);
    }
    for (std::size_t t = start; t-- > lo;) {
      const double dy = qy - sy[t];
      if (dy * dy >= best.back()) break;
      const double dx = sx[t] - qx;
      offer(best, dx * dx + dy * dy);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    const double qx = x[i], qy = y[i];
    const std::size_t s0 = strip_of[i];
    scan(s0, pos_of[i], qx, qy, pos_of[i]);
    bool left = s0 > 0, right = s0 + 1 < strips;
    for (std::size_t step = 1; left || right; ++step) {
      if (right) {
        const std::size_t s = s0 + step;
        const double gap = xlo[s] - qx;
        if (s >= strips || gap * gap >= best.back()) {
          right = false;
        } else {
          const std::size_t lo = s * width, hi = std::min(n, lo + width);
          const auto start = std::lower_bound(sy.begin() + static_cast<std::ptrdiff_t>(lo),
                                              sy.begin() + static_cast<std::ptrdiff_t>(hi), qy) -
                             sy.begin();
          scan(s, static_cast<std::size_t>(start), qx, qy, n);
          right = s + 1 < strips;
        }
      }
      if (left) {
        const std::size_t s = s0 - step;
        const double gap = qx - xhi[s];
        if (gap * gap >= best.back()) {
          left = false;
        } else {
          const std::size_t lo = s * width, hi = std::min(n, lo + width);
          const auto start = std::lower_bound(sy.begin() + static_cast<std::ptrdiff_t>(lo),
                                              sy.begin() + static_cast<std::ptrdiff_t>(hi), qy) -
                             sy.begin();
          scan(s, static_cast<std::size_t>(start), qx, qy, n);
          left = s > 0;
        }
      }
    }
    out[i] = std::sqrt(best.back());
  }
  return out;
}

double entropy_knn(std::span<const std::span<const double>> columns, const EntropyConfig& cfg) {
  const std::size_t d = columns.size();
  if (d != 1 && d != 2) throw ConfigError("entropy: only dimensions 1 and 2 are supported");
  const std::size_t n = columns[0].size();
  for (auto c : columns)
    if (c.size() != n) throw ConfigError("entropy: columns differ in length");
  check_k(n, cfg.k);

  std::vector<double> rho;
  if (d == 1) {
    const auto x = separate_duplicates(columns[0], cfg.jitter_seed);
    rho = knn_distances_1d(x, cfg.k);
  } else {
    const auto x = separate_duplicates(columns[0], cfg.jitter_seed);
    const auto y = separate_duplicates(columns[1], cfg.jitter_seed);
    const double vx = data::variance(x);
    const double vy = data::variance(y);
    const double mx = data::mean(x), my = data::mean(y);
    double cxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) cxy += (x[i] - mx) * (y[i] - my);
    cxy /= static_cast<double>(n);
    if (!(vx > 0.0) || !(vy > 0.0) || 1.0 - cxy * cxy / (vx * vy) < 1e-12)
      throw DegenerateError("entropy: bivariate sample lies on a line (degenerate joint density)");
    rho = knn_distances_2d(x, y, cfg.k);
  }
  double sum_log = 0.0;
  for (double r : rho) {
    if (!(r > 0.0))
      throw DegenerateError("entropy: coincident points remain after duplicate jitter");
    sum_log += std::log(r);
  }
  return kl_offset(n, cfg.k, d) +
         static_cast<double>(d) * sum_log / static_cast<double>(n);
}

double entropy_knn(std::span<const double> x, const EntropyConfig& cfg) {
  std::array<std::span<const double>, 1> cols{x};
  return entropy_knn(cols, cfg);
}

double entropy_knn(std::span<const double> x, std::span<const double> y, const EntropyConfig& cfg) {
  std::array<std::span<const double>, 2> cols{x, y};
  return entropy_knn(cols, cfg);
}

double mutual_information(std::span<const double> x, std::span<const double> y,
                          const EntropyConfig& cfg) {
  if (x.size() != y.size()) throw ConfigError("mutual information: lengths differ");
  return entropy_knn(x, cfg) + entropy_knn(y, cfg) - entropy_knn(x, y, cfg);
}

}  // namespace cat::entropy
