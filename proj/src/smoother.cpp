#include "cat/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cat/data.hpp"
#include "cat/error.hpp"
#include "cat/rng.hpp"

namespace cat::smoother {

std::string to_string(Backend b) {
  return b == Backend::LocalLinear ? "local-linear" : "penalized-spline";
}

Backend backend_from_string(const std::string& s) {
  if (s == "local-linear" || s == "local_linear" || s == "ll") return Backend::LocalLinear;
  if (s == "penalized-spline" || s == "spline") return Backend::PenalizedSpline;
  throw ConfigError("unknown smoother backend '" + s + "'");
}

namespace {

constexpr double kKernelCutoff = 5.0;  // Gaussian kernel truncated at 5 bandwidths

// ---------------------------------------------------------------------------
// Local-linear engine. Works on standardized x (u) and centered y. Training
// points are linearly binned onto an equispaced node grid; each node carries
// the weighted moments sum(w), sum(w u), sum(w u^2), sum(w y), sum(w u y) of
// its points. The local fit at node g is then an exact weighted least-squares
// line through the original points, with point weights equal to the kernel
// interpolated between the two nodes the point was binned to.
// ---------------------------------------------------------------------------

struct Grid {
  double first = 0.0;
  double step = 1.0;
  std::size_t count = 0;
  double node(std::size_t k) const { return first + step * static_cast<double>(k); }
};

struct Bins {
  std::vector<double> a0, a1, a2, b0, b1;
  explicit Bins(std::size_t g) : a0(g), a1(g), a2(g), b0(g), b1(g) {}
};

struct NodeLines {
  std::vector<double> level, slope;
};

void add_to_bins(Bins& bins, const Grid& grid, double u, double y) {
  double s = (u - grid.first) / grid.step;
  const double last = static_cast<double>(grid.count - 1);
  s = std::clamp(s, 0.0, last);
  auto k = static_cast<std::size_t>(std::floor(s));
  if (k >= grid.count - 1) k = grid.count - 2;
  const double frac = s - static_cast<double>(k);
  const double wl = 1.0 - frac;
  const double wr = frac;
  const double uu = u * u;
  bins.a0[k] += wl;
  bins.a1[k] += wl * u;
  bins.a2[k] += wl * uu;
  bins.b0[k] += wl * y;
  bins.b1[k] += wl * u * y;
  bins.a0[k + 1] += wr;
  bins.a1[k + 1] += wr * u;
  bins.a2[k + 1] += wr * uu;
  bins.b0[k + 1] += wr * y;
  bins.b1[k + 1] += wr * u * y;
}

NodeLines smooth_nodes(const Bins& bins, const Grid& grid, double h) {
  const std::size_t g_count = grid.count;
  const auto reach = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(g_count - 1), std::ceil(kKernelCutoff * h / grid.step)));
  std::vector<double> kern(reach + 1);
  for (std::size_t d = 0; d <= reach; ++d) {
    double z = static_cast<double>(d) * grid.step / h;
    kern[d] = std::exp(-0.5 * z * z);
  }

  NodeLines out{std::vector<double>(g_count), std::vector<double>(g_count)};
  std::vector<double> s0(g_count);
  std::vector<char> valid(g_count, 0);
  double max_s0 = 0.0;
  for (std::size_t g = 0; g < g_count; ++g) {
    const std::size_t lo = g > reach ? g - reach : 0;
    const std::size_t hi = std::min(g_count - 1, g + reach);
    double c0 = 0, c1 = 0, c2 = 0, d0 = 0, d1 = 0;
    for (std::size_t b = lo; b <= hi; ++b) {
      const double k = kern[b > g ? b - g : g - b];
      c0 += k * bins.a0[b];
      c1 += k * bins.a1[b];
      c2 += k * bins.a2[b];
      d0 += k * bins.b0[b];
      d1 += k * bins.b1[b];
    }
    const double gc = grid.node(g);
    const double S0 = c0;
    const double S1 = c1 - gc * c0;
    const double S2 = c2 - 2.0 * gc * c1 + gc * gc * c0;
    const double T0 = d0;
    const double T1 = d1 - gc * d0;
    s0[g] = S0;
    max_s0 = std::max(max_s0, S0);
    const double det = S0 * S2 - S1 * S1;
    if (S0 > 0.0 && det > 1e-10 * S0 * std::abs(S2)) {
      const double slope = (S0 * T1 - S1 * T0) / det;
      out.slope[g] = slope;
      out.level[g] = (T0 - slope * S1) / S0;
    } else if (S0 > 0.0) {
      out.slope[g] = 0.0;
      out.level[g] = T0 / S0;
    }
  }
  for (std::size_t g = 0; g < g_count; ++g) valid[g] = s0[g] > 1e-12 * max_s0;

  // Nodes without kernel mass continue the nearest supported node's line.
  std::vector<std::ptrdiff_t> left(g_count, -1), right(g_count, -1);
  for (std::size_t g = 0, last = g_count; g < g_count; ++g) {
    if (valid[g]) last = g;
    left[g] = last == g_count ? -1 : static_cast<std::ptrdiff_t>(last);
  }
  for (std::size_t g = g_count, last = g_count; g-- > 0;) {
    if (valid[g]) last = g;
    right[g] = last == g_count ? -1 : static_cast<std::ptrdiff_t>(last);
  }
  for (std::size_t g = 0; g < g_count; ++g) {
    if (valid[g]) continue;
    std::ptrdiff_t src = left[g];
    if (src < 0 || (right[g] >= 0 && right[g] - static_cast<std::ptrdiff_t>(g) <
                                         static_cast<std::ptrdiff_t>(g) - src))
      src = right[g];
    const auto s = static_cast<std::size_t>(src);
    out.slope[g] = out.slope[s];
    out.level[g] = out.level[s] + out.slope[s] * (grid.node(g) - grid.node(s));
  }
  return out;
}

double eval_nodes(const std::vector<double>& level, const std::vector<double>& slope,
                  double first, double step, double x) {
  const std::size_t count = level.size();
  const double s = (x - first) / step;
  if (s <= 0.0) return level[0] + slope[0] * (x - first);
  const double last = static_cast<double>(count - 1);
  if (s >= last) {
    const double node = first + step * last;
    return level[count - 1] + slope[count - 1] * (x - node);
  }
  auto k = static_cast<std::size_t>(std::floor(s));
  if (k >= count - 1) k = count - 2;
  // cubic Hermite on (level, slope), so the curve is C1 and meets the
  // linear tails with matching slope
  const double t = s - static_cast<double>(k);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * level[k] + (t3 - 2 * t2 + t) * step * slope[k] +
         (3 * t2 - 2 * t3) * level[k + 1] + (t3 - t2) * step * slope[k + 1];
}

struct Standardized {
  double mx = 0.0, sx = 1.0, my = 0.0;
  std::vector<double> u, yc;
  Grid grid;
};

Standardized standardize_xy(std::span<const double> x, std::span<const double> y,
                            std::size_t grid_size) {
  Standardized s;
  s.mx = data::mean(x);
  s.sx = std::sqrt(data::variance(x));
  s.my = data::mean(y);
  s.u.resize(x.size());
  s.yc.resize(y.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.u[i] = (x[i] - s.mx) / s.sx;
    s.yc[i] = y[i] - s.my;
    lo = std::min(lo, s.u[i]);
    hi = std::max(hi, s.u[i]);
  }
  s.grid = {lo, (hi - lo) / static_cast<double>(grid_size - 1), grid_size};
  return s;
}

// ---------------------------------------------------------------------------
// Cubic smoothing spline (Reinsch). Minimizes
//   sum_r w_r (ybar_r - g(t_r))^2 + lambda * integral g''^2
// over natural cubic splines with knots at the distinct x values.
// ---------------------------------------------------------------------------

struct Knots {
  std::vector<double> t, w, ybar;
};

// `order` lists point indices sorted by x.
Knots make_knots(std::span<const double> x, std::span<const double> y,
                 std::span<const std::size_t> order) {
  Knots k;
  for (std::size_t idx : order) {
    if (!k.t.empty() && x[idx] == k.t.back()) {
      k.w.back() += 1.0;
      k.ybar.back() += y[idx];
    } else {
      k.t.push_back(x[idx]);
      k.w.push_back(1.0);
      k.ybar.push_back(y[idx]);
    }
  }
  for (std::size_t r = 0; r < k.t.size(); ++r) k.ybar[r] /= k.w[r];
  return k;
}

struct Penta {
  std::vector<double> d0, d1, d2;  // main, first and second sub-diagonals
};

// Builds R and Q^T W^-1 Q as separate pentadiagonal matrices.
void penalty_matrices(const Knots& k, Penta& r, Penta& qwq) {
  const std::size_t n = k.t.size();
  const std::size_t m = n - 2;
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = k.t[i + 1] - k.t[i];
  auto q = [&](std::size_t j, int which) {
    switch (which) {
      case 0: return 1.0 / h[j];
      case 1: return -1.0 / h[j] - 1.0 / h[j + 1];
      default: return 1.0 / h[j + 1];
    }
  };
  r = {std::vector<double>(m), std::vector<double>(m ? m - 1 : 0), std::vector<double>(m > 1 ? m - 2 : 0)};
  qwq = r;
  for (std::size_t j = 0; j < m; ++j) {
    r.d0[j] = (h[j] + h[j + 1]) / 3.0;
    if (j + 1 < m) r.d1[j] = h[j + 1] / 6.0;
    qwq.d0[j] = q(j, 0) * q(j, 0) / k.w[j] + q(j, 1) * q(j, 1) / k.w[j + 1] +
                q(j, 2) * q(j, 2) / k.w[j + 2];
    if (j + 1 < m)
      qwq.d1[j] = q(j, 1) * q(j + 1, 0) / k.w[j + 1] + q(j, 2) * q(j + 1, 1) / k.w[j + 2];
    if (j + 2 < m) qwq.d2[j] = q(j, 2) * q(j + 2, 0) / k.w[j + 2];
  }
}

// Solves a symmetric positive definite pentadiagonal system by LDL^T.
std::vector<double> solve_penta(const Penta& a, std::vector<double> b) {
  const std::size_t m = a.d0.size();
  std::vector<double> d(m), l1(m, 0.0), l2(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (i >= 2) l2[i] = a.d2[i - 2] / d[i - 2];
    if (i >= 1) {
      double v = a.d1[i - 1];
      if (i >= 2) v -= l2[i] * l1[i - 1] * d[i - 2];
      l1[i] = v / d[i - 1];
    }
    double di = a.d0[i];
    if (i >= 1) di -= l1[i] * l1[i] * d[i - 1];
    if (i >= 2) di -= l2[i] * l2[i] * d[i - 2];
    d[i] = di;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (i >= 1) b[i] -= l1[i] * b[i - 1];
    if (i >= 2) b[i] -= l2[i] * b[i - 2];
  }
  for (std::size_t i = 0; i < m; ++i) b[i] /= d[i];
  for (std::size_t i = m; i-- > 0;) {
    if (i + 1 < m) b[i] -= l1[i + 1] * b[i + 1];
    if (i + 2 < m) b[i] -= l2[i + 2] * b[i + 2];
  }
  return b;
}

RegressionFit::Spline fit_spline(const Knots& k, double lambda) {
  const std::size_t n = k.t.size();
  RegressionFit::Spline s;
  s.knots = k.t;
  s.second_derivative.assign(n, 0.0);
  if (n == 2) {
    s.values = k.ybar;
    return s;
  }
  Penta r, qwq;
  penalty_matrices(k, r, qwq);
  const std::size_t m = n - 2;
  Penta a = r;
  for (std::size_t j = 0; j < m; ++j) a.d0[j] += lambda * qwq.d0[j];
  for (std::size_t j = 0; j + 1 < m; ++j) a.d1[j] += lambda * qwq.d1[j];
  for (std::size_t j = 0; j + 2 < m; ++j) a.d2[j] += lambda * qwq.d2[j];
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = k.t[i + 1] - k.t[i];
  std::vector<double> rhs(m);
  for (std::size_t j = 0; j < m; ++j)
    rhs[j] = k.ybar[j] / h[j] - (1.0 / h[j] + 1.0 / h[j + 1]) * k.ybar[j + 1] +
             k.ybar[j + 2] / h[j + 1];
  std::vector<double> gamma = solve_penta(a, std::move(rhs));
  // g = ybar - lambda W^-1 Q gamma
  std::vector<double> qg(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    qg[j] += gamma[j] / h[j];
    qg[j + 1] += -(1.0 / h[j] + 1.0 / h[j + 1]) * gamma[j];
    qg[j + 2] += gamma[j] / h[j + 1];
  }
  s.values.resize(n);
  for (std::size_t r2 = 0; r2 < n; ++r2) s.values[r2] = k.ybar[r2] - lambda * qg[r2] / k.w[r2];
  for (std::size_t j = 0; j < m; ++j) s.second_derivative[j + 1] = gamma[j];
  return s;
}

double eval_spline(const RegressionFit::Spline& s, double x) {
  const auto& t = s.knots;
  const auto& g = s.values;
  const auto& c = s.second_derivative;
  const std::size_t n = t.size();
  if (x <= t.front()) {
    const double h = t[1] - t[0];
    const double slope = (g[1] - g[0]) / h - h * c[1] / 6.0;
    return g[0] + slope * (x - t[0]);
  }
  if (x >= t.back()) {
    const double h = t[n - 1] - t[n - 2];
    const double slope = (g[n - 1] - g[n - 2]) / h + h * c[n - 2] / 6.0;
    return g[n - 1] + slope * (x - t[n - 1]);
  }
  auto it = std::upper_bound(t.begin(), t.end(), x);
  const auto r = static_cast<std::size_t>(it - t.begin()) - 1;
  const double h = t[r + 1] - t[r];
  const double a = x - t[r];
  const double b = t[r + 1] - x;
  return (a * g[r + 1] + b * g[r]) / h -
         a * b / 6.0 * ((1.0 + a / h) * c[r + 1] + (1.0 + b / h) * c[r]);
}

double spline_penalty_scale(const Knots& k) {
  if (k.t.size() < 3) return 1.0;
  Penta r, qwq;
  penalty_matrices(k, r, qwq);
  double tr_r = 0.0, tr_q = 0.0;
  for (double v : r.d0) tr_r += v;
  for (double v : qwq.d0) tr_q += v;
  return tr_r / tr_q;
}

std::vector<std::size_t> sorted_order(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return order;
}

void validate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("smoother: x and y differ in length");
  if (x.size() < 5) throw DegenerateError("smoother: need at least 5 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw DataError("smoother: non-finite input");
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw DegenerateError("smoother: all predictor values are identical");
}

std::vector<int> fold_ids(std::size_t n, int folds, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(child_seed(seed, {0xf01d}));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> id(n);
  for (std::size_t r = 0; r < n; ++r) id[perm[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
  return id;
}

}  // namespace

RegressionFit::RegressionFit(LocalLinear m, Backend b, double tuning, std::size_t n)
    : model_(std::move(m)), backend_(b), tuning_(tuning), n_(n) {}

RegressionFit::RegressionFit(Spline m, double tuning, std::size_t n)
    : model_(std::move(m)), backend_(Backend::PenalizedSpline), tuning_(tuning), n_(n) {}

double RegressionFit::predict(double x) const {
  if (const auto* ll = std::get_if<LocalLinear>(&model_))
    return eval_nodes(ll->level, ll->slope, ll->first_node, ll->step, x);
  return eval_spline(std::get<Spline>(model_), x);
}

std::vector<double> RegressionFit::predict(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = predict(x[i]);
  return out;
}

double RegressionFit::lower() const {
  if (const auto* ll = std::get_if<LocalLinear>(&model_)) return ll->first_node;
  return std::get<Spline>(model_).knots.front();
}

double RegressionFit::upper() const {
  if (const auto* ll = std::get_if<LocalLinear>(&model_))
    return ll->first_node + ll->step * static_cast<double>(ll->level.size() - 1);
  return std::get<Spline>(model_).knots.back();
}

std::vector<double> tuning_grid(std::span<const double> x, Backend backend) {
  std::vector<double> grid(kTuningGridSize);
  const double steps = static_cast<double>(kTuningGridSize - 1);
  if (backend == Backend::LocalLinear) {
    const double sd = std::sqrt(data::variance(x));
    const double silverman = 1.06 * sd * std::pow(static_cast<double>(x.size()), -0.2);
    const double lo = std::log(0.05 * silverman);
    const double hi = std::log(20.0 * silverman);
    for (std::size_t k = 0; k < kTuningGridSize; ++k)
      grid[k] = std::exp(lo + (hi - lo) * static_cast<double>(k) / steps);
  } else {
    const auto order = sorted_order(x);
    std::vector<double> zeros(x.size(), 0.0);
    const double scale = spline_penalty_scale(make_knots(x, zeros, order));
    for (std::size_t k = 0; k < kTuningGridSize; ++k)
      grid[k] = scale * std::pow(10.0, -6.0 + 12.0 * static_cast<double>(k) / steps);
  }
  return grid;
}

std::vector<double> cv_scores(std::span<const double> x, std::span<const double> y,
                              const SmootherConfig& cfg, std::span<const double> candidates) {
  validate(x, y);
  const std::size_t n = x.size();
  if (cfg.cv_folds < 2) throw ConfigError("smoother: cv_folds must be at least 2");
  if (static_cast<std::size_t>(cfg.cv_folds) > n)
    throw ConfigError("smoother: cv_folds exceeds the sample size");
  if (cfg.grid_size < 2) throw ConfigError("smoother: grid_size must be at least 2");
  for (double c : candidates)
    if (!(c > 0.0)) throw ConfigError("smoother: tuning candidates must be positive");
  const int folds = cfg.cv_folds;
  const std::vector<int> fold = fold_ids(n, folds, cfg.seed);
  std::vector<std::vector<std::size_t>> held(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < n; ++i) held[static_cast<std::size_t>(fold[i])].push_back(i);

  std::vector<double> scores(candidates.size(), 0.0);
  if (cfg.backend == Backend::LocalLinear) {
    const Standardized s = standardize_xy(x, y, cfg.grid_size);
    for (int f = 0; f < folds; ++f) {
      Bins bins(s.grid.count);
      for (std::size_t i = 0; i < n; ++i)
        if (fold[i] != f) add_to_bins(bins, s.grid, s.u[i], s.yc[i]);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const NodeLines lines = smooth_nodes(bins, s.grid, candidates[c] / s.sx);
        double err = 0.0;
        for (std::size_t i : held[static_cast<std::size_t>(f)]) {
          const double r =
              s.yc[i] - eval_nodes(lines.level, lines.slope, s.grid.first, s.grid.step, s.u[i]);
          err += r * r;
        }
        scores[c] += err;
      }
    }
  } else {
    const auto order = sorted_order(x);
    std::vector<std::size_t> train;
    train.reserve(n);
    for (int f = 0; f < folds; ++f) {
      train.clear();
      for (std::size_t idx : order)
        if (fold[idx] != f) train.push_back(idx);
      const Knots k = make_knots(x, y, train);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        double err = 0.0;
        if (k.t.size() < 2) {
          double m = 0.0;
          for (std::size_t idx : train) m += y[idx];
          m /= static_cast<double>(train.size());
          for (std::size_t i : held[static_cast<std::size_t>(f)]) err += (y[i] - m) * (y[i] - m);
        } else {
          const auto sp = fit_spline(k, candidates[c]);
          for (std::size_t i : held[static_cast<std::size_t>(f)]) {
            const double r = y[i] - eval_spline(sp, x[i]);
            err += r * r;
          }
        }
        scores[c] += err;
      }
    }
  }
  return scores;
}

double select_tuning(std::span<const double> x, std::span<const double> y,
                     const SmootherConfig& cfg, std::span<const double> candidates) {
  if (candidates.empty()) throw ConfigError("smoother: empty tuning grid");
  if (candidates.size() == 1) return candidates.front();
  const auto scores = cv_scores(x, y, cfg, candidates);
  // Candidates are ordered from least to most smoothing; `<=` lets ties move
  // toward the smoother end.
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] <= scores[best]) best = c;
  return candidates[best];
}

double select_tuning(std::span<const double> x, std::span<const double> y,
                     const SmootherConfig& cfg) {
  validate(x, y);
  const auto grid = tuning_grid(x, cfg.backend);
  return select_tuning(x, y, cfg, grid);
}

RegressionFit fit(std::span<const double> x, std::span<const double> y,
                  const SmootherConfig& cfg) {
  validate(x, y);
  double tuning = 0.0;
  if (cfg.tuning) {
    tuning = *cfg.tuning;
    if (!(tuning > 0.0) || !std::isfinite(tuning))
      throw ConfigError("smoother: explicit bandwidth/penalty must be positive");
  } else {
    tuning = select_tuning(x, y, cfg);
  }

  if (cfg.backend == Backend::LocalLinear) {
    if (cfg.grid_size < 2) throw ConfigError("smoother: grid_size must be at least 2");
    const Standardized s = standardize_xy(x, y, cfg.grid_size);
    Bins bins(s.grid.count);
    for (std::size_t i = 0; i < x.size(); ++i) add_to_bins(bins, s.grid, s.u[i], s.yc[i]);
    NodeLines lines = smooth_nodes(bins, s.grid, tuning / s.sx);
    RegressionFit::LocalLinear m;
    m.first_node = s.mx + s.sx * s.grid.first;
    m.step = s.sx * s.grid.step;
    m.level.resize(s.grid.count);
    m.slope.resize(s.grid.count);
    for (std::size_t g = 0; g < s.grid.count; ++g) {
      m.level[g] = lines.level[g] + s.my;
      m.slope[g] = lines.slope[g] / s.sx;
    }
    return RegressionFit(std::move(m), Backend::LocalLinear, tuning, x.size());
  }

  const auto order = sorted_order(x);
  return RegressionFit(fit_spline(make_knots(x, y, order), tuning), tuning, x.size());
}

}  // namespace cat::smoother
