#include "cat/inference.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "cat/error.hpp"
#include "cat/parallel.hpp"

namespace cat::inference {

MomentSummaries moment_summaries(std::span<const std::vector<double>> residuals,
                                 const data::Dataset& main) {
  const std::size_t p = main.p();
  const std::size_t n = main.n();
  const std::size_t pairs = p * (p - 1);
  if (residuals.size() != pairs) throw ConfigError("expected p(p-1) residual vectors");
  for (const auto& r : residuals)
    if (r.size() != n) throw ConfigError("residual length differs from the evaluation sample");

  const std::size_t dim = pairs + p;
  std::vector<double> means(p);
  for (std::size_t i = 0; i < p; ++i) means[i] = data::mean(main.column(i));

  // z[k * dim + a]: stacked (M_k, V_k) for row k
  std::vector<double> z(n * dim);
  for (std::size_t a = 0; a < pairs; ++a)
    for (std::size_t k = 0; k < n; ++k) z[k * dim + a] = residuals[a][k] * residuals[a][k];
  for (std::size_t i = 0; i < p; ++i) {
    auto col = main.column(i);
    for (std::size_t k = 0; k < n; ++k) {
      const double c = col[k] - means[i];
      z[k * dim + pairs + i] = c * c;
    }
  }

  std::vector<double> mean(dim, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 0; a < dim; ++a) mean[a] += z[k * dim + a];
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 0; a < dim; ++a) z[k * dim + a] -= mean[a];

  MomentSummaries ms;
  ms.names = main.names();
  ms.n = n;
  ms.mu.assign(mean.begin(), mean.begin() + static_cast<std::ptrdiff_t>(pairs));
  ms.nu.assign(mean.begin() + static_cast<std::ptrdiff_t>(pairs), mean.end());
  ms.sigma = Matrix(dim, dim);
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = &z[k * dim];
    for (std::size_t a = 0; a < dim; ++a) {
      const double za = row[a];
      for (std::size_t b = a; b < dim; ++b) ms.sigma(a, b) += za * row[b];
    }
  }
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a; b < dim; ++b) {
      ms.sigma(a, b) /= static_cast<double>(n);
      ms.sigma(b, a) = ms.sigma(a, b);
    }

  for (std::size_t a = 0; a < pairs; ++a)
    if (!(ms.mu[a] > 0.0)) throw DegenerateError("mean squared residual is zero");
  for (std::size_t i = 0; i < p; ++i)
    if (!(ms.nu[i] > 0.0)) throw DegenerateError("column '" + ms.names[i] + "' is constant");
  return ms;
}

MomentSummaries moment_summaries(const weights::WeightMatrix& w, const data::Dataset& main) {
  if (!w.has_residuals()) throw ConfigError("weight matrix carries no residuals");
  if (w.names() != main.names()) throw ConfigError("weight matrix and data have different nodes");
  const std::size_t p = w.p();
  std::vector<std::vector<double>> res(p * (p - 1));
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      if (i != j) {
        auto r = w.residuals(j, i);
        res[weights::pair_index(j, i, p)].assign(r.begin(), r.end());
      }
  return moment_summaries(res, main);
}

double bonferroni_z(double alpha, std::size_t p) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (p < 2) throw ConfigError("at least two nodes are required");
  const double tail = alpha / (2.0 * static_cast<double>(p * (p - 1)));
  return boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
}

ConfidenceReport confidence_intervals(const MomentSummaries& ms, double alpha) {
  const std::size_t p = ms.p();
  ConfidenceReport cr;
  cr.names = ms.names;
  cr.n = ms.n;
  cr.alpha = alpha;
  cr.z = bonferroni_z(alpha, p);
  cr.estimate = Matrix(p, p, std::nan(""));
  cr.lower = Matrix(p, p, std::nan(""));
  cr.upper = Matrix(p, p, std::nan(""));
  const double scale = cr.z / (2.0 * std::sqrt(static_cast<double>(ms.n)));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (i == j) continue;
      const std::size_t a = weights::pair_index(j, i, p);
      const double mu = ms.mu[a];
      const double nu = ms.nu[i];
      double var = ms.sigma_m(a, a) / (mu * mu) + ms.sigma_v(i, i) / (nu * nu) -
                   2.0 * ms.sigma_mv(a, i) / (mu * nu);
      if (var < 0.0) {
        cr.warnings.push_back("negative variance estimate for " + ms.names[j] + "->" +
                              ms.names[i] + " clamped to 0");
        var = 0.0;
      }
      EdgeInterval e;
      e.from = j;
      e.to = i;
      e.w = 0.5 * std::log(mu / nu);
      e.sigma = std::sqrt(var);
      e.lo = e.w - scale * e.sigma;
      e.hi = e.w + scale * e.sigma;
      cr.estimate(j, i) = e.w;
      cr.lower(j, i) = e.lo;
      cr.upper(j, i) = e.hi;
      cr.edges.push_back(e);
    }
  }
  // edges were produced head-major, matching pair_index order
  return cr;
}

TestReport test_substructure(const ConfidenceReport& cr, const arborescence::EdgeConstraintSet& r) {
  TestReport rep;
  rep.constraints = r;
  rep.alpha = cr.alpha;
  rep.s_upper = arborescence::min_arborescence(cr.upper).total;
  try {
    rep.s_lower = arborescence::min_arborescence(cr.lower, r).total;
    rep.reject = *rep.s_lower > rep.s_upper;
  } catch (const InfeasibleError& e) {
    rep.infeasible = true;
    rep.reject = true;
    rep.reason = e.what();
  }
  return rep;
}

std::vector<TestReport> test_many(const ConfidenceReport& cr,
                                  std::span<const arborescence::EdgeConstraintSet> rs,
                                  unsigned threads) {
  std::vector<TestReport> out(rs.size());
  parallel_for(rs.size(), threads, [&](std::size_t k) { out[k] = test_substructure(cr, rs[k]); });
  return out;
}

ConfidenceReport split_confidence(const data::Dataset& d, double split_fraction,
                                  std::uint64_t seed, weights::WeightOptions opt, double alpha) {
  bonferroni_z(alpha, d.p());
  const auto halves = data::split(d, split_fraction, seed);
  opt.kind = weights::ScoreKind::Gaussian;
  opt.keep_residuals = true;
  const auto w = weights::weight_matrix(halves, opt);
  return confidence_intervals(moment_summaries(w, halves.main), alpha);
}

}  // namespace cat::inference
