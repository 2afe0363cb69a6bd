#include "cat/benchmark.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "cat/arborescence.hpp"
#include "cat/error.hpp"
#include "cat/parallel.hpp"
#include "cat/rng.hpp"

namespace cat::benchmark {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Result run_benchmark(const Grid& grid, std::uint64_t seed, unsigned threads) {
  if (grid.p.empty() || grid.n.empty() || grid.tree_types.empty() || grid.alpha.empty() ||
      grid.scores.empty() || grid.reps == 0)
    throw ConfigError("benchmark grid is empty");

  Result out;
  for (std::size_t p : grid.p)
    for (auto tt : grid.tree_types)
      for (double a : grid.alpha)
        for (std::size_t n : grid.n)
          for (auto sc : grid.scores) {
            Summary s;
            s.p = p;
            s.n = n;
            s.tree_type = tt;
            s.alpha = a;
            s.score = sc;
            s.reps = grid.reps;
            out.summary.push_back(s);
            for (std::size_t r = 0; r < grid.reps; ++r) {
              Row row;
              row.p = p;
              row.n = n;
              row.tree_type = tt;
              row.alpha = a;
              row.score = sc;
              row.rep = r;
              out.rows.push_back(row);
            }
          }

  parallel_for(out.rows.size(), threads, [&](std::size_t k) {
    Row& row = out.rows[k];
    const std::uint64_t model_seed =
        child_seed(seed, {row.p, static_cast<std::uint64_t>(row.tree_type),
                          std::bit_cast<std::uint64_t>(row.alpha), row.rep});
    try {
      const auto truth = simulate::gen_tree(row.tree_type, row.p, child_seed(model_seed, {1}));
      simulate::ScmOptions opt;
      opt.alpha = row.alpha;
      const auto scm = simulate::random_scm(truth, opt, child_seed(model_seed, {2}));
      const auto d = simulate::sample_scm(scm, row.n, child_seed(model_seed, {3}));
      weights::WeightOptions wo;
      wo.kind = row.score;
      wo.smoother = grid.smoother;
      wo.smoother.seed = child_seed(model_seed, {4});
      wo.entropy = grid.entropy;
      wo.keep_residuals = false;
      const auto w = weights::weight_matrix(d, wo);
      const auto est = arborescence::min_arborescence(w.values()).tree;
      row.shd = simulate::shd(truth, est);
      const auto m = simulate::ancestor_metrics(simulate::Graph::from_tree(truth),
                                                simulate::Graph::from_tree(est));
      row.ancestor_tpr = m.tpr;
      row.ancestor_recall = m.recall;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });

  for (std::size_t c = 0; c < out.summary.size(); ++c) {
    Summary& s = out.summary[c];
    std::vector<double> shd, tpr, recall;
    for (std::size_t r = 0; r < grid.reps; ++r) {
      const Row& row = out.rows[c * grid.reps + r];
      if (!row.shd) {
        ++s.failures;
        continue;
      }
      shd.push_back(static_cast<double>(*row.shd));
      if (row.ancestor_tpr) tpr.push_back(*row.ancestor_tpr);
      if (row.ancestor_recall) recall.push_back(*row.ancestor_recall);
    }
    if (!shd.empty()) {
      s.shd_median = quantile(shd, 0.5);
      s.shd_q1 = quantile(shd, 0.25);
      s.shd_q3 = quantile(shd, 0.75);
    }
    if (!tpr.empty()) s.tpr_median = quantile(tpr, 0.5);
    if (!recall.empty()) s.recall_median = quantile(recall, 0.5);
  }
  return out;
}

std::string to_csv(const Result& r) {
  std::ostringstream os;
  os.precision(17);
  os << "p,n,tree_type,alpha,score,rep,shd,ancestor_tpr,ancestor_recall\n";
  for (const auto& row : r.rows) {
    os << row.p << ',' << row.n << ',' << simulate::to_string(row.tree_type) << ',' << row.alpha
       << ',' << weights::to_string(row.score) << ',' << row.rep << ',';
    if (row.shd) os << *row.shd;
    os << ',';
    if (row.ancestor_tpr) os << *row.ancestor_tpr;
    os << ',';
    if (row.ancestor_recall) os << *row.ancestor_recall;
    os << '\n';
  }
  return os.str();
}

}  // namespace cat::benchmark
