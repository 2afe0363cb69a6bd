#include "cat/weights.hpp"

#include <cmath>
#include <limits>

#include "cat/error.hpp"
#include "cat/parallel.hpp"
#include "cat/rng.hpp"

namespace cat::weights {

std::string to_string(ScoreKind k) { return k == ScoreKind::Gaussian ? "gaussian" : "entropy"; }

ScoreKind score_from_string(const std::string& s) {
  if (s == "gaussian" || s == "G") return ScoreKind::Gaussian;
  if (s == "entropy" || s == "E") return ScoreKind::Entropy;
  throw ConfigError("unknown score kind '" + s + "'");
}

std::size_t pair_index(std::size_t from, std::size_t to, std::size_t p) {
  return to * (p - 1) + (from < to ? from : from - 1);
}

WeightMatrix::WeightMatrix(std::vector<std::string> names, ScoreKind kind, Matrix values)
    : names_(std::move(names)), kind_(kind), values_(std::move(values)) {
  const std::size_t p = names_.size();
  if (values_.rows() != p || values_.cols() != p)
    throw ConfigError("weight matrix shape does not match node count");
  for (std::size_t i = 0; i < p; ++i) {
    values_(i, i) = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < p; ++j)
      if (i != j && !std::isfinite(values_(i, j)))
        throw DegenerateError("weight " + names_[i] + "->" + names_[j] + " is not finite");
  }
}

std::span<const double> WeightMatrix::residuals(std::size_t from, std::size_t to) const {
  if (residuals_.empty()) throw ConfigError("weight matrix carries no residuals");
  return residuals_[pair_index(from, to, p())];
}

void WeightMatrix::set_residuals(std::vector<std::vector<double>> by_pair_index) {
  if (by_pair_index.size() != p() * (p() - 1))
    throw ConfigError("residual cache must hold p(p-1) vectors");
  for (const auto& r : by_pair_index)
    if (r.size() != by_pair_index.front().size())
      throw ConfigError("residual vectors differ in length");
  residuals_ = std::move(by_pair_index);
}

WeightMatrix WeightMatrix::permuted(std::span<const std::size_t> perm) const {
  const std::size_t p = this->p();
  std::vector<std::string> names(p);
  Matrix v(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    names[a] = names_[perm[a]];
    for (std::size_t b = 0; b < p; ++b)
      if (a != b) v(a, b) = values_(perm[a], perm[b]);
  }
  WeightMatrix out(std::move(names), kind_, std::move(v));
  if (has_residuals()) {
    std::vector<std::vector<double>> res(p * (p - 1));
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b)
        if (a != b) res[pair_index(a, b, p)] = residuals_[pair_index(perm[a], perm[b], p)];
    out.set_residuals(std::move(res));
  }
  return out;
}

double gaussian_weight(std::span<const double> residuals, std::span<const double> marginal) {
  const double vr = data::variance(residuals);
  const double vm = data::variance(marginal);
  if (!(vr > 0.0)) throw DegenerateError("residual variance is zero");
  if (!(vm > 0.0)) throw DegenerateError("marginal variance is zero");
  return 0.5 * std::log(vr / vm);
}

double gaussian_weight_split(std::span<const double> residuals, std::span<const double> marginal) {
  double ms = 0.0;
  for (double r : residuals) ms += r * r;
  ms /= static_cast<double>(residuals.size());
  const double vm = data::variance(marginal);
  if (!(ms > 0.0)) throw DegenerateError("residual mean square is zero");
  if (!(vm > 0.0)) throw DegenerateError("marginal variance is zero");
  return 0.5 * std::log(ms / vm);
}

double entropy_weight(std::span<const double> residuals, std::span<const double> marginal,
                      const entropy::EntropyConfig& cfg) {
  return entropy::entropy_knn(residuals, cfg) - entropy::entropy_knn(marginal, cfg);
}

namespace {

// FNV-1a; pair seeds follow column names so relabelling permutes weights.
std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

WeightMatrix compute(const data::Dataset& train, const data::Dataset& eval, bool split,
                     const WeightOptions& opt) {
  const std::size_t p = train.p();
  if (eval.p() != p || eval.names() != train.names())
    throw DataError("training and evaluation samples have different columns");
  for (std::size_t i = 0; i < p; ++i) {
    if (data::column_variance(eval, i).degenerate)
      throw DegenerateError("column '" + eval.names()[i] + "' is constant");
  }

  std::vector<double> marginal_entropy(p, 0.0);
  if (opt.kind == ScoreKind::Entropy) {
    parallel_for(p, opt.threads, [&](std::size_t i) {
      marginal_entropy[i] = entropy::entropy_knn(eval.column(i), opt.entropy);
    });
  }

  const std::size_t pairs = p * (p - 1);
  std::vector<double> w(pairs);
  std::vector<std::vector<double>> residuals(pairs);
  parallel_for(pairs, opt.threads, [&](std::size_t idx) {
    const std::size_t to = idx / (p - 1);
    std::size_t from = idx % (p - 1);
    if (from >= to) ++from;
    const std::string label = train.names()[from] + "->" + train.names()[to];
    try {
      smoother::SmootherConfig cfg = opt.smoother;
      cfg.seed = child_seed(opt.smoother.seed,
                            {name_hash(train.names()[from]), name_hash(train.names()[to])});
      const auto fit = smoother::fit(train.column(from), train.column(to), cfg);
      auto xj = eval.column(from);
      auto xi = eval.column(to);
      std::vector<double> r(eval.n());
      for (std::size_t k = 0; k < eval.n(); ++k) r[k] = xi[k] - fit.predict(xj[k]);
      if (opt.kind == ScoreKind::Gaussian) {
        w[idx] = split ? gaussian_weight_split(r, xi) : gaussian_weight(r, xi);
      } else {
        w[idx] = entropy::entropy_knn(r, opt.entropy) - marginal_entropy[to];
      }
      if (!std::isfinite(w[idx])) throw DegenerateError("non-finite weight");
      residuals[idx] = std::move(r);
    } catch (const DegenerateError& e) {
      throw DegenerateError("edge " + label + ": " + e.what());
    }
  });

  Matrix values(p, p);
  for (std::size_t idx = 0; idx < pairs; ++idx) {
    const std::size_t to = idx / (p - 1);
    std::size_t from = idx % (p - 1);
    if (from >= to) ++from;
    values(from, to) = w[idx];
  }
  WeightMatrix out(train.names(), opt.kind, std::move(values));
  if (opt.keep_residuals) out.set_residuals(std::move(residuals));
  return out;
}

}  // namespace

WeightMatrix weight_matrix(const data::Dataset& d, const WeightOptions& opt) {
  return compute(d, d, false, opt);
}

WeightMatrix weight_matrix(const data::SplitDataset& d, const WeightOptions& opt) {
  return compute(d.auxiliary, d.main, true, opt);
}

}  // namespace cat::weights
