#include "cat/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cat/error.hpp"
#include "cat/rng.hpp"

namespace cat::simulate {

std::string to_string(TreeType t) { return t == TreeType::Type1 ? "type1" : "type2"; }

TreeType tree_type_from_string(const std::string& s) {
  if (s == "type1" || s == "1") return TreeType::Type1;
  if (s == "type2" || s == "2") return TreeType::Type2;
  throw ConfigError("unknown tree type '" + s + "'");
}

DirectedTree gen_tree_type1(std::size_t p, double edge_prob, std::uint64_t seed) {
  if (p < 2) throw ConfigError("tree generation needs p >= 2");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw ConfigError("edge probability outside [0, 1]");
  Rng rng(child_seed(seed, {0x7e1}));
  std::bernoulli_distribution coin(edge_prob);
  std::vector<std::optional<std::size_t>> parent(p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = j + 1; i < p; ++i) {
      if (parent[i]) continue;
      if (i == j + 1 || coin(rng)) parent[i] = j;
    }
  return DirectedTree::from_parents(std::move(parent));
}

DirectedTree gen_tree_type2(std::size_t p, std::uint64_t seed) {
  if (p < 2) throw ConfigError("tree generation needs p >= 2");
  Rng rng(child_seed(seed, {0x7e2}));
  std::vector<std::optional<std::size_t>> parent(p);
  for (std::size_t i = 1; i < p; ++i)
    parent[i] = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
  return DirectedTree::from_parents(std::move(parent));
}

DirectedTree gen_tree(TreeType type, std::size_t p, std::uint64_t seed) {
  return type == TreeType::Type1 ? gen_tree_type1(p, 0.1, seed) : gen_tree_type2(p, seed);
}

std::size_t leaf_count(const DirectedTree& t) {
  std::vector<char> has_child(t.p(), 0);
  for (const auto& e : t.edges()) has_child[e.from] = 1;
  std::size_t leaves = 0;
  for (char c : has_child) leaves += c == 0;
  return leaves;
}

CausalFunction CausalFunction::fourier(std::uint64_t seed, std::size_t features) {
  if (features == 0) throw ConfigError("at least one Fourier feature is required");
  Rng rng(child_seed(seed, {0xf0}));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CausalFunction f;
  f.omega_.resize(features);
  f.phase_.resize(features);
  f.amp_.resize(features);
  for (std::size_t m = 0; m < features; ++m) {
    f.omega_[m] = normal(rng);
    f.phase_[m] = phase(rng);
    f.amp_[m] = normal(rng);
  }
  f.scale_ = std::sqrt(2.0 / static_cast<double>(features));
  return f;
}

CausalFunction CausalFunction::polynomial(double cubic, double linear) {
  CausalFunction f;
  f.cubic_ = cubic;
  f.linear_ = linear;
  return f;
}

double CausalFunction::operator()(double x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < omega_.size(); ++m) s += amp_[m] * std::cos(omega_[m] * x + phase_[m]);
  return cubic_ * x * x * x + linear_ * x + scale_ * s;
}

bool nowhere_constant(const CausalFunction& f, double lo, double hi, std::size_t points,
                      std::size_t run) {
  double prev = f(lo);
  std::size_t same = 1;
  for (std::size_t k = 1; k < points; ++k) {
    const double v = f(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
    same = v == prev ? same + 1 : 1;
    if (same >= run) return false;
    prev = v;
  }
  return true;
}

std::vector<double> sample_noise(double alpha, double sigma, std::size_t n, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ConfigError("noise shape alpha must be positive");
  if (!(sigma > 0.0)) throw ConfigError("noise scale sigma must be positive");
  Rng rng(child_seed(seed, {0x9015e}));
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> out(n);
  for (double& v : out) {
    const double z = normal(rng);
    v = alpha == 1.0 ? z : std::copysign(std::pow(std::abs(z), alpha), z);
  }
  return out;
}

bool Graph::has_edge(std::size_t from, std::size_t to) const {
  for (std::size_t j : parents[to])
    if (j == from) return true;
  return false;
}

Graph Graph::from_tree(const DirectedTree& t) {
  Graph g;
  g.parents.resize(t.p());
  for (const auto& e : t.edges()) g.parents[e.to].push_back(e.from);
  return g;
}

std::vector<char> Graph::ancestors() const {
  const std::size_t n = p();
  std::vector<char> anc(n * n, 0);
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<std::size_t> stack(parents[b].begin(), parents[b].end());
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      if (anc[a * n + b]) continue;
      anc[a * n + b] = 1;
      stack.insert(stack.end(), parents[a].begin(), parents[a].end());
    }
  }
  return anc;
}

Graph ScmSpec::graph() const {
  Graph g;
  g.parents.resize(p());
  for (std::size_t i = 0; i < p(); ++i)
    for (const auto& t : parents[i]) g.parents[i].push_back(t.node);
  return g;
}

std::optional<DirectedTree> ScmSpec::tree() const {
  std::vector<std::optional<std::size_t>> par(p());
  for (std::size_t i = 0; i < p(); ++i) {
    if (parents[i].size() > 1) return std::nullopt;
    if (!parents[i].empty()) par[i] = parents[i].front().node;
  }
  try {
    return DirectedTree::from_parents(std::move(par));
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

namespace {

std::vector<std::size_t> topological_order(const Graph& g) {
  const std::size_t p = g.p();
  std::vector<std::size_t> missing(p), order;
  std::vector<std::vector<std::size_t>> children(p);
  for (std::size_t i = 0; i < p; ++i) {
    missing[i] = g.parents[i].size();
    for (std::size_t j : g.parents[i]) children[j].push_back(i);
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = p; i-- > 0;)
    if (missing[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (std::size_t c : children[v])
      if (--missing[c] == 0) ready.push_back(c);
  }
  if (order.size() != p) throw ConfigError("causal graph contains a directed cycle");
  return order;
}

}  // namespace

ScmSpec random_scm(const Graph& g, const ScmOptions& opt, std::uint64_t seed) {
  const std::size_t p = g.p();
  ScmSpec s;
  s.names = data::default_names(p);
  s.parents.resize(p);
  s.noise.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    Rng rng(child_seed(seed, {0x5c, i}));
    const bool root = g.parents[i].empty();
    const double lo = root ? opt.root_sigma_lo : opt.sigma_lo;
    const double hi = root ? opt.root_sigma_hi : opt.sigma_hi;
    s.noise[i] = {opt.alpha, std::uniform_real_distribution<double>(lo, hi)(rng)};
    for (std::size_t j : g.parents[i])
      s.parents[i].push_back({j, CausalFunction::fourier(child_seed(seed, {0xf5, j, i}))});
  }
  topological_order(g);
  return s;
}

ScmSpec random_scm(const DirectedTree& t, const ScmOptions& opt, std::uint64_t seed) {
  return random_scm(Graph::from_tree(t), opt, seed);
}

ScmSpec chain3() {
  ScmSpec s;
  s.names = {"X", "Y", "Z"};
  s.parents = {{}, {{0, CausalFunction::polynomial(1.0 / 50.625, 0.0)}},
               {{1, CausalFunction::polynomial(0.0, 1.0)}}};
  s.noise = {{1.0, std::sqrt(1.5)}, {1.0, std::sqrt(0.5)}, {1.0, std::sqrt(0.5)}};
  return s;
}

ScmSpec bivariate(double lambda, double alpha) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  ScmSpec s;
  s.names = {"X", "Y"};
  s.parents = {{}, {{0, CausalFunction::polynomial(1.0 - lambda, lambda)}}};
  s.noise = {{alpha, 1.0}, {1.0, 1.0}};
  return s;
}

ScmSpec experimental_dag(std::size_t p, double extra_prob, const ScmOptions& opt,
                         std::uint64_t seed) {
  Graph g = Graph::from_tree(gen_tree_type1(p, 0.1, child_seed(seed, {0xda1})));
  Rng rng(child_seed(seed, {0xda2}));
  std::bernoulli_distribution coin(extra_prob);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = j + 1; i < p; ++i)
      if (!g.has_edge(j, i) && coin(rng)) g.parents[i].push_back(j);
  return random_scm(g, opt, child_seed(seed, {0xda3}));
}

data::Dataset sample_scm(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::size_t p = spec.p();
  if (spec.parents.size() != p || spec.noise.size() != p) throw ConfigError("malformed SCM");
  std::vector<std::vector<double>> cols(p);
  for (std::size_t i : topological_order(spec.graph())) {
    cols[i] = sample_noise(spec.noise[i].alpha, spec.noise[i].sigma, n, child_seed(seed, {i}));
    for (const auto& term : spec.parents[i]) {
      const auto& x = cols[term.node];
      for (std::size_t k = 0; k < n; ++k) cols[i][k] += term.f(x[k]);
    }
  }
  return data::Dataset(spec.names, std::move(cols));
}

std::size_t shd(const Graph& a, const Graph& b) {
  if (a.p() != b.p()) throw ConfigError("graphs have different node counts");
  std::size_t d = 0;
  for (std::size_t u = 0; u < a.p(); ++u)
    for (std::size_t v = u + 1; v < a.p(); ++v) {
      const bool same = a.has_edge(u, v) == b.has_edge(u, v) && a.has_edge(v, u) == b.has_edge(v, u);
      d += !same;
    }
  return d;
}

std::size_t shd(const DirectedTree& a, const DirectedTree& b) {
  return shd(Graph::from_tree(a), Graph::from_tree(b));
}

AncestorMetrics ancestor_metrics(const Graph& truth, const Graph& estimate) {
  if (truth.p() != estimate.p()) throw ConfigError("graphs have different node counts");
  const auto t = truth.ancestors();
  const auto e = estimate.ancestors();
  std::size_t both = 0, predicted = 0, actual = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    both += t[k] && e[k];
    predicted += e[k] != 0;
    actual += t[k] != 0;
  }
  AncestorMetrics m;
  if (predicted) m.tpr = static_cast<double>(both) / static_cast<double>(predicted);
  if (actual) m.recall = static_cast<double>(both) / static_cast<double>(actual);
  return m;
}

}  // namespace cat::simulate
