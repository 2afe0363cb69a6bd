#include "cat/arborescence.hpp"

#include <algorithm>
#include <string>

#include "cat/error.hpp"

namespace cat::arborescence {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr std::size_t kMaxBruteForce = 7;

// Cost with a lexicographic first component counting edges out of the
// virtual root, so any tree using one such edge beats any tree using two.
struct Cost {
  long roots = 0;
  double w = 0.0;
};

bool operator<(const Cost& a, const Cost& b) {
  return a.roots < b.roots || (a.roots == b.roots && a.w < b.w);
}
Cost operator-(const Cost& a, const Cost& b) { return {a.roots - b.roots, a.w - b.w}; }

struct Graph {
  std::size_t n = 0;
  std::vector<Cost> cost;     // n*n, row = tail
  std::vector<char> present;  // n*n
  Cost& at(std::size_t u, std::size_t v) { return cost[u * n + v]; }
  const Cost& at(std::size_t u, std::size_t v) const { return cost[u * n + v]; }
  bool has(std::size_t u, std::size_t v) const { return present[u * n + v] != 0; }
};

// Chu-Liu-Edmonds, contracting one cycle per level. Returns the parent of
// every node (kNone for root).
std::vector<std::size_t> solve(const Graph& g, std::size_t root) {
  const std::size_t n = g.n;
  std::vector<std::size_t> in(n, kNone);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == root) continue;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v || !g.has(u, v)) continue;
      if (in[v] == kNone || g.at(u, v) < g.at(in[v], v)) in[v] = u;
    }
    if (in[v] == kNone) throw InfeasibleError("some node cannot be reached from any admissible root");
  }

  // Find one cycle of the in-edge function.
  std::vector<std::size_t> mark(n, kNone);
  std::vector<char> on_cycle(n, 0);
  bool found = false;
  for (std::size_t s = 0; s < n && !found; ++s) {
    std::size_t v = s;
    while (v != root && mark[v] == kNone) {
      mark[v] = s;
      v = in[v];
    }
    if (v != root && mark[v] == s) {
      found = true;
      std::size_t u = v;
      do {
        on_cycle[u] = 1;
        u = in[u];
      } while (u != v);
    }
  }
  if (!found) return in;

  // Contract the cycle into a single node c.
  std::vector<std::size_t> map(n);
  std::size_t next = 0;
  std::size_t c = kNone;
  for (std::size_t v = 0; v < n; ++v) {
    if (on_cycle[v]) {
      if (c == kNone) c = next++;
      map[v] = c;
    } else {
      map[v] = next++;
    }
  }
  Graph h;
  h.n = next;
  h.cost.assign(next * next, Cost{});
  h.present.assign(next * next, 0);
  std::vector<std::pair<std::size_t, std::size_t>> origin(next * next, {kNone, kNone});
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v || !g.has(u, v)) continue;
      const std::size_t a = map[u], b = map[v];
      if (a == b) continue;
      const Cost cc = on_cycle[v] ? g.at(u, v) - g.at(in[v], v) : g.at(u, v);
      const std::size_t k = a * next + b;
      if (!h.present[k] || cc < h.cost[k]) {
        h.present[k] = 1;
        h.cost[k] = cc;
        origin[k] = {u, v};
      }
    }
  }
  const auto sub = solve(h, map[root]);

  std::vector<std::size_t> parent(n, kNone);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == root) continue;
    if (on_cycle[v]) {
      parent[v] = in[v];
    } else {
      parent[v] = origin[sub[map[v]] * next + map[v]].first;
    }
  }
  const auto entry = origin[sub[c] * next + c];
  parent[entry.second] = entry.first;
  return parent;
}

std::string node(std::size_t i) { return "node " + std::to_string(i); }

// Edge pool after constraint surgery, with feasibility diagnostics that
// name the offending nodes. Returns the allowed-edge mask (row = tail).
std::vector<char> edge_pool(std::size_t p, const EdgeConstraintSet& c) {
  for (const auto& e : c.required)
    if (e.from >= p || e.to >= p || e.from == e.to)
      throw ConfigError("required edge has invalid endpoints");
  for (const auto& e : c.forbidden)
    if (e.from >= p || e.to >= p || e.from == e.to)
      throw ConfigError("forbidden edge has invalid endpoints");
  if (c.root && *c.root >= p) throw ConfigError("root index out of range");

  std::vector<std::size_t> req_parent(p, kNone);
  for (const auto& e : c.required) {
    if (req_parent[e.to] != kNone && req_parent[e.to] != e.from)
      throw InfeasibleError(node(e.to) + " has two required parents");
    req_parent[e.to] = e.from;
    if (c.root && e.to == *c.root)
      throw InfeasibleError("required edge enters the forced root " + node(e.to));
    if (std::find(c.forbidden.begin(), c.forbidden.end(), e) != c.forbidden.end())
      throw InfeasibleError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                            " is both required and forbidden");
  }
  for (std::size_t s = 0; s < p; ++s) {
    std::size_t v = s;
    for (std::size_t step = 0; step <= p && v != kNone; ++step) v = req_parent[v];
    if (v != kNone) throw InfeasibleError("required edges form a cycle through " + node(s));
  }

  std::vector<char> allowed(p * p, 0);
  for (std::size_t u = 0; u < p; ++u)
    for (std::size_t v = 0; v < p; ++v) allowed[u * p + v] = u != v;
  for (std::size_t v = 0; v < p; ++v)
    if (req_parent[v] != kNone)
      for (std::size_t u = 0; u < p; ++u) allowed[u * p + v] = u == req_parent[v];
  for (const auto& e : c.forbidden) allowed[e.from * p + e.to] = 0;
  if (c.root)
    for (std::size_t u = 0; u < p; ++u) allowed[u * p + *c.root] = 0;
  return allowed;
}

void check_weights(const Matrix& w) {
  if (w.rows() != w.cols()) throw ConfigError("weight matrix must be square");
  if (w.rows() < 2) throw ConfigError("at least two nodes are required");
}

// Visits every valid parent array in lexicographic order (kNone first).
template <class Fn>
void for_each_tree(std::size_t p, const EdgeConstraintSet& c, Fn&& fn) {
  if (p > kMaxBruteForce)
    throw ConfigError("exhaustive search supports at most " + std::to_string(kMaxBruteForce) +
                      " nodes");
  // digit d in [0, p]: 0 means no parent, d means parent d-1
  std::vector<std::size_t> digit(p, 0);
  std::vector<std::optional<std::size_t>> parents(p);
  for (;;) {
    bool ok = true;
    std::size_t roots = 0;
    for (std::size_t i = 0; i < p && ok; ++i) {
      if (digit[i] == 0) {
        ++roots;
        parents[i].reset();
      } else {
        ok = digit[i] - 1 != i;
        parents[i] = digit[i] - 1;
      }
    }
    if (ok && roots == 1) {
      for (std::size_t s = 0; s < p && ok; ++s) {
        std::optional<std::size_t> v = s;
        for (std::size_t step = 0; step <= p && v; ++step) v = parents[*v];
        ok = !v;
      }
      if (ok) {
        auto t = DirectedTree::from_parents(parents);
        if (satisfies(t, c)) fn(std::move(t));
      }
    }
    std::size_t pos = p;
    while (pos > 0) {
      --pos;
      if (++digit[pos] <= p) break;
      digit[pos] = 0;
      if (pos == 0) return;
    }
  }
}

}  // namespace

DirectedTree DirectedTree::from_parents(std::vector<std::optional<std::size_t>> parents) {
  const std::size_t p = parents.size();
  if (p < 1) throw ConfigError("tree must have at least one node");
  std::size_t roots = 0, root = 0;
  for (std::size_t i = 0; i < p; ++i) {
    if (!parents[i]) {
      ++roots;
      root = i;
    } else if (*parents[i] >= p || *parents[i] == i) {
      throw ConfigError("invalid parent for " + node(i));
    }
  }
  if (roots != 1) throw ConfigError("tree must have exactly one root");
  for (std::size_t s = 0; s < p; ++s) {
    std::optional<std::size_t> v = s;
    for (std::size_t step = 0; step <= p && v; ++step) v = parents[*v];
    if (v) throw ConfigError("parent array contains a directed cycle");
  }
  DirectedTree t;
  t.parent_ = std::move(parents);
  t.root_ = root;
  return t;
}

DirectedTree DirectedTree::from_edges(std::size_t p, const std::vector<Edge>& edges) {
  std::vector<std::optional<std::size_t>> parents(p);
  for (const auto& e : edges) {
    if (e.from >= p || e.to >= p) throw ConfigError("edge endpoint out of range");
    if (parents[e.to]) throw ConfigError(node(e.to) + " has two parents");
    parents[e.to] = e.from;
  }
  return from_parents(std::move(parents));
}

std::vector<Edge> DirectedTree::edges() const {
  std::vector<Edge> out;
  out.reserve(p());
  for (std::size_t i = 0; i < p(); ++i)
    if (parent_[i]) out.push_back({*parent_[i], i});
  return out;
}

double tree_score(const Matrix& w, const DirectedTree& t) {
  double total = 0.0;
  for (std::size_t i = 0; i < t.p(); ++i)
    if (auto j = t.parent(i)) total += w(*j, i);
  return total;
}

bool satisfies(const DirectedTree& t, const EdgeConstraintSet& c) {
  for (const auto& e : c.required)
    if (e.to >= t.p() || !t.has_edge(e.from, e.to)) return false;
  for (const auto& e : c.forbidden)
    if (e.to < t.p() && t.has_edge(e.from, e.to)) return false;
  return !c.root || t.root() == *c.root;
}

TreeSolution min_arborescence(const Matrix& w, const EdgeConstraintSet& c) {
  check_weights(w);
  const std::size_t p = w.rows();
  const auto allowed = edge_pool(p, c);

  std::optional<std::size_t> root = c.root;
  std::vector<std::size_t> starved;
  for (std::size_t v = 0; v < p; ++v) {
    bool any = false;
    for (std::size_t u = 0; u < p && !any; ++u) any = allowed[u * p + v] != 0;
    if (!any && (!root || v != *root)) starved.push_back(v);
  }
  if (root && !starved.empty())
    throw InfeasibleError(node(starved.front()) + " has no admissible parent");
  if (starved.size() > 1)
    throw InfeasibleError(node(starved[0]) + " and " + node(starved[1]) +
                          " both have no admissible parent");
  if (starved.size() == 1) root = starved.front();

  std::vector<std::size_t> parent;
  if (root) {
    Graph g;
    g.n = p;
    g.cost.resize(p * p);
    g.present.assign(allowed.begin(), allowed.end());
    for (std::size_t u = 0; u < p; ++u)
      for (std::size_t v = 0; v < p; ++v)
        if (u != v) g.at(u, v) = {0, w(u, v)};
    parent = solve(g, *root);
  } else {
    const std::size_t n = p + 1;  // node p is the virtual root
    Graph g;
    g.n = n;
    g.cost.assign(n * n, Cost{});
    g.present.assign(n * n, 0);
    for (std::size_t u = 0; u < p; ++u)
      for (std::size_t v = 0; v < p; ++v)
        if (allowed[u * p + v]) {
          g.at(u, v) = {0, w(u, v)};
          g.present[u * n + v] = 1;
        }
    // a node with a required parent may not become the root
    std::vector<char> can_root(p, 1);
    for (const auto& e : c.required) can_root[e.to] = 0;
    for (std::size_t v = 0; v < p; ++v) {
      g.at(p, v) = {1, 0.0};
      g.present[p * n + v] = can_root[v];
    }
    parent = solve(g, p);
    parent.pop_back();
    std::size_t roots = 0;
    for (auto& q : parent)
      if (q == p) {
        q = kNone;
        ++roots;
      }
    if (roots != 1) throw InfeasibleError("constraints admit no spanning tree with a single root");
  }

  std::vector<std::optional<std::size_t>> parents(p);
  for (std::size_t i = 0; i < p; ++i)
    if (parent[i] != kNone) parents[i] = parent[i];
  auto tree = DirectedTree::from_parents(std::move(parents));
  const double total = tree_score(w, tree);
  return {std::move(tree), total};
}

TreeSolution brute_force_arborescence(const Matrix& w, const EdgeConstraintSet& c) {
  check_weights(w);
  std::optional<TreeSolution> best;
  for_each_tree(w.rows(), c, [&](DirectedTree t) {
    const double s = tree_score(w, t);
    if (!best || s < best->total) best = TreeSolution{std::move(t), s};
  });
  if (!best) throw InfeasibleError("no tree satisfies the constraints");
  return std::move(*best);
}

std::vector<TreeSolution> enumerate_trees(const Matrix& w, const EdgeConstraintSet& c) {
  check_weights(w);
  std::vector<TreeSolution> out;
  for_each_tree(w.rows(), c, [&](DirectedTree t) {
    const double s = tree_score(w, t);
    out.push_back({std::move(t), s});
  });
  return out;
}

std::vector<TreeSolution> second_best_trees(const Matrix& w) {
  const auto best = min_arborescence(w);
  std::vector<TreeSolution> out;
  for (const auto& e : best.tree.edges()) {
    EdgeConstraintSet c;
    c.forbidden.push_back(e);
    out.push_back(min_arborescence(w, c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TreeSolution& a, const TreeSolution& b) { return a.total < b.total; });
  return out;
}

}  // namespace cat::arborescence
