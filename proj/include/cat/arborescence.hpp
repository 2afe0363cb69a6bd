#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include "cat/matrix.hpp"

namespace cat::arborescence {

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Spanning directed tree over p labelled nodes: one root, every other node
/// has exactly one parent, no directed cycles.
class DirectedTree {
 public:
  /// Validates the parent array; throws ConfigError if it is not a tree.
  static DirectedTree from_parents(std::vector<std::optional<std::size_t>> parents);
  static DirectedTree from_edges(std::size_t p, const std::vector<Edge>& edges);

  std::size_t p() const { return parent_.size(); }
  std::size_t root() const { return root_; }
  std::optional<std::size_t> parent(std::size_t i) const { return parent_[i]; }
  const std::vector<std::optional<std::size_t>>& parents() const { return parent_; }
  /// p-1 edges ordered by head.
  std::vector<Edge> edges() const;
  bool has_edge(std::size_t from, std::size_t to) const {
    return parent_[to] && *parent_[to] == from;
  }

  friend bool operator==(const DirectedTree&, const DirectedTree&) = default;

 private:
  std::vector<std::optional<std::size_t>> parent_;
  std::size_t root_ = 0;
};

/// Required edges, forbidden edges and an optional forced root.
struct EdgeConstraintSet {
  std::vector<Edge> required;
  std::vector<Edge> forbidden;
  std::optional<std::size_t> root;

  bool empty() const { return required.empty() && forbidden.empty() && !root; }
};

struct TreeSolution {
  DirectedTree tree;
  double total = 0.0;
};

/// Sum of w(parent(i), i) over non-root nodes, accumulated in node order.
double tree_score(const Matrix& w, const DirectedTree& t);

bool satisfies(const DirectedTree& t, const EdgeConstraintSet& c);

/// Minimum-weight spanning arborescence of the complete directed graph with
/// weights w (row = tail, column = head), restricted to trees satisfying c.
/// Constraints act on the edge pool: a required edge removes every competing
/// edge into its head, a forbidden edge is removed, a forced root loses all
/// its in-edges. Ties resolve toward the smallest tail index per head.
/// Throws InfeasibleError when no tree satisfies c.
TreeSolution min_arborescence(const Matrix& w, const EdgeConstraintSet& c = {});

/// Exhaustive search over all parent arrays (p <= 7). Ties resolve to the
/// lexicographically least parent array, with "no parent" ordered first.
TreeSolution brute_force_arborescence(const Matrix& w, const EdgeConstraintSet& c = {});

/// Every tree satisfying c (p <= 7), in lexicographic parent-array order.
std::vector<TreeSolution> enumerate_trees(const Matrix& w, const EdgeConstraintSet& c = {});

/// Re-solves once per edge of the optimum with that edge forbidden. Sorted
/// by total; the first entry is a second-best tree.
std::vector<TreeSolution> second_best_trees(const Matrix& w);

}  // namespace cat::arborescence
