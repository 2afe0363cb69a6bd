#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cat/arborescence.hpp"
#include "cat/data.hpp"

namespace cat::simulate {

using arborescence::DirectedTree;

enum class TreeType { Type1, Type2 };

std::string to_string(TreeType t);
TreeType tree_type_from_string(const std::string& s);

/// Scans pairs j < i; node i takes parent j for certain when i = j + 1 and
/// with probability edge_prob otherwise, provided it has no parent yet.
/// Produces long, leaf-rich trees rooted at node 0.
DirectedTree gen_tree_type1(std::size_t p, double edge_prob, std::uint64_t seed);
/// Parent of node i drawn uniformly from 0..i-1.
DirectedTree gen_tree_type2(std::size_t p, std::uint64_t seed);
DirectedTree gen_tree(TreeType type, std::size_t p, std::uint64_t seed);

std::size_t leaf_count(const DirectedTree& t);

/// f(x) = cubic x^3 + linear x + sqrt(2/M) sum_m a_m cos(omega_m x + b_m).
/// The random part approximates a Gaussian-process path with covariance
/// exp(-(x-x')^2 / 2).
class CausalFunction {
 public:
  CausalFunction() = default;
  static CausalFunction fourier(std::uint64_t seed, std::size_t features = 100);
  static CausalFunction polynomial(double cubic, double linear);

  double operator()(double x) const;

 private:
  std::vector<double> omega_, phase_, amp_;
  double scale_ = 0.0;
  double cubic_ = 0.0;
  double linear_ = 0.0;
};

/// True unless f is constant over `run` consecutive points of an evenly
/// spaced grid of `points` values on [lo, hi].
bool nowhere_constant(const CausalFunction& f, double lo = -3.0, double hi = 3.0,
                      std::size_t points = 1000, std::size_t run = 10);

/// sign(Z) |Z|^alpha with Z ~ N(0, sigma^2); alpha = 1 is Gaussian.
std::vector<double> sample_noise(double alpha, double sigma, std::size_t n, std::uint64_t seed);

/// Directed graph as parent lists; trees and DAGs alike.
struct Graph {
  std::vector<std::vector<std::size_t>> parents;

  std::size_t p() const { return parents.size(); }
  bool has_edge(std::size_t from, std::size_t to) const;
  static Graph from_tree(const DirectedTree& t);
  /// anc[a * p + b] != 0 iff a is a proper ancestor of b.
  std::vector<char> ancestors() const;
};

struct NoiseSpec {
  double alpha = 1.0;
  double sigma = 1.0;
};

struct ParentTerm {
  std::size_t node = 0;
  CausalFunction f;
};

/// X_i := sum over parents j of f_ij(X_j) + N_i.
struct ScmSpec {
  std::vector<std::string> names;
  std::vector<std::vector<ParentTerm>> parents;
  std::vector<NoiseSpec> noise;

  std::size_t p() const { return names.size(); }
  Graph graph() const;
  /// The structure as a tree, if it is one.
  std::optional<DirectedTree> tree() const;
};

struct ScmOptions {
  double alpha = 1.0;  // noise shape
  double root_sigma_lo = 1.0, root_sigma_hi = 2.0;
  double sigma_lo = 0.2, sigma_hi = 0.28284271247461901;  // (1/5, sqrt(2)/5)
};

/// Random Fourier-feature functions on every edge and random noise scales.
ScmSpec random_scm(const DirectedTree& t, const ScmOptions& opt, std::uint64_t seed);
ScmSpec random_scm(const Graph& g, const ScmOptions& opt, std::uint64_t seed);

/// X := N_X, Y := X^3 / 50.625 + N_Y, Z := Y + N_Z with noise variances
/// (1.5, 0.5, 0.5); 50.625 = Var(X^3). A greedy edge-by-edge search picks
/// Z -> Y first here, while the exact tree search does not.
ScmSpec chain3();

/// X := sign(N_X)|N_X|^alpha, Y := (1 - lambda) X^3 + lambda X + N_Y with
/// standard normal N_X, N_Y. lambda = 1, alpha = 1 is linear Gaussian.
ScmSpec bivariate(double lambda, double alpha);

/// Type 1 tree plus each further forward edge j -> i (j < i) with
/// probability extra_prob. Still single-rooted. Experimental.
ScmSpec experimental_dag(std::size_t p, double extra_prob, const ScmOptions& opt,
                         std::uint64_t seed);

/// n rows generated in topological order; columns named by node.
data::Dataset sample_scm(const ScmSpec& spec, std::size_t n, std::uint64_t seed);

/// Number of unordered node pairs whose edge state (absent, u -> v, v -> u)
/// differs. A reversed edge counts once.
std::size_t shd(const Graph& a, const Graph& b);
std::size_t shd(const DirectedTree& a, const DirectedTree& b);

struct AncestorMetrics {
  /// Share of predicted ancestor relations that are true; absent when no
  /// relation is predicted.
  std::optional<double> tpr;
  /// Share of true ancestor relations that are predicted.
  std::optional<double> recall;
};
AncestorMetrics ancestor_metrics(const Graph& truth, const Graph& estimate);

}  // namespace cat::simulate
