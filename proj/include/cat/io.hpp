#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cat/arborescence.hpp"
#include "cat/benchmark.hpp"
#include "cat/gap.hpp"
#include "cat/inference.hpp"
#include "cat/weights.hpp"

namespace cat::io {

using Json = nlohmann::ordered_json;

/// {root, edges: [{from, to}]} with node names.
Json to_json(const arborescence::DirectedTree& t, const std::vector<std::string>& names);
arborescence::DirectedTree tree_from_json(const Json& j, const std::vector<std::string>& names);

/// {names, kind, entries: [{from, to, weight}]}
Json to_json(const weights::WeightMatrix& w);
weights::WeightMatrix weights_from_json(const Json& j);

/// {alpha, z, n, edges: [{from, to, w, sigma, lo, hi}], warnings}
Json to_json(const inference::ConfidenceReport& cr);

/// {constraints, s_lower, s_upper, reject, infeasible, ...}
Json to_json(const inference::TestReport& r, const std::vector<std::string>& names);

Json to_json(const gap::BivariateGap& g);
Json to_json(const gap::GapReport& g, const std::vector<std::string>& names);

/// Per-cell medians and quartiles.
Json summary_json(const benchmark::Result& r);

/// digraph with one edge per line, nodes labelled by name.
std::string to_dot(const arborescence::DirectedTree& t, const std::vector<std::string>& names);

/// One constraint: "A->B" requires, "A-x>B" forbids, "root:A" fixes the root.
void parse_constraint(std::string_view text, const std::vector<std::string>& names,
                      arborescence::EdgeConstraintSet& into);
/// Several constraints separated by ',' or ';'.
arborescence::EdgeConstraintSet parse_constraints(std::string_view text,
                                                  const std::vector<std::string>& names);
std::string to_string(const arborescence::EdgeConstraintSet& c,
                      const std::vector<std::string>& names);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace cat::io
