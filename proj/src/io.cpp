#include "cat/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cat/error.hpp"

namespace cat::io {

namespace {

std::size_t index_of(const std::vector<std::string>& names, std::string_view name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw ConfigError("unknown node '" + std::string(name) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

Json edges_json(const std::vector<arborescence::Edge>& edges,
                const std::vector<std::string>& names) {
  Json out = Json::array();
  for (const auto& e : edges) out.push_back({{"from", names[e.from]}, {"to", names[e.to]}});
  return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const arborescence::DirectedTree& t, const std::vector<std::string>& names) {
  return {{"root", names[t.root()]}, {"edges", edges_json(t.edges(), names)}};
}

arborescence::DirectedTree tree_from_json(const Json& j, const std::vector<std::string>& names) {
  std::vector<arborescence::Edge> edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({index_of(names, e.at("from").get<std::string>()),
                     index_of(names, e.at("to").get<std::string>())});
  auto t = arborescence::DirectedTree::from_edges(names.size(), edges);
  if (j.contains("root") && names[t.root()] != j.at("root").get<std::string>())
    throw ConfigError("tree root does not match its edges");
  return t;
}

Json to_json(const weights::WeightMatrix& w) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < w.p(); ++i)
    for (std::size_t j = 0; j < w.p(); ++j)
      if (i != j)
        entries.push_back({{"from", w.names()[j]}, {"to", w.names()[i]}, {"weight", w(j, i)}});
  return {{"names", w.names()}, {"kind", weights::to_string(w.kind())}, {"entries", entries}};
}

weights::WeightMatrix weights_from_json(const Json& j) {
  const auto names = j.at("names").get<std::vector<std::string>>();
  const std::size_t p = names.size();
  Matrix v(p, p, std::nan(""));
  for (const auto& e : j.at("entries"))
    v(index_of(names, e.at("from").get<std::string>()),
      index_of(names, e.at("to").get<std::string>())) = e.at("weight").get<double>();
  return weights::WeightMatrix(names, weights::score_from_string(j.at("kind").get<std::string>()),
                               std::move(v));
}

Json to_json(const inference::ConfidenceReport& cr) {
  Json edges = Json::array();
  for (const auto& e : cr.edges)
    edges.push_back({{"from", cr.names[e.from]},
                     {"to", cr.names[e.to]},
                     {"w", e.w},
                     {"sigma", e.sigma},
                     {"lo", e.lo},
                     {"hi", e.hi}});
  return {{"alpha", cr.alpha}, {"z", cr.z},           {"n", cr.n},
          {"edges", edges},    {"warnings", cr.warnings}};
}

Json to_json(const inference::TestReport& r, const std::vector<std::string>& names) {
  Json out = {{"constraints", to_string(r.constraints, names)},
              {"alpha", r.alpha},
              {"s_lower", optional_number(r.s_lower)},
              {"s_upper", r.s_upper},
              {"reject", r.reject},
              {"infeasible", r.infeasible}};
  if (r.infeasible) out["reason"] = r.reason;
  return out;
}

Json to_json(const gap::BivariateGap& g) {
  Json out = {{"mi", g.mi}, {"gap", g.gap}};
  if (g.p_value) {
    out["permutations"] = g.permutations;
    out["p_value"] = *g.p_value;
  }
  return out;
}

Json to_json(const gap::GapReport& g, const std::vector<std::string>& names) {
  Json out = {{"best", {{"total", g.best.total}, {"tree", to_json(g.best.tree, names)}}},
              {"second_best",
               {{"total", g.second_best.total}, {"tree", to_json(g.second_best.tree, names)}}},
              {"empirical_gap", g.empirical_gap}};
  if (g.reversal) {
    Json rev = Json::array();
    for (const auto& e : g.best.tree.edges())
      rev.push_back({{"from", names[e.from]}, {"to", names[e.to]}, {"gap", (*g.reversal)(e.from, e.to)}});
    out["reversal_gaps"] = rev;
    out["min_reversal_gap"] = optional_number(g.min_reversal_gap);
  }
  if (g.bivariate) out["bivariate"] = to_json(*g.bivariate);
  return out;
}

Json summary_json(const benchmark::Result& r) {
  Json cells = Json::array();
  for (const auto& s : r.summary)
    cells.push_back({{"p", s.p},
                     {"n", s.n},
                     {"tree_type", simulate::to_string(s.tree_type)},
                     {"alpha", s.alpha},
                     {"score", weights::to_string(s.score)},
                     {"reps", s.reps},
                     {"failures", s.failures},
                     {"shd_median", optional_number(s.shd_median)},
                     {"shd_q1", optional_number(s.shd_q1)},
                     {"shd_q3", optional_number(s.shd_q3)},
                     {"ancestor_tpr_median", optional_number(s.tpr_median)},
                     {"ancestor_recall_median", optional_number(s.recall_median)}});
  return {{"cells", cells}};
}

std::string to_dot(const arborescence::DirectedTree& t, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "digraph {\n";
  for (std::size_t i = 0; i < t.p(); ++i) os << "  \"" << names[i] << "\";\n";
  for (const auto& e : t.edges())
    os << "  \"" << names[e.from] << "\" -> \"" << names[e.to] << "\";\n";
  os << "}\n";
  return os.str();
}

void parse_constraint(std::string_view text, const std::vector<std::string>& names,
                      arborescence::EdgeConstraintSet& into) {
  const auto s = trim(text);
  if (s.substr(0, 5) == "root:") {
    const auto r = index_of(names, trim(s.substr(5)));
    if (into.root && *into.root != r) throw ConfigError("two different roots requested");
    into.root = r;
    return;
  }
  bool forbid = true;
  auto pos = s.find("-x>");
  std::size_t len = 3;
  if (pos == std::string_view::npos) {
    forbid = false;
    pos = s.find("->");
    len = 2;
  }
  if (pos == std::string_view::npos)
    throw ConfigError("malformed constraint '" + std::string(s) +
                      "' (expected A->B, A-x>B or root:A)");
  const arborescence::Edge e{index_of(names, trim(s.substr(0, pos))),
                             index_of(names, trim(s.substr(pos + len)))};
  if (e.from == e.to) throw ConfigError("constraint '" + std::string(s) + "' is a self loop");
  (forbid ? into.forbidden : into.required).push_back(e);
}

arborescence::EdgeConstraintSet parse_constraints(std::string_view text,
                                                  const std::vector<std::string>& names) {
  arborescence::EdgeConstraintSet c;
  while (!text.empty()) {
    const auto cut = text.find_first_of(",;");
    const auto item = trim(text.substr(0, cut));
    if (!item.empty()) parse_constraint(item, names, c);
    if (cut == std::string_view::npos) break;
    text.remove_prefix(cut + 1);
  }
  return c;
}

std::string to_string(const arborescence::EdgeConstraintSet& c,
                      const std::vector<std::string>& names) {
  std::string out;
  auto add = [&](const std::string& s) {
    if (!out.empty()) out += ',';
    out += s;
  };
  for (const auto& e : c.required) add(names[e.from] + "->" + names[e.to]);
  for (const auto& e : c.forbidden) add(names[e.from] + "-x>" + names[e.to]);
  if (c.root) add("root:" + names[*c.root]);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace cat::io
