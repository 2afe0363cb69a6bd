// cattree: causal additive tree learning, testing and simulation.
// Exit codes: 0 success / hypothesis accepted, 1 rejected, 2 usage or data error.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cat/arborescence.hpp"
#include "cat/benchmark.hpp"
#include "cat/data.hpp"
#include "cat/error.hpp"
#include "cat/gap.hpp"
#include "cat/inference.hpp"
#include "cat/io.hpp"
#include "cat/parallel.hpp"
#include "cat/rng.hpp"
#include "cat/simulate.hpp"
#include "cat/weights.hpp"

namespace {

using namespace cat;

constexpr int kOk = 0;
constexpr int kReject = 1;
constexpr int kError = 2;

struct Common {
  std::string input;
  bool no_header = false;
  bool standardize = false;
  std::string score = "gaussian";
  std::string smoother = "local-linear";
  std::optional<double> tuning;
  int cv_folds = 10;
  int entropy_k = 3;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_data_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--input,-i", c.input, "CSV file with one column per variable")->required();
  cmd->add_flag("--no-header", c.no_header, "First CSV line is data, columns become X1..Xp");
  cmd->add_flag("--standardize", c.standardize, "Scale every column to mean 0, variance 1");
}

void add_model_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--smoother", c.smoother, "local-linear or spline")
      ->check(CLI::IsMember({"local-linear", "spline"}));
  cmd->add_option("--bandwidth", c.tuning, "Fixed bandwidth or spline penalty (default: CV)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cv-folds", c.cv_folds, "Folds for bandwidth selection")->check(CLI::Range(2, 1000));
  cmd->add_option("--entropy-k", c.entropy_k, "Neighbour order of the entropy estimator")
      ->check(CLI::Range(1, 1000));
}

void add_run_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed for every random choice");
  cmd->add_option("--threads", c.threads, "Worker threads (default: CAT_THREADS or 1)")
      ->check(CLI::Range(0, 4096));
}

data::Dataset load(const Common& c) {
  auto d = data::load_csv(c.input, !c.no_header);
  return c.standardize ? data::standardize(d) : d;
}

weights::WeightOptions weight_options(const Common& c) {
  weights::WeightOptions o;
  o.kind = weights::score_from_string(c.score);
  o.smoother.backend = smoother::backend_from_string(c.smoother);
  o.smoother.tuning = c.tuning;
  o.smoother.cv_folds = c.cv_folds;
  o.smoother.seed = c.seed;
  o.entropy.k = c.entropy_k;
  o.threads = resolve_threads(c.threads);
  return o;
}

void emit(const std::string& path, const io::Json& j) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty())
    std::cout << text;
  else
    io::write_file(path, text);
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
}

// fit ---------------------------------------------------------------------

struct FitArgs {
  Common c;
  std::string out, dot, weights_out;
  std::optional<double> split;
};

int cmd_fit(const FitArgs& a) {
  const auto d = load(a.c);
  const auto opt = weight_options(a.c);
  const auto w = a.split ? weights::weight_matrix(data::split(d, *a.split, a.c.seed), opt)
                         : weights::weight_matrix(d, opt);
  const auto sol = arborescence::min_arborescence(w.values());
  io::Json j = io::to_json(sol.tree, d.names());
  j["total"] = sol.total;
  j["score"] = weights::to_string(w.kind());
  if (!a.out.empty()) emit(a.out, j);
  if (!a.dot.empty()) io::write_file(a.dot, io::to_dot(sol.tree, d.names()));
  if (!a.weights_out.empty()) emit(a.weights_out, io::to_json(w));
  std::cout << "root " << d.names()[sol.tree.root()] << "\n";
  for (const auto& e : sol.tree.edges())
    std::cout << d.names()[e.from] << " -> " << d.names()[e.to] << "  " << fixed(w(e.from, e.to))
              << "\n";
  std::cout << "total " << fixed(sol.total) << "\n";
  return kOk;
}

// confidence / test -------------------------------------------------------

struct InferenceArgs {
  Common c;
  std::string out;
  double alpha = 0.05;
  double split = 0.5;
  std::vector<std::string> constraints;
  std::vector<std::string> hypotheses;
};

inference::ConfidenceReport region(const InferenceArgs& a, const data::Dataset& d) {
  check_alpha(a.alpha);
  auto cr = inference::split_confidence(d, a.split, a.c.seed, weight_options(a.c), a.alpha);
  for (const auto& w : cr.warnings) std::cerr << "warning: " << w << "\n";
  return cr;
}

int cmd_confidence(const InferenceArgs& a) {
  const auto d = load(a.c);
  const auto cr = region(a, d);
  emit(a.out, io::to_json(cr));
  return kOk;
}

int cmd_test(const InferenceArgs& a) {
  check_alpha(a.alpha);
  const auto d = load(a.c);
  std::vector<arborescence::EdgeConstraintSet> rs;
  {
    arborescence::EdgeConstraintSet joint;
    for (const auto& s : a.constraints) io::parse_constraint(s, d.names(), joint);
    if (!a.constraints.empty() || a.hypotheses.empty()) rs.push_back(joint);
    for (const auto& h : a.hypotheses) rs.push_back(io::parse_constraints(h, d.names()));
  }
  const auto cr = region(a, d);
  const auto reports = inference::test_many(cr, rs, resolve_threads(a.c.threads));
  io::Json tests = io::Json::array();
  bool any_reject = false;
  for (const auto& r : reports) {
    tests.push_back(io::to_json(r, d.names()));
    any_reject = any_reject || r.reject;
    std::cout << (r.reject ? "reject " : "accept ") << '[' << io::to_string(r.constraints, d.names())
              << "] s_lower=" << (r.s_lower ? fixed(*r.s_lower) : std::string("infeasible"))
              << " s_upper=" << fixed(r.s_upper) << "\n";
  }
  io::Json j = {{"alpha", cr.alpha}, {"z", cr.z}, {"n", cr.n}, {"tests", tests}};
  if (!a.out.empty()) emit(a.out, j);
  return any_reject ? kReject : kOk;
}

// gap ---------------------------------------------------------------------

struct GapArgs {
  Common c;
  std::string out;
  std::vector<std::string> bivariate;
  std::size_t permutations = 200;
};

int cmd_gap(const GapArgs& a) {
  const auto d = load(a.c);
  auto opt = weight_options(a.c);
  io::Json j;
  if (!a.bivariate.empty()) {
    const auto x = d.index_of(a.bivariate[0]);
    const auto y = d.index_of(a.bivariate[1]);
    if (!x || !y) throw ConfigError("--bivariate names an unknown column");
    if (*x == *y) throw ConfigError("--bivariate needs two different columns");
    const auto g = gap::bivariate_gap_test(d.column(*x), d.column(*y), opt.smoother, opt.entropy,
                                           a.permutations, a.c.seed, opt.threads);
    j = {{"cause", a.bivariate[0]}, {"effect", a.bivariate[1]}, {"bivariate", io::to_json(g)}};
    std::cout << "gap " << fixed(g.gap);
    if (g.p_value) std::cout << "  p-value " << fixed(*g.p_value);
    std::cout << "\n";
  } else {
    const auto w = weights::weight_matrix(d, opt);
    std::optional<weights::WeightMatrix> we;
    if (w.kind() != weights::ScoreKind::Entropy) {
      auto eo = opt;
      eo.kind = weights::ScoreKind::Entropy;
      we = weights::weight_matrix(d, eo);
    }
    const auto g = gap::empirical_gap(w, we ? &*we : nullptr);
    j = io::to_json(g, d.names());
    std::cout << "best " << fixed(g.best.total) << "  second " << fixed(g.second_best.total)
              << "  gap " << fixed(g.empirical_gap) << "\n";
  }
  if (!a.out.empty()) emit(a.out, j);
  return kOk;
}

// simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string preset = "type1";
  std::size_t p = 8;
  std::size_t n = 1000;
  double noise_alpha = 1.0;
  double lambda = 0.0;
  double extra_prob = 0.05;
  std::uint64_t seed = 0;
  std::string out, truth, truth_dot;
};

int cmd_simulate(const SimulateArgs& a) {
  simulate::ScmOptions opt;
  opt.alpha = a.noise_alpha;
  simulate::ScmSpec spec;
  if (a.preset == "chain3") {
    spec = simulate::chain3();
  } else if (a.preset == "bivariate") {
    spec = simulate::bivariate(a.lambda, a.noise_alpha);
  } else if (a.preset == "dag") {
    spec = simulate::experimental_dag(a.p, a.extra_prob, opt, a.seed);
  } else {
    const auto t = simulate::gen_tree(simulate::tree_type_from_string(a.preset), a.p,
                                      child_seed(a.seed, {1}));
    spec = simulate::random_scm(t, opt, child_seed(a.seed, {2}));
  }
  const auto d = simulate::sample_scm(spec, a.n, child_seed(a.seed, {3}));
  data::save_csv(d, a.out);
  const auto tree = spec.tree();
  if (!a.truth.empty()) {
    io::Json j;
    if (tree) {
      j = io::to_json(*tree, d.names());
    } else {
      io::Json edges = io::Json::array();
      const auto g = spec.graph();
      for (std::size_t i = 0; i < g.p(); ++i)
        for (std::size_t par : g.parents[i])
          edges.push_back(io::Json{{"from", d.names()[par]}, {"to", d.names()[i]}});
      j = {{"edges", edges}};
    }
    emit(a.truth, j);
  }
  if (!a.truth_dot.empty()) {
    if (!tree) throw ConfigError("--truth-dot needs a tree-shaped model");
    io::write_file(a.truth_dot, io::to_dot(*tree, d.names()));
  }
  std::cout << "wrote " << d.n() << " rows, " << d.p() << " columns\n";
  return kOk;
}

// benchmark ---------------------------------------------------------------

struct BenchmarkArgs {
  std::vector<std::size_t> p{8};
  std::vector<std::size_t> n{500};
  std::vector<std::string> tree_types{"type1"};
  std::vector<double> noise_alpha{1.0};
  std::vector<std::string> scores{"gaussian"};
  std::size_t reps = 10;
  Common c;
  std::string out, summary;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  benchmark::Grid g;
  g.p = a.p;
  g.n = a.n;
  g.tree_types.clear();
  for (const auto& t : a.tree_types) g.tree_types.push_back(simulate::tree_type_from_string(t));
  g.alpha = a.noise_alpha;
  g.scores.clear();
  for (const auto& s : a.scores) g.scores.push_back(weights::score_from_string(s));
  g.reps = a.reps;
  const auto opt = weight_options(a.c);
  g.smoother = opt.smoother;
  g.entropy = opt.entropy;
  for (std::size_t p : g.p)
    if (p < 2) throw ConfigError("--p values must be at least 2");
  const auto r = benchmark::run_benchmark(g, a.c.seed, opt.threads);
  const std::string csv = benchmark::to_csv(r);
  if (a.out.empty())
    std::cout << csv;
  else
    io::write_file(a.out, csv);
  if (!a.summary.empty()) emit(a.summary, io::summary_json(r));
  for (const auto& s : r.summary)
    std::cerr << "p=" << s.p << " n=" << s.n << " " << simulate::to_string(s.tree_type)
              << " alpha=" << s.alpha << " " << weights::to_string(s.score) << "  median SHD "
              << (s.shd_median ? fixed(*s.shd_median) : std::string("n/a")) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal additive trees: structure learning, inference and simulation"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the causal tree");
  add_data_options(fit_cmd, fit.c);
  add_model_options(fit_cmd, fit.c);
  add_run_options(fit_cmd, fit.c);
  fit_cmd->add_option("--score", fit.c.score, "gaussian or entropy")
      ->check(CLI::IsMember({"gaussian", "entropy"}));
  fit_cmd->add_option("--out,-o", fit.out, "Tree JSON");
  fit_cmd->add_option("--dot", fit.dot, "Tree in DOT format");
  fit_cmd->add_option("--weights", fit.weights_out, "Weight matrix JSON");
  fit_cmd->add_option("--split", fit.split, "Fit regressions on this fraction, score on the rest")
      ->check(CLI::Range(0.0, 1.0));

  InferenceArgs conf;
  auto* conf_cmd = app.add_subcommand("confidence", "Simultaneous edge-weight intervals");
  InferenceArgs test;
  auto* test_cmd = app.add_subcommand("test", "Test substructure hypotheses");
  for (auto [cmd, args] : {std::pair{conf_cmd, &conf}, std::pair{test_cmd, &test}}) {
    add_data_options(cmd, args->c);
    add_model_options(cmd, args->c);
    add_run_options(cmd, args->c);
    cmd->add_option("--alpha", args->alpha, "Family-wise level");
    cmd->add_option("--split", args->split, "Fraction of rows used to fit regressions")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--out,-o", args->out, "Report JSON");
  }
  test_cmd->add_option("--constraint,-c", test.constraints,
                       "A->B, A-x>B or root:A; repeated flags form one hypothesis");
  test_cmd->add_option("--hypothesis", test.hypotheses,
                       "Comma-separated constraints forming one hypothesis; repeatable");

  GapArgs gapa;
  auto* gap_cmd = app.add_subcommand("gap", "Identifiability-gap diagnostics");
  add_data_options(gap_cmd, gapa.c);
  add_model_options(gap_cmd, gapa.c);
  add_run_options(gap_cmd, gapa.c);
  gap_cmd->add_option("--score", gapa.c.score, "Score of the best/second-best trees")
      ->check(CLI::IsMember({"gaussian", "entropy"}));
  gap_cmd->add_option("--bivariate", gapa.bivariate, "CAUSE EFFECT: mutual-information gap")
      ->expected(2);
  gap_cmd->add_option("--permutations", gapa.permutations, "Permutations for the p-value");
  gap_cmd->add_option("--out,-o", gapa.out, "Report JSON");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample data from a causal additive model");
  sim_cmd->add_option("--preset", sim.preset, "type1, type2, chain3, bivariate or dag")
      ->check(CLI::IsMember({"type1", "type2", "chain3", "bivariate", "dag"}));
  sim_cmd->add_option("--p", sim.p, "Number of variables")->check(CLI::Range(2, 100000));
  sim_cmd->add_option("--n", sim.n, "Number of rows")->check(CLI::Range(2, 100000000));
  sim_cmd->add_option("--noise-alpha", sim.noise_alpha, "Noise shape, 1 is Gaussian")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--lambda", sim.lambda, "Bivariate preset: 0 cubic, 1 linear")
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--extra-prob", sim.extra_prob, "DAG preset: extra edge probability")
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--seed", sim.seed, "Seed");
  sim_cmd->add_option("--out,-o", sim.out, "Data CSV")->required();
  sim_cmd->add_option("--truth", sim.truth, "True structure JSON");
  sim_cmd->add_option("--truth-dot", sim.truth_dot, "True tree in DOT format");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Structure-recovery simulation study");
  bench_cmd->add_option("--p", bench.p, "System sizes")->delimiter(',');
  bench_cmd->add_option("--n", bench.n, "Sample sizes")->delimiter(',');
  bench_cmd->add_option("--tree-type", bench.tree_types, "type1, type2")->delimiter(',');
  bench_cmd->add_option("--noise-alpha", bench.noise_alpha, "Noise shapes")->delimiter(',');
  bench_cmd->add_option("--score", bench.scores, "gaussian, entropy")->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "Replicates per cell")->check(CLI::Range(1, 1000000));
  add_model_options(bench_cmd, bench.c);
  add_run_options(bench_cmd, bench.c);
  bench_cmd->add_option("--out,-o", bench.out, "Per-replicate CSV (default stdout)");
  bench_cmd->add_option("--summary", bench.summary, "Per-cell summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*conf_cmd) return cmd_confidence(conf);
    if (*test_cmd) return cmd_test(test);
    if (*gap_cmd) return cmd_gap(gapa);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*bench_cmd) return cmd_benchmark(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
