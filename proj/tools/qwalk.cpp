#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/closed_forms.hpp"
#include "qwalk/corpus.hpp"
#include "qwalk/families.hpp"
#include "qwalk/involution.hpp"
#include "qwalk/json_io.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/time_expr.hpp"
#include "qwalk/transfer.hpp"

using namespace qwalk;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailure = 1;
constexpr int kUsageError = 2;

/// Raised for verification failures that must exit with status 1.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path + "': " + e.what());
  }
}

/// Accepts a bare graph or the output of `build`.
WeightedGraph load_graph(const std::string& path) {
  const json j = read_json(path);
  return graph_from_json(j.contains("graph") ? j.at("graph") : j);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

std::vector<double> seeded_times(std::uint64_t seed, std::size_t count, double t_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, t_max);
  std::vector<double> t(count);
  for (double& x : t) x = dist(rng);
  return t;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const std::size_t v = std::stoul(s);
      return {v, v};
    }
    return {std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("bad range '" + s + "', expected lo:hi");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

struct Common {
  double q = 1.0;
  std::string matrix = "qlap";
  std::string out;
  std::uint64_t seed = 42;
};

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string family;
  std::map<std::string, std::string> params;
  std::vector<std::string> extra;
  std::string attach;
  std::string at;
};

int cmd_build(const BuildArgs& a, const Common& c) {
  ParamMap params = a.params;
  for (const std::string& kv : a.extra) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--param expects key=value");
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  FamilyInstance f = build_family(a.family, params, c.q);
  if (!a.attach.empty()) {
    if (a.at.empty()) throw std::invalid_argument("--attach needs --at MARKER");
    f = attach_graph(f, load_graph(a.attach), a.at);
  }
  emit(family_to_json(f).dump(2) + "\n", c.out);
  return kOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string graph;
  std::string x;
  std::string y;
  std::string time;
  std::optional<double> search;
};

int cmd_analyze(const AnalyzeArgs& a, const Common& c) {
  const WeightedGraph g = load_graph(a.graph);
  const MatrixKind kind = parse_matrix_kind(c.matrix);
  const double q = effective_q(kind, c.q);
  const SpectralDecomposition d = eigendecompose(graph_matrix(g, kind, q));
  const PureState x = parse_state(a.x, g.order());
  const PureState y = parse_state(a.y, g.order());

  json out = {{"matrix", to_string(kind)},
              {"q", q},
              {"eigenvalues", std::vector<double>(d.eigenvalues().begin(), d.eigenvalues().end())},
              {"support", {{"x", eigenvalue_support(d, x.vector())}, {"y", eigenvalue_support(d, y.vector())}}},
              {"x_fixed", is_fixed_state(d, x.vector())}};
  double overlap = 0.0;
  for (std::size_t i = 0; i < g.order(); ++i) overlap += x.vector()[i] * y.vector()[i];
  const bool parallel = std::abs(overlap) >= 1.0 - 1e-12;
  out["strongly_cospectral"] = parallel ? json(nullptr) : json(is_strongly_cospectral(d, x, y));

  if (!a.time.empty()) {
    out["report"] = report_to_json(detect_pst(d, x, y, TimeExpr(a.time)(q)));
  } else {
    const auto hits = search_pst(d, x, y, *a.search);
    json list = json::array();
    for (const TimePoint& p : hits) list.push_back({{"time", p.time}, {"fidelity", p.fidelity}});
    out["search"] = {{"t_max", *a.search}, {"hits", list}};
    if (hits.empty()) {
      const PgstScan scan = pgst_heuristic(d, x, y, *a.search);
      out["search"]["best"] = {{"time", scan.best.time}, {"fidelity", scan.best.fidelity}};
      out["report"] = {{"verdict", "NO_PST_FOUND"}};
    } else {
      out["report"] = report_to_json(detect_pst(d, x, y, hits.front().time));
    }
  }
  emit(out.dump(2) + "\n", c.out);
  return kOk;
}

// ---------------------------------------------------------------- involutions

struct InvolutionArgs {
  std::string graph;
  std::string involution;
  double t_max = 10.0;
  std::size_t max_order = 16;
};

int cmd_involutions(const InvolutionArgs& a, const Common& c) {
  const WeightedGraph g = load_graph(a.graph);
  std::vector<Involution> invs;
  if (!a.involution.empty()) {
    const json j = read_json(a.involution);
    const std::vector<std::size_t> perm = permutation_from_json(j.contains("involution") ? j.at("involution") : j, g.order());
    try {
      invs.push_back(verify_involution(g, perm));
    } catch (const InvolutionError& e) {
      throw VerificationFailure(std::string("involution rejected: ") + e.what());
    }
  } else {
    invs = find_involutions(g, {a.max_order, {}});
  }
  const QParameter q(c.q);
  const std::vector<double> times = seeded_times(c.seed, 20, 10.0);
  json list = json::array();
  for (const Involution& inv : invs) {
    json entry = involution_to_json(inv);
    entry["block_residual"] = verify_block_diagonalization(g, inv, q, times);
    entry["spectrum_factorization"] = spectrum_factorization_check(g, inv, q);
    json ws = json::array();
    for (const LiftedWitness& w : reduce_pair_pst(g, inv, q, a.t_max))
      ws.push_back({{"sector", w.sector == Sector::Minus ? "minus" : "plus"},
                    {"x", w.x.label()},
                    {"y", w.y.label()},
                    {"time", w.time},
                    {"fidelity", w.fidelity}});
    entry["witnesses"] = ws;
    list.push_back(entry);
  }
  emit(json{{"q", c.q}, {"involutions", list}}.dump(2) + "\n", c.out);
  return kOk;
}

// ---------------------------------------------------------------- corpus

struct CorpusArgs {
  std::vector<double> q_samples{1.0, -1.0, 0.5};
  double tol = kDefaultPstTol;
  std::vector<std::string> only;
  std::string claims;
};

int cmd_corpus(const CorpusArgs& a, const Common& c) {
  const std::vector<CorpusEntry> entries =
      a.claims.empty() ? default_corpus() : load_claims(read_json(a.claims));
  CorpusOptions opts;
  opts.q_samples = a.q_samples;
  opts.tol = a.tol;
  opts.only = a.only;
  const std::vector<ClaimRecord> records = run_corpus(entries, opts);
  emit(corpus_csv(records), c.out);
  std::size_t failed = 0;
  for (const ClaimRecord& r : records)
    if (r.status == ClaimStatus::Failed) {
      ++failed;
      std::cerr << "FAILED " << r.id << " q=" << r.q << ": " << r.detail << "\n";
    }
  std::cerr << records.size() - failed << "/" << records.size() << " claim checks verified\n";
  return failed == 0 ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- fidelity-curve

struct CurveArgs {
  std::string graph;
  std::string x;
  std::string y;
  double t_max = 10.0;
  std::size_t samples = 1001;
};

int cmd_curve(const CurveArgs& a, const Common& c) {
  const WeightedGraph g = load_graph(a.graph);
  const MatrixKind kind = parse_matrix_kind(c.matrix);
  const SpectralDecomposition d = eigendecompose(graph_matrix(g, kind, effective_q(kind, c.q)));
  std::string csv = "t,fidelity\n";
  for (const TimePoint& p : fidelity_curve(d, parse_state(a.x, g.order()), parse_state(a.y, g.order()),
                                           a.t_max, a.samples))
    csv += fmt(p.time) + "," + fmt(p.fidelity) + "\n";
  emit(csv, c.out);
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string family = "cycle-plus-chord";
  std::string n_range = "7:20";
  std::string b_range;
  std::vector<double> rho{1.0};
  int zeta = -1;
  double t_max = 0.0;
};

int cmd_sweep(const SweepArgs& a, const Common& c) {
  if (a.family != "cycle-plus-chord") throw std::invalid_argument("sweep supports cycle-plus-chord only");
  const Zeta zeta(a.zeta);
  const auto [n_lo, n_hi] = parse_range(a.n_range);
  std::string csv =
      "n,b,rho,zeta,candidate_k,candidate_l,gap,gap_below_one,in_nonexistence_range,support_verified,"
      "pair_pst_hits,first_pst_time\n";
  for (std::size_t n = std::max<std::size_t>(n_lo, 3); n <= n_hi; ++n) {
    auto [b_lo, b_hi] = a.b_range.empty() ? std::pair<std::size_t, std::size_t>{1, n - 1} : parse_range(a.b_range);
    b_hi = std::min(b_hi, n - 1);
    for (std::size_t b = std::max<std::size_t>(b_lo, 1); b <= b_hi; ++b)
      for (double rho : a.rho) {
        const auto cand = vertex_pst_candidates(n, b, zeta);
        const NonexistenceReport r = nonexistence_witness(n, b, rho, zeta);
        std::string hits = "";
        std::string first = "";
        if (a.t_max > 0.0) {
          const SpectralDecomposition d = eigendecompose(perturbed_cycle_matrix(n, b, rho, zeta));
          const auto found = find_pair_pst(d, a.t_max);
          hits = std::to_string(found.size());
          if (!found.empty()) {
            double t = found.front().first.time;
            for (const auto& p : found) t = std::min(t, p.first.time);
            first = fmt(t);
          }
        }
        csv += std::to_string(n) + "," + std::to_string(b) + "," + fmt(rho) + "," +
               std::to_string(zeta.value()) + "," + (cand ? std::to_string(cand->first) : "") + "," +
               (cand ? std::to_string(cand->second) : "") + "," + fmt(r.gap_closed_form) + "," +
               (r.gap_below_one ? "1" : "0") + "," + (r.in_nonexistence_range ? "1" : "0") + "," +
               (r.support_verified ? "1" : "0") + "," + hits + "," + first + "\n";
      }
  }
  emit(csv, c.out);
  return kOk;
}

// ---------------------------------------------------------------- search

struct SearchArgs {
  std::string base = "cycle";
  std::size_t n = 6;
  std::size_t edges = 2;
  double t_max = 10.0;
  std::size_t max_order = 16;
};

int cmd_search(const SearchArgs& a, const Common& c) {
  WeightedGraph base;
  if (a.base == "cycle")
    base = cycle_graph(a.n);
  else if (a.base == "path")
    base = path_graph(a.n);
  else
    base = load_graph(a.base);
  PerturbationSearchOptions o;
  o.num_edges = a.edges;
  o.kind = parse_matrix_kind(c.matrix);
  o.q = c.q;
  o.t_max = a.t_max;
  o.max_order = a.max_order;
  const auto ws = perturbation_search(base, o);
  json list = json::array();
  for (const auto& w : ws) list.push_back(witness_to_json(w));
  emit(json{{"base", graph_to_json(base)}, {"num_edges", a.edges}, {"witnesses", list}}.dump(2) + "\n",
       c.out);
  return ws.empty() ? kVerificationFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time quantum walks under the q-Laplacian: state transfer analysis"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub, bool matrix) {
    sub->add_option("--q", common.q, "q parameter (nonzero)")->capture_default_str();
    if (matrix)
      sub->add_option("--matrix", common.matrix, "qlap | lap | signless")->capture_default_str();
    sub->add_option("-o,--output", common.out, "output file (default stdout)");
    sub->add_option("--seed", common.seed, "seed for randomised checks")->capture_default_str();
  };

  BuildArgs build;
  auto* b = app.add_subcommand("build", "build a family graph; emits graph, markers, involution, claims");
  b->add_option("--family", build.family, "family name")->required();
  for (const char* key : {"n", "m", "k", "cycle", "tail", "b", "rho", "w", "w1", "w2"})
    b->add_option_function<std::string>(std::string("--") + key,
                                         [&build, key](const std::string& v) { build.params[key] = v; },
                                         "family parameter (expression in q allowed)");
  b->add_flag_function("--add-e", [&build](std::int64_t) { build.params["add-e"] = "1"; },
                       "add the E edges (kmn-minus-matching)");
  b->add_option("--param", build.extra, "extra key=value parameters");
  b->add_option("--attach", build.attach, "graph JSON to glue on (its vertex 0)");
  b->add_option("--at", build.at, "marker of the gluing vertex");
  add_common(b, false);
  b->footer("families: path cycle complete-bipartite wheel path-potentials cycle-with-tail\n"
            "          kmn-minus-matching cycle-plus-chord path-plus-two-edges c5-potential");

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "state transfer between two states");
  an->add_option("graph", analyze.graph, "graph JSON")->required();
  an->add_option("--state-x", analyze.x, "v:3, pair:1,4, plus:2,5, spair:1,4:0.5, raw:...")->required();
  an->add_option("--state-y", analyze.y, "target state")->required();
  auto* t_opt = an->add_option("--time", analyze.time, "time, an expression in q");
  auto* s_opt = an->add_option("--search", analyze.search, "search (0, T_MAX] for PST");
  t_opt->excludes(s_opt);
  add_common(an, true);

  InvolutionArgs inv;
  auto* iv = app.add_subcommand("involutions", "involutions, block checks and lifted witnesses");
  iv->add_option("graph", inv.graph, "graph JSON")->required();
  iv->add_option("--involution", inv.involution, "check this involution only ({orbits, fixed})");
  iv->add_option("--t-max", inv.t_max, "horizon for the block searches")->capture_default_str();
  iv->add_option("--max-order", inv.max_order, "exhaustive search size bound")->capture_default_str();
  add_common(iv, false);

  CorpusArgs corpus;
  auto* co = app.add_subcommand("corpus", "verify the built-in claim corpus");
  co->add_option("--q-samples", corpus.q_samples, "q values for q-parametric claims")
      ->delimiter(',')
      ->capture_default_str();
  co->add_option("--tol", corpus.tol, "PST tolerance on 1 - fidelity")->capture_default_str();
  co->add_option("--only", corpus.only, "run ids with these prefixes");
  co->add_option("--claims", corpus.claims, "claims JSON to run instead of the built-in corpus");
  add_common(co, false);
  co->footer("CSV columns: id,q,time,fidelity,residual,status (%.12e numbers).\n"
             "Structural checks report fidelity 1 on success and the measured discrepancy as residual.\n"
             "Exit status 1 when any check fails.");

  CurveArgs curve;
  auto* fc = app.add_subcommand("fidelity-curve", "sample |y^T U(t) x| on [0, t_max]");
  fc->add_option("graph", curve.graph, "graph JSON")->required();
  fc->add_option("--state-x", curve.x, "source state")->required();
  fc->add_option("--state-y", curve.y, "target state")->required();
  fc->add_option("--t-max", curve.t_max, "end time")->capture_default_str();
  fc->add_option("--samples", curve.samples, "number of samples")->capture_default_str();
  add_common(fc, true);
  fc->footer("CSV columns: t,fidelity");

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "constraint checks over C_n + rho {0,b}");
  sw->add_option("--family", sweep.family, "cycle-plus-chord")->capture_default_str();
  sw->add_option("--n-range", sweep.n_range, "lo:hi")->capture_default_str();
  sw->add_option("--b-range", sweep.b_range, "lo:hi (default 1:n-1)");
  sw->add_option("--rho-range", sweep.rho, "chord weights")->delimiter(',');
  sw->add_option("--zeta", sweep.zeta, "-1 Laplacian, +1 signless")->capture_default_str();
  sw->add_option("--t-max", sweep.t_max, "also search pair PST up to this time (0: skip)");
  add_common(sw, false);
  sw->footer("CSV columns: n,b,rho,zeta,candidate_k,candidate_l,gap,gap_below_one,\n"
             "in_nonexistence_range,support_verified,pair_pst_hits,first_pst_time");

  SearchArgs search;
  auto* se = app.add_subcommand("search", "edge-insertion search for pair PST witnesses");
  se->add_option("--base", search.base, "cycle | path | graph JSON")->capture_default_str();
  se->add_option("--n", search.n, "order of the base cycle or path")->capture_default_str();
  se->add_option("--edges", search.edges, "number of inserted edges")->capture_default_str();
  se->add_option("--t-max", search.t_max, "search horizon")->capture_default_str();
  se->add_option("--max-order", search.max_order, "size bound")->capture_default_str();
  add_common(se, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*b) return cmd_build(build, common);
    if (*an) {
      if (analyze.time.empty() && !analyze.search) throw std::invalid_argument("give --time or --search");
      return cmd_analyze(analyze, common);
    }
    if (*iv) return cmd_involutions(inv, common);
    if (*co) return cmd_corpus(corpus, common);
    if (*fc) return cmd_curve(curve, common);
    if (*sw) return cmd_sweep(sweep, common);
    if (*se) return cmd_search(search, common);
  } catch (const VerificationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  }
  return kUsageError;
}
