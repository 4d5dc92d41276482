#include "qwalk/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "qwalk/closed_forms.hpp"
#include "qwalk/involution.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStructTol = 1e-12;

ClaimRecord structural(double q, double residual, double tol = kStructTol,
                       std::string detail = {}) {
  ClaimRecord r;
  r.q = q;
  r.residual = residual;
  r.status = residual <= tol ? ClaimStatus::Verified : ClaimStatus::Failed;
  r.fidelity = r.status == ClaimStatus::Verified ? 1.0 : 0.0;
  r.detail = std::move(detail);
  return r;
}

ClaimRecord boolean(double q, bool ok, std::string detail = {}) {
  return structural(q, ok ? 0.0 : 1.0, kStructTol, std::move(detail));
}

CorpusEntry check(std::string id, bool sample_q, std::function<ClaimRecord(double)> f) {
  return {std::move(id), sample_q, [f](double q, double) { return f(q); }, std::nullopt};
}

Matrix wheel_display(double q) {
  const double a = 2 * q * q + 1;
  const double h = 3 * q * q + 1;
  const double m = -q;
  Matrix w(5, 5);
  const double rows[5][5] = {{a, m, m, 0, m},
                             {m, a, 0, m, m},
                             {m, 0, a, m, m},
                             {0, m, m, a, m},
                             {m, m, m, m, h}};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) w(i, j) = rows[i][j];
  return w;
}

std::set<std::pair<std::size_t, std::size_t>> edge_set(const WeightedGraph& g) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  for (const Edge& e : g.edges()) s.insert(std::minmax(e.u, e.v));
  return s;
}

Matrix p2_block(double diag, double q) {
  Matrix m = Matrix::identity(2) * diag;
  m(0, 1) = m(1, 0) = -q;
  return m;
}

ClaimSpec pst(std::string id, std::string family, ParamMap params, std::string x, std::string y,
              std::string time, MatrixKind kind = MatrixKind::QLaplacian,
              std::optional<double> fixed_q = std::nullopt) {
  ClaimSpec s;
  s.id = std::move(id);
  s.family = std::move(family);
  s.params = std::move(params);
  s.claim = {std::move(x), std::move(y), std::move(time), kind, fixed_q};
  return s;
}

ClaimSpec attached(ClaimSpec s, std::string family, ParamMap params, std::string at) {
  s.attach_family = std::move(family);
  s.attach_params = std::move(params);
  s.attach_at = std::move(at);
  return s;
}

ClaimSpec no_pst(ClaimSpec s, double horizon) {
  s.expect = Expectation::NoPst;
  s.horizon = horizon;
  return s;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ClaimRecord run_claim(const ClaimSpec& spec, double q, double tol) {
  ClaimRecord r;
  r.id = spec.id;
  const FamilyInstance f = spec.build(q);
  if (spec.expect == Expectation::Pst) {
    const ClaimCheck c = check_claim(f.graph, spec.claim, q);
    r.q = c.q;
    r.time = c.time;
    r.fidelity = c.report.fidelity;
    r.residual = c.report.residual;
    r.status = c.report.fidelity >= 1.0 - tol ? ClaimStatus::Verified : ClaimStatus::Failed;
    r.detail = to_string(c.report.verdict);
    return r;
  }
  r.q = spec.claim.fixed_q ? *spec.claim.fixed_q : effective_q(spec.claim.kind, q);
  const SpectralDecomposition d = eigendecompose(graph_matrix(f.graph, spec.claim.kind, r.q));
  const PureState x = parse_state(spec.claim.x, f.graph.order());
  const PureState y = parse_state(spec.claim.y, f.graph.order());
  SearchOptions opts;
  opts.pst_tol = tol;
  const auto hits = search_pst(d, x, y, spec.horizon, opts);
  const PgstScan scan = pgst_heuristic(d, x, y, spec.horizon);
  r.time = spec.horizon;
  r.fidelity = scan.best.fidelity;
  r.residual = 1.0 - scan.best.fidelity;
  r.status = hits.empty() ? ClaimStatus::Verified : ClaimStatus::Failed;
  r.detail = hits.empty() ? "no PST on horizon" : "PST found at " + num(hits.front().time);
  return r;
}

std::vector<CorpusEntry> structural_entries() {
  std::vector<CorpusEntry> out;

  out.push_back(check("fig1-wheel-edges", false, [](double q) {
    const FamilyInstance w = wheel(5);
    const std::set<std::pair<std::size_t, std::size_t>> expected = {
        {0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 4}, {1, 4}, {2, 4}, {3, 4}};
    return boolean(q, edge_set(w.graph) == expected && w.markers.at("hub") == 4);
  }));
  out.push_back(check("fig1-wheel-degrees", false, [](double q) {
    const Matrix d = degree_matrix(wheel(5).graph);
    const double want[5] = {3, 3, 3, 3, 4};
    return structural(q, max_abs_diff(d, Matrix::diagonal(want)));
  }));
  out.push_back(check("fig1-wheel-matrix", true, [](double q) {
    return structural(q, max_abs_diff(q_laplacian(wheel(5).graph, QParameter(q)), wheel_display(q)),
                      1e-14);
  }));
  out.push_back(check("fig1-wheel-involution", true, [](double q) {
    const WeightedGraph g = wheel(5).graph;
    const std::vector<std::size_t> perm = {2, 3, 0, 1, 4};
    const Involution inv = verify_involution(g, perm);
    const bool fixed_ok = inv.fixed().size() == 1 && inv.fixed()[0] == 4;
    const double res = max_abs_diff(half_blocks(g, inv, QParameter(q)).reassemble(inv), wheel_display(q));
    return fixed_ok ? structural(q, res, 1e-14) : boolean(q, false, "fixed set");
  }));
  out.push_back(check("fig2i-involution", false, [](double q) {
    const FamilyInstance f = cycle_with_tail(6, 3);
    const auto& m = f.markers;
    std::vector<std::size_t> perm(f.graph.order());
    for (std::size_t v = 0; v < perm.size(); ++v) perm[v] = v;
    std::swap(perm[m.at("a")], perm[m.at("c")]);
    std::swap(perm[m.at("b")], perm[m.at("d")]);
    const Involution inv = verify_involution(f.graph, perm);
    const std::vector<std::size_t> fixed(inv.fixed().begin(), inv.fixed().end());
    return boolean(q, fixed == std::vector<std::size_t>{0, 3, 6, 7, 8} && inv == *f.involution);
  }));
  out.push_back(check("fig2i-minus-block", true, [](double q) {
    const FamilyInstance f = cycle_with_tail(6, 2);
    const HalfBlocks b = half_blocks(f.graph, *f.involution, QParameter(q));
    return structural(q, std::max(max_abs_diff(b.Lminus, p2_block(1 + q * q, q)), b.Aphi.max_abs()),
                      1e-14);
  }));
  out.push_back(check("fig2i-lift", false, [](double q) {
    const FamilyInstance f = cycle_with_tail(6, 2);
    const Involution& inv = *f.involution;
    const std::size_t a = f.markers.at("a");
    std::vector<double> e(inv.half().size(), 0.0);
    e[std::find(inv.half().begin(), inv.half().end(), a) - inv.half().begin()] = 1.0;
    const PureState s = lift_state(inv, e, Sector::Minus);
    const PureState want = PureState::pair(f.graph.order(), a, f.markers.at("c"));
    double res = 0.0;
    for (std::size_t i = 0; i < s.dimension(); ++i)
      res = std::max(res, std::abs(s.vector()[i] - want.vector()[i]));
    return structural(q, res);
  }));
  out.push_back(check("fig2i-witness", true, [](double q) {
    const FamilyInstance f = cycle_with_tail(6, 2);
    const double t = kPi / (2 * q);
    const auto ws = reduce_pair_pst(f.graph, *f.involution, QParameter(q), std::abs(t) + 0.5);
    const std::string x = PureState::pair(f.graph.order(), 1, 5).label();
    const std::string y = PureState::pair(f.graph.order(), 2, 4).label();
    for (const auto& w : ws)
      if (w.x.label() == x && w.y.label() == y && std::abs(w.time - std::abs(t)) < 1e-6) {
        ClaimRecord r = structural(q, 1.0 - w.fidelity, 1e-9);
        r.time = w.time;
        r.fidelity = w.fidelity;
        return r;
      }
    return boolean(q, false, "witness missing");
  }));
  out.push_back(check("fig3i-structure", false, [](double q) {
    const FamilyInstance f = kmn_minus_matching(3, 3, 2, false);
    const auto e = edge_set(f.graph);
    // 1-based labels {1,2} and {3,4} are the removed matching
    return boolean(q, e.size() == 7 && !e.count({0, 1}) && !e.count({2, 3}));
  }));
  out.push_back(check("fig3ii-structure", false, [](double q) {
    const FamilyInstance f = kmn_minus_matching(4, 3, 2, true);
    const auto e = edge_set(f.graph);
    return boolean(q, e.size() == 12 && !e.count({0, 1}) && !e.count({2, 3}) && e.count({0, 6}) &&
                          e.count({2, 6}));
  }));
  out.push_back(check("kmm-minus-block", true, [](double q) {
    double res = 0.0;
    for (auto [m, k] : {std::pair<std::size_t, std::size_t>{3, 2}, {4, 2}, {4, 3}, {5, 4}}) {
      const FamilyInstance f = kmn_minus_matching(m, m, k, false);
      const Involution inv = f.involution->with_half_choice({f.markers.at("a"), f.markers.at("d")});
      const HalfBlocks b = half_blocks(f.graph, inv, QParameter(q));
      const double md = static_cast<double>(m);
      const Matrix want = p2_block(1 + (md - 2) * q * q, q);
      res = std::max(res, max_abs_diff(b.Lminus, want));
    }
    return structural(q, res, 1e-13);
  }));
  out.push_back(check("chord-c3-structure", false, [](double q) {
    const WeightedGraph g = cycle_plus_chord(3, 1, 2.0).graph;
    return boolean(q, g.edges().size() == 3 && g.weight(0, 1) == 3.0 && g.weight(1, 2) == 1.0 &&
                          g.weight(0, 2) == 1.0);
  }));
  out.push_back(check("chord-c4-diagonal", false, [](double q) {
    const WeightedGraph g = cycle_plus_chord(4, 2, 1.0).graph;
    return boolean(q, g.edges().size() == 5 && g.weight(0, 2) == 1.0 && !g.has_edge(1, 3));
  }));
  out.push_back(check("path-p5-potentials", false, [](double q) {
    return boolean(q, path_with_end_potentials(5, 1, 1).graph.potentials() ==
                          std::vector<double>{1, 0, 0, 0, 1});
  }));
  out.push_back(check("path-p4-potentials", false, [](double) {
    const double q = 1.0;
    const double w = 1 + 1 / q;
    return boolean(q, path_with_end_potentials(4, w, w).graph.potentials() ==
                          std::vector<double>{2, 0, 0, 2});
  }));
  out.push_back(check("p3-params", false, [](double) {
    const P3Parameters a = p3_pst_parameters(2, 1);
    const P3Parameters b = p3_pst_parameters(4, 1);
    const double res = std::max({std::abs(a.q - std::sqrt(8.0 / 3.0)), std::abs(a.tau - 3 * kPi / 4),
                                 std::abs(b.q - std::sqrt(8.0 / 15.0)), std::abs(b.tau - 15 * kPi / 4)});
    return structural(1.0, res, 1e-14);
  }));
  for (std::size_t n : {4, 5, 7}) {
    out.push_back(check("pn-minus-lift-" + std::to_string(n), true, [n](double q) {
      const std::size_t k = n / 2;
      const double w = n == 4 ? 1 + 1 / q : 1.0;
      const FamilyInstance f = path_with_end_potentials(n, w, w);
      const Matrix lm = pn_omega_half_blocks(n, w, q);
      const double block_res =
          max_abs_diff(lm, half_blocks(f.graph, *f.involution, QParameter(q)).Lminus);
      const double t = n == 7 ? kPi / (q * std::sqrt(2.0)) : kPi / (2 * q);
      const TransferReport r = detect_pst(eigendecompose(lm), PureState::vertex(k, 0),
                                          PureState::vertex(k, k - 1), t);
      std::vector<double> e0(k, 0.0), e1(k, 0.0);
      e0[0] = 1.0;
      e1[k - 1] = 1.0;
      const bool lift_ok =
          lift_state(*f.involution, e0, Sector::Minus).label() == f.claims.at(0).x &&
          lift_state(*f.involution, e1, Sector::Minus).label() == f.claims.at(0).y;
      ClaimRecord rec = structural(q, std::max(block_res, r.residual), 1e-9,
                                   lift_ok ? "" : "lift mismatch");
      if (!lift_ok) rec.status = ClaimStatus::Failed;
      rec.time = t;
      rec.fidelity = r.fidelity;
      return rec;
    }));
  }
  out.push_back(check("search-c6-two-edges", false, [](double) {
    PerturbationSearchOptions o;
    o.num_edges = 2;
    o.kind = MatrixKind::Laplacian;
    o.t_max = 10.0;
    const auto ws = perturbation_search(cycle_graph(6), o);
    double worst = ws.empty() ? 1.0 : 0.0;
    for (const auto& w : ws) worst = std::max(worst, 1.0 - w.fidelity);
    ClaimRecord r = structural(1.0, worst, 1e-9, std::to_string(ws.size()) + " witnesses");
    if (!ws.empty()) r.time = ws.front().time;
    return r;
  }));
  out.push_back(check("search-c8-four-edges", false, [](double) {
    PerturbationSearchOptions o;
    o.num_edges = 4;
    o.q = 0.5;
    o.t_max = 10.0;
    const auto ws = perturbation_search(cycle_graph(8), o);
    double worst = ws.empty() ? 1.0 : 0.0;
    for (const auto& w : ws) worst = std::max(worst, 1.0 - w.fidelity);
    ClaimRecord r = structural(0.5, worst, 1e-9, std::to_string(ws.size()) + " witnesses");
    if (!ws.empty()) r.time = ws.front().time;
    return r;
  }));
  return out;
}

std::vector<ClaimSpec> transfer_claims() {
  using MK = MatrixKind;
  std::vector<ClaimSpec> s;
  s.push_back(pst("p2-vertex", "path", {{"n", "2"}}, "v:0", "v:1", "pi/(2q)"));
  s.push_back(pst("kmm-minus-m3", "kmn-minus-matching", {{"m", "3"}, {"n", "3"}, {"k", "3"}},
                  "pair:0,2", "pair:1,3", "pi/(2q)"));
  s.push_back(pst("fig3i", "kmn-minus-matching", {{"m", "3"}, {"n", "3"}, {"k", "2"}}, "pair:0,2",
                  "pair:1,3", "pi/(2q)"));
  s.push_back(pst("fig3ii", "kmn-minus-matching",
                  {{"m", "4"}, {"n", "3"}, {"k", "2"}, {"add-e", "1"}}, "pair:0,2", "pair:1,3",
                  "pi/(2q)"));
  for (const char* tail : {"1", "3", "5"})
    s.push_back(pst(std::string("fig2i-tail") + tail, "cycle-with-tail", {{"cycle", "6"}, {"tail", tail}},
                    "pair:1,5", "pair:2,4", "pi/(2q)"));
  s.push_back(pst("fig2ii-tail1", "cycle-with-tail", {{"cycle", "8"}, {"tail", "1"}}, "pair:1,7",
                  "pair:3,5", "pi/(q*sqrt(2))"));
  for (const char* rho : {"1", "2", "3"})
    s.push_back(pst(std::string("chord-c3-rho") + rho, "cycle-plus-chord",
                    {{"n", "3"}, {"b", "1"}, {"rho", rho}}, "pair:0,2", "pair:1,2",
                    std::string("pi/(2*") + rho + ")", MK::Laplacian));
  s.push_back(pst("chord-c4-b1", "cycle-plus-chord", {{"n", "4"}, {"b", "1"}, {"rho", "1"}},
                  "pair:0,1", "pair:2,3", "pi/2", MK::Signless));
  s.push_back(pst("chord-c4-b2-rho1", "cycle-plus-chord", {{"n", "4"}, {"b", "2"}, {"rho", "1"}},
                  "pair:0,1", "pair:0,3", "pi/2", MK::Laplacian));
  s.push_back(pst("chord-c4-b2-rho2", "cycle-plus-chord", {{"n", "4"}, {"b", "2"}, {"rho", "2"}},
                  "pair:0,1", "pair:2,3", "pi/2", MK::Laplacian));
  s.push_back(pst("c5-potential", "c5-potential", {}, "pair:1,4", "pair:2,3", "pi/2", MK::Laplacian));
  s.push_back(no_pst(pst("c5-plain-no-pst", "cycle", {{"n", "5"}}, "pair:1,4", "pair:2,3", "10",
                         MK::Laplacian),
                     10.0));
  s.push_back(pst("path-p3-1", "path-potentials", {{"n", "3"}, {"w", "1"}}, "pair:0,1", "pair:1,2",
                  "pi/(q*sqrt(2))"));
  s.push_back(pst("path-p4-shifted", "path-potentials", {{"n", "4"}, {"w", "1+1/q"}}, "pair:0,3",
                  "pair:1,2", "pi/(2q)"));
  s.push_back(pst("path-p5-1", "path-potentials", {{"n", "5"}, {"w", "1"}}, "pair:0,4", "pair:1,3",
                  "pi/(2q)"));
  s.push_back(pst("path-p7-1", "path-potentials", {{"n", "7"}, {"w", "1"}}, "pair:0,6", "pair:2,4",
                  "pi/(q*sqrt(2))"));
  s.push_back(no_pst(pst("path-p4-lap-no-vertex-pst", "path", {{"n", "4"}}, "v:0", "v:3", "20",
                         MK::Laplacian),
                     20.0));
  for (const char* n : {"6", "7", "8"}) {
    const std::size_t nn = std::stoul(n);
    s.push_back(pst(std::string("ppte-") + n, "path-plus-two-edges", {{"n", n}},
                    "pair:0," + std::to_string(nn - 1), "pair:1," + std::to_string(nn - 2), "pi/(2q)"));
  }
  const ClaimSpec p5 =
      pst("", "path-potentials", {{"n", "5"}, {"w", "1"}}, "pair:0,4", "pair:1,3", "pi/(2q)");
  ClaimSpec star = attached(p5, "complete-bipartite", {{"m", "1"}, {"n", "3"}}, "3");
  star.id = "attach-p5-star";
  s.push_back(star);
  ClaimSpec tail = attached(p5, "path", {{"n", "4"}}, "3");
  tail.id = "attach-p5-path4";
  s.push_back(tail);
  for (auto [k, l] : {std::pair<long, long>{2, 1}, {4, 1}, {3, 2}}) {
    const P3Parameters p = p3_pst_parameters(k, l);
    s.push_back(pst("p3-vertex-" + std::to_string(k) + "-" + std::to_string(l), "path", {{"n", "3"}},
                    "v:0", "v:2", num(p.tau), MK::QLaplacian, p.q));
  }
  return s;
}

}  // namespace

std::string to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::Verified: return "verified";
    case ClaimStatus::Failed: return "failed";
    case ClaimStatus::Skipped: return "skipped";
  }
  return "?";
}

FamilyInstance ClaimSpec::build(double q) const {
  FamilyInstance f = build_family(family, params, q);
  if (attach_family) f = attach_graph(f, build_family(*attach_family, attach_params, q).graph, attach_at);
  return f;
}

CorpusEntry claim_entry(ClaimSpec spec) {
  CorpusEntry e;
  e.id = spec.id;
  e.sample_q = spec.claim.kind == MatrixKind::QLaplacian && !spec.claim.fixed_q;
  e.run = [spec](double q, double tol) { return run_claim(spec, q, tol); };
  e.spec = std::move(spec);
  return e;
}

std::vector<CorpusEntry> default_corpus() {
  std::vector<CorpusEntry> out;
  for (ClaimSpec& s : transfer_claims()) out.push_back(claim_entry(std::move(s)));
  for (CorpusEntry& e : structural_entries()) out.push_back(std::move(e));
  return out;
}

std::vector<CorpusEntry> load_claims(const json& j) {
  std::vector<CorpusEntry> out;
  auto params_of = [](const json& p) {
    ParamMap m;
    for (const auto& [k, v] : p.items()) m[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return m;
  };
  for (const json& c : j.at("claims")) {
    ClaimSpec s;
    s.id = c.at("id").get<std::string>();
    s.family = c.at("family").get<std::string>();
    s.params = params_of(c.value("params", json::object()));
    if (c.contains("attach")) {
      const json& a = c.at("attach");
      s.attach_family = a.at("family").get<std::string>();
      s.attach_params = params_of(a.value("params", json::object()));
      s.attach_at = a.at("at").get<std::string>();
    }
    s.claim = claim_from_json(c);
    const std::string expect = c.value("expect", std::string("pst"));
    if (expect == "no-pst")
      s.expect = Expectation::NoPst;
    else if (expect != "pst")
      throw std::invalid_argument("claim '" + s.id + "': expect must be 'pst' or 'no-pst'");
    s.horizon = c.value("horizon", 10.0);
    out.push_back(claim_entry(std::move(s)));
  }
  return out;
}

std::vector<ClaimRecord> run_corpus(const std::vector<CorpusEntry>& entries,
                                    const CorpusOptions& opts) {
  auto selected = [&](const std::string& id) {
    if (opts.only.empty()) return true;
    return std::any_of(opts.only.begin(), opts.only.end(),
                       [&](const std::string& p) { return id.rfind(p, 0) == 0; });
  };
  std::vector<std::pair<const CorpusEntry*, double>> jobs;
  for (const CorpusEntry& e : entries) {
    if (!selected(e.id)) continue;
    if (e.sample_q)
      for (double q : opts.q_samples) jobs.emplace_back(&e, q);
    else
      jobs.emplace_back(&e, 1.0);
  }
  std::vector<ClaimRecord> records(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& [entry, q] = jobs[i];
    try {
      records[i] = entry->run(q, opts.tol);
    } catch (const std::exception& ex) {
      records[i].q = q;
      records[i].status = ClaimStatus::Failed;
      records[i].residual = 1.0;
      records[i].detail = ex.what();
    }
    records[i].id = entry->id;
  });
  return records;
}

std::string corpus_csv(const std::vector<ClaimRecord>& records) {
  std::string out = "id,q,time,fidelity,residual,status\n";
  char buf[256];
  for (const ClaimRecord& r : records) {
    std::snprintf(buf, sizeof buf, ",%.12e,%.12e,%.12e,%.12e,", r.q, r.time, r.fidelity, r.residual);
    out += r.id + buf + to_string(r.status) + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, FamilyInstance>> corpus_instances(
    const std::vector<CorpusEntry>& entries, double q) {
  std::vector<std::pair<std::string, FamilyInstance>> out;
  for (const CorpusEntry& e : entries)
    if (e.spec) out.emplace_back(e.id, e.spec->build(q));
  return out;
}

}  // namespace qwalk
