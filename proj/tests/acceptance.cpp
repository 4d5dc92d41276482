// Prints one [PASS]/[FAIL] line per acceptance criterion; exits 1 if any fail.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qwalk/closed_forms.hpp"
#include "qwalk/corpus.hpp"
#include "qwalk/families.hpp"
#include "qwalk/involution.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/transfer.hpp"

using namespace qwalk;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> seeded_times(std::uint64_t seed, std::size_t count, double t_max = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, t_max);
  std::vector<double> t(count);
  for (double& x : t) x = d(rng);
  return t;
}

/// Every family graph of the corpus at q, plus the wheel, each with its
/// canonical involution.
std::vector<std::pair<std::string, FamilyInstance>> corpus_graphs(double q) {
  std::vector<std::pair<std::string, FamilyInstance>> out{{"fig1-wheel", wheel(5)}};
  for (auto& [id, f] : corpus_instances(default_corpus(), q))
    if (f.involution) out.emplace_back(id, std::move(f));
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QWALK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fixture(const std::string& name) { return std::string(QWALK_FIXTURE_DIR) + "/" + name; }

Outcome wheel_matrix() {
  double worst = 0.0;
  for (double q : {1.0, -1.0, 0.5, 2.0}) {
    const double a = 2 * q * q + 1;
    const double h = 3 * q * q + 1;
    const double m = -q;
    const double rows[5][5] = {{a, m, m, 0, m},
                               {m, a, 0, m, m},
                               {m, 0, a, m, m},
                               {0, m, m, a, m},
                               {m, m, m, m, h}};
    const Matrix l = q_laplacian(wheel(5).graph, QParameter(q));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) worst = std::max(worst, std::abs(l(i, j) - rows[i][j]));
  }
  return {worst <= 1e-14, "max entry difference " + fmt("%.2e", worst)};
}

Outcome block_diagonalization() {
  const auto times = seeded_times(42, 20);
  double worst = 0.0;
  std::size_t count = 0;
  for (double q : {1.0, -1.0, 0.5})
    for (const auto& [id, f] : corpus_graphs(q)) {
      worst = std::max(worst, verify_block_diagonalization(f.graph, *f.involution, QParameter(q), times));
      ++count;
    }
  return {count > 0 && worst <= 1e-10,
          std::to_string(count) + " graph/q cases, max residual " + fmt("%.2e", worst)};
}

Outcome spectrum_factorization() {
  std::size_t count = 0;
  std::size_t failed = 0;
  for (double q : {1.0, -1.0, 0.5})
    for (const auto& [id, f] : corpus_graphs(q)) {
      ++count;
      if (!spectrum_factorization_check(f.graph, *f.involution, QParameter(q), 1e-8)) ++failed;
    }
  return {count > 0 && failed == 0, std::to_string(count - failed) + "/" + std::to_string(count) + " cases"};
}

Outcome pst_reproductions() {
  const std::set<std::string> ids{
      "fig2i-tail1",    "fig2i-tail3",     "fig2i-tail5",   "fig2ii-tail1",     "fig3i",
      "fig3ii",         "c5-potential",    "chord-c3-rho1", "chord-c3-rho2",    "chord-c3-rho3",
      "chord-c4-b1",    "chord-c4-b2-rho1", "chord-c4-b2-rho2", "path-p3-1",     "path-p4-shifted",
      "path-p5-1",      "path-p7-1",       "ppte-6",        "ppte-7",           "ppte-8",
      "p2-vertex",      "p3-vertex-2-1",   "p3-vertex-4-1", "p3-vertex-3-2"};
  std::vector<CorpusEntry> entries;
  for (auto& e : default_corpus())
    if (ids.count(e.id)) entries.push_back(std::move(e));
  if (entries.size() != ids.size()) return {false, "corpus is missing claims"};
  CorpusOptions opts;
  opts.q_samples = {1.0, -1.0, 0.5};
  opts.tol = 1e-9;
  std::size_t ok = 0;
  double worst = 0.0;
  std::string first_failure;
  const auto records = run_corpus(entries, opts);
  for (const auto& r : records) {
    if (r.status == ClaimStatus::Verified && r.fidelity >= 1.0 - 1e-9)
      ++ok;
    else if (first_failure.empty())
      first_failure = " first failure " + r.id;
    worst = std::max(worst, 1.0 - r.fidelity);
  }
  return {ok == records.size(), std::to_string(ok) + "/" + std::to_string(records.size()) +
                                    " claim checks, worst 1-fidelity " + fmt("%.2e", worst) + first_failure};
}

Outcome nonexistence_preconditions() {
  bool ok = true;
  double worst_lap = 0.0;
  for (std::size_t n = 15; n <= 24; ++n) {
    const double gap = 4 * std::abs(std::sin(5 * pi / n) * std::sin(pi / n));
    const auto r = nonexistence_witness(n, 2, 1.0, kLaplacianZeta);
    ok = ok && gap < 1.0 && r.gap_below_one && std::abs(r.gap_closed_form - gap) <= 1e-12;
    worst_lap = std::max(worst_lap, gap);
  }
  double worst_sig = 0.0;
  for (std::size_t n = 22; n <= 30; ++n) {
    const double theta2 = cycle_eigenpair(n, 2, kSignlessZeta).theta;
    const double theta4 = cycle_eigenpair(n, 4, kSignlessZeta).theta;
    const auto r = nonexistence_witness(n, 3, 1.0, kSignlessZeta);
    ok = ok && std::abs(theta4 - theta2) < 1.0 && r.gap_below_one;
    worst_sig = std::max(worst_sig, std::abs(theta4 - theta2));
  }
  std::size_t zero_checks = 0;
  double worst_entry = 0.0;
  for (std::size_t n = 7; n <= 24; ++n)
    for (std::size_t b = 1; b < n; ++b)
      for (Zeta z : {kLaplacianZeta, kSignlessZeta})
        if (const auto c = vertex_pst_candidates(n, b, z)) {
          const auto v = perturbed_eigvec(n, b, 1, z).z;
          worst_entry = std::max({worst_entry, std::abs(v[c->first]), std::abs(v[c->second])});
          ++zero_checks;
        }
  ok = ok && zero_checks > 0 && worst_entry <= 1e-10;
  return {ok, "max Laplacian gap " + fmt("%.4f", worst_lap) + ", max signless gap " + fmt("%.4f", worst_sig) + ", " +
                  std::to_string(zero_checks) + " candidate zero checks (max " + fmt("%.1e", worst_entry) + ")"};
}

Outcome closed_form_residuals() {
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 3; n <= 24; ++n)
    for (Zeta z : {kLaplacianZeta, kSignlessZeta}) {
      const Matrix m = graph_matrix(cycle_graph(n), z.kind(), 1.0);
      for (std::size_t j = 0; j <= n / 2; ++j) {
        const auto p = cycle_eigenpair(n, j, z);
        worst = std::max(worst, eigen_residual(m, p.v, p.theta));
        if (p.w) worst = std::max(worst, eigen_residual(m, *p.w, p.theta));
        ++count;
      }
    }
  for (std::size_t n = 3; n <= 16; ++n)
    for (std::size_t b = 1; b < n; ++b)
      for (Zeta z : {kLaplacianZeta, kSignlessZeta})
        for (double rho : {1.0, 2.0, 5.0}) {
          const Matrix m = perturbed_cycle_matrix(n, b, rho, z);
          for (std::size_t j = 1; 2 * j < n; ++j) {
            const auto p = perturbed_eigvec(n, b, j, z);
            worst = std::max(worst, eigen_residual(m, p.z, cycle_eigenpair(n, j, z).theta));
            ++count;
          }
        }
  return {worst <= 1e-9, std::to_string(count) + " eigenpairs, max residual " + fmt("%.2e", worst)};
}

Outcome equivalence() {
  const auto times = seeded_times(42, 20);
  double worst = 0.0;
  for (std::size_t n = 2; n <= 8; ++n)
    for (double omega : {-1.0, 0.0, 0.7, 1.0, 2.0})
      for (double q : {-1.0, 0.5, 1.0, 1.3})
        worst = std::max(worst, path_potential_equivalence(n, omega, q, times));
  return {worst <= 1e-10, "max discrepancy " + fmt("%.2e", worst)};
}

Outcome properties() {
  std::map<std::string, std::size_t> failures;
  std::size_t checks = 0;
  auto expect = [&](bool ok, const char* what) {
    ++checks;
    if (!ok) ++failures[what];
  };
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> td(-10.0, 10.0);

  for (double q : {1.0, -1.0, 0.5})
    for (const auto& [id, f] : corpus_graphs(q)) {
      const Matrix m = q_laplacian(f.graph, QParameter(q));
      const auto d = eigendecompose(m);
      const std::size_t n = d.order();
      Matrix sum(n, n);
      for (std::size_t j = 0; j < d.distinct(); ++j) {
        sum += d.projector(j);
        for (std::size_t k = 0; k < d.distinct(); ++k) {
          const Matrix prod = d.projector(j) * d.projector(k);
          expect(max_abs_diff(prod, j == k ? d.projector(j) : Matrix(n, n)) <= 1e-9, "projector orthogonality");
        }
      }
      expect(max_abs_diff(sum, Matrix::identity(n)) <= 1e-10, "projector completeness");
      expect(max_abs_diff(d.reconstruct(), m) <= 1e-9, "reconstruction");
      for (int i = 0; i < 3; ++i) {
        const double t = td(rng);
        const double s = td(rng);
        const ComplexMatrix u = transition_matrix(d, t);
        expect(max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(n)) <= 1e-10, "unitarity");
        expect(max_abs_diff(transition_matrix(d, t + s), u * transition_matrix(d, s)) <= 1e-9, "group property");
      }
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          if (!are_twins(f.graph, a, b)) continue;
          const PureState x = PureState::pair(n, a, b);
          const auto lx = m * x.vector();
          double rq = 0.0;
          for (std::size_t i = 0; i < n; ++i) rq += lx[i] * x.vector()[i];
          double res = 0.0;
          for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(lx[i] - rq * x.vector()[i]));
          expect(res <= 1e-10, "twin eigenvector");
        }
    }

  std::uniform_real_distribution<double> rd(0.1, 3.0);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + trial % 9;
    Matrix b(n, n), c(n, n);
    std::vector<double> w(n);
    for (double& x : w) x = nd(rng);
    const double rho = rd(rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        b(i, j) = b(j, i) = nd(rng);
        c(i, j) = c(j, i) = rho * w[i] * w[j];
      }
    expect(interlacing_check(b, c), "interlacing");
  }

  // Strong cospectrality and monogamy for every transfer found by the
  // exhaustive pair search on corpus graphs, and for all corpus claims.
  for (const auto& [id, f] : corpus_graphs(1.0)) {
    if (f.graph.order() > 10) continue;
    const auto d = eigendecompose(q_laplacian(f.graph, QParameter(1.0)));
    const auto found = find_pair_pst(d, 6.0);
    std::map<std::string, std::string> partner;
    for (const auto& p : found) {
      expect(is_strongly_cospectral(d, p.x, p.y), "PST implies strong cospectrality");
      auto [it, fresh] = partner.emplace(p.x.label(), p.y.label());
      expect(fresh || it->second == p.y.label(), "monogamy");
    }
  }
  for (double q : {1.0, -1.0, 0.5})
    for (const auto& [id, f] : corpus_instances(default_corpus(), q))
      for (const Claim& c : f.claims) {
        const double qq = c.fixed_q ? *c.fixed_q : effective_q(c.kind, q);
        const auto d = eigendecompose(graph_matrix(f.graph, c.kind, qq));
        const auto x = parse_state(c.x, f.graph.order());
        const auto y = parse_state(c.y, f.graph.order());
        expect(is_strongly_cospectral(d, x, y), "PST implies strong cospectrality");
      }

  std::string detail = std::to_string(checks) + " checks";
  for (const auto& [what, k] : failures) detail += ", " + std::to_string(k) + " " + what + " failures";
  return {failures.empty(), detail};
}

Outcome constructive_search() {
  PerturbationSearchOptions lap;
  lap.num_edges = 2;
  lap.kind = MatrixKind::Laplacian;
  const auto c6 = perturbation_search(cycle_graph(6), lap);
  PerturbationSearchOptions ql;
  ql.num_edges = 4;
  ql.kind = MatrixKind::QLaplacian;
  ql.q = 0.5;
  const auto c8 = perturbation_search(cycle_graph(8), ql);
  auto verified = [](const WeightedGraph& base, const std::vector<PerturbationWitness>& ws) {
    std::size_t ok = 0;
    for (const auto& w : ws) {
      const WeightedGraph g = apply_witness(base, w);
      const auto d = eigendecompose(graph_matrix(g, w.kind, w.q));
      if (w.edges.size() > 0 && detect_pst(d, w.x, w.y, w.time).fidelity >= 1.0 - 1e-9) ++ok;
    }
    return ok;
  };
  const std::size_t ok6 = verified(cycle_graph(6), c6);
  const std::size_t ok8 = verified(cycle_graph(8), c8);
  return {ok6 >= 1 && ok6 == c6.size() && ok8 >= 1 && ok8 == c8.size(),
          "C6 two edges: " + std::to_string(ok6) + " witnesses, C8 four edges at q=1/2: " + std::to_string(ok8) +
              " witnesses"};
}

Outcome negative_controls() {
  const int inv = run_cli("involutions " + fixture("wheel5.json") + " --involution " +
                          fixture("corrupted_involution.json"));
  const int claim = run_cli("corpus --claims " + fixture("corrupted_claim.json"));
  const int good = run_cli("involutions " + fixture("wheel5.json") + " --involution " +
                           fixture("wheel5_involution.json"));
  return {inv != 0 && claim != 0 && good == 0, "corrupted involution exit " + std::to_string(inv) +
                                                   ", corrupted claim exit " + std::to_string(claim) +
                                                   ", intact involution exit " + std::to_string(good)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"wheel q-Laplacian equals the displayed block matrix", wheel_matrix},
      {"block diagonalization of U(t) on the corpus", block_diagonalization},
      {"spectrum factorization on the corpus", spectrum_factorization},
      {"state transfer reproductions", pst_reproductions},
      {"nonexistence preconditions", nonexistence_preconditions},
      {"closed-form eigenpairs against numerics", closed_form_residuals},
      {"path potential equivalence", equivalence},
      {"property suites", properties},
      {"constructive edge-insertion search", constructive_search},
      {"negative controls", negative_controls},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
