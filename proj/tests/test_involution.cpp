#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "oracle.hpp"
#include "qwalk/families.hpp"
#include "qwalk/involution.hpp"
#include "qwalk/spectral.hpp"

using namespace qwalk;

namespace {

const double pi = std::numbers::pi;

std::vector<double> seeded_times(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 10.0);
  std::vector<double> t(count);
  for (double& x : t) x = d(rng);
  return t;
}

/// Every order-2 automorphism by running through all permutations.
std::set<std::vector<std::size_t>> brute_force_involutions(const WeightedGraph& g) {
  const std::size_t n = g.order();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::set<std::vector<std::size_t>> out;
  do {
    bool ok = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (p[p[v]] != v) goto next;
      if (p[v] != v) ok = true;
      if (g.potential(v) != g.potential(p[v])) goto next;
      for (std::size_t u = 0; u < n; ++u)
        if (u != v && g.weight(u, v) != g.weight(p[u], p[v])) goto next;
    }
    if (ok) out.insert(p);
  next:;
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<FamilyInstance> corpus_like() {
  return {wheel(5),
          cycle_with_tail(6, 1),
          cycle_with_tail(6, 3),
          cycle_with_tail(8, 1),
          kmn_minus_matching(3, 3, 3, false),
          kmn_minus_matching(3, 3, 2, false),
          kmn_minus_matching(4, 3, 2, true),
          cycle_plus_chord(3, 1, 2.0),
          cycle_plus_chord(4, 2, 2.0),
          cycle_plus_chord(8, 4, 1.0),
          path_with_end_potentials(5, 1.0, 1.0),
          path_with_end_potentials(4, 2.0, 2.0),
          path_plus_two_edges(6),
          path_plus_two_edges(7),
          c5_with_potential()};
}

}  // namespace

TEST_CASE("verify_involution accepts the worked examples") {
  const WeightedGraph w = wheel(5).graph;
  const std::vector<std::size_t> perm{2, 3, 0, 1, 4};
  const Involution inv = verify_involution(w, perm);
  CHECK(std::vector<std::size_t>(inv.fixed().begin(), inv.fixed().end()) == std::vector<std::size_t>{4});
  CHECK(std::vector<std::size_t>(inv.half().begin(), inv.half().end()) == std::vector<std::size_t>{0, 1});
  CHECK(inv.mirror() == std::vector<std::size_t>{2, 3});

  const auto f = cycle_with_tail(6, 1);
  REQUIRE(f.involution);
  const auto& mk = f.markers;
  CHECK((*f.involution)(mk.at("a")) == mk.at("c"));
  CHECK((*f.involution)(mk.at("b")) == mk.at("d"));
  CHECK(f.involution->fixed().size() == f.graph.order() - 4);
}

TEST_CASE("verify_involution distinguishes failure modes") {
  const WeightedGraph w = wheel(5).graph;
  const std::vector<std::size_t> id{0, 1, 2, 3, 4};
  CHECK_THROWS_AS(verify_involution(w, id), TrivialInvolutionError);
  const std::vector<std::size_t> three_cycle{1, 2, 0, 3, 4};
  CHECK_THROWS_AS(verify_involution(w, three_cycle), NotOrderTwoError);
  const std::vector<std::size_t> dup{1, 1, 2, 3, 4};
  CHECK_THROWS_AS(verify_involution(w, dup), NotPermutationError);
  const std::vector<std::size_t> bad{1, 0, 2, 3, 4};
  CHECK_THROWS_AS(verify_involution(w, bad), NotAutomorphismError);
  WeightedGraph p = path_graph(3);
  p.set_potential(0, 1.0);
  const std::vector<std::size_t> flip{2, 1, 0};
  CHECK_THROWS_AS(verify_involution(p, flip), AsymmetricPotentialError);
}

TEST_CASE("find_involutions agrees with brute force") {
  CHECK(find_involutions(path_graph(3)).size() == 1);
  CHECK(find_involutions(cycle_graph(4)).size() == 5);
  CHECK(brute_force_involutions(cycle_graph(4)).size() == 5);
  WeightedGraph wp(4);
  wp.add_edge(0, 1, 1.0).add_edge(1, 2, 2.0).add_edge(2, 3, 3.0);
  CHECK(find_involutions(wp).empty());

  for (const auto& f : corpus_like()) {
    if (f.graph.order() > 9) continue;
    std::set<std::vector<std::size_t>> found;
    for (const auto& inv : find_involutions(f.graph))
      found.insert(std::vector<std::size_t>(inv.perm().begin(), inv.perm().end()));
    CHECK_MESSAGE(found == brute_force_involutions(f.graph), f.name);
  }
  CHECK_THROWS(find_involutions(cycle_graph(20)));
  InvolutionSearchOptions opts;
  opts.candidates = std::vector<std::vector<std::size_t>>{{1, 0, 2}, {2, 1, 0}};
  CHECK(find_involutions(path_graph(3), opts).size() == 1);
}

TEST_CASE("automorphism counts") {
  CHECK(find_automorphisms(cycle_graph(6)).size() == 12);
  CHECK(find_automorphisms(complete_bipartite(2, 3).graph).size() == 12);
  CHECK(find_automorphisms(wheel(5).graph).size() == 8);
}

TEST_CASE("half blocks reassemble the q-Laplacian") {
  for (const auto& f : corpus_like()) {
    REQUIRE_MESSAGE(f.involution, f.name);
    for (double q : {1.0, -1.0, 0.5, 1.7}) {
      const HalfBlocks hb = half_blocks(f.graph, *f.involution, QParameter(q));
      CHECK(max_abs_diff(hb.reassemble(*f.involution), q_laplacian(f.graph, QParameter(q))) <= 1e-14);
      CHECK(is_symmetric(hb.Lplus_sym));
      // Lplus = K Lplus_sym K^{-1}, K = diag(I, sqrt2 I).
      const std::size_t h = f.involution->half().size();
      Matrix lp = hb.Lplus_sym;
      for (std::size_t i = 0; i < lp.rows(); ++i)
        for (std::size_t j = 0; j < lp.cols(); ++j) {
          const double ki = i < h ? 1.0 : std::sqrt(2.0);
          const double kj = j < h ? 1.0 : std::sqrt(2.0);
          lp(i, j) *= ki / kj;
        }
      CHECK(max_abs_diff(lp, hb.Lplus) <= 1e-12);
    }
  }
}

TEST_CASE("half blocks of the worked examples") {
  const auto f = cycle_with_tail(6, 1);
  for (double q : {1.0, -1.0, 0.5}) {
    const HalfBlocks hb = half_blocks(f.graph, *f.involution, QParameter(q));
    CHECK(hb.Aphi.max_abs() == 0.0);
    Matrix expected = Matrix::identity(2) * (1 + q * q);
    expected(0, 1) = expected(1, 0) = -q;
    CHECK(max_abs_diff(hb.Lminus, expected) <= 1e-14);
  }
  for (std::size_t m : {3u, 4u, 5u}) {
    const auto k = kmn_minus_matching(m, m, 2, false);
    const auto& mk = k.markers;
    const Involution inv = k.involution->with_half_choice({mk.at("a"), mk.at("d")});
    for (double q : {1.0, -1.0, 0.5}) {
      const HalfBlocks hb = half_blocks(k.graph, inv, QParameter(q));
      Matrix expected = Matrix::identity(2) * (1 + (double(m) - 2) * q * q);
      expected(0, 1) = expected(1, 0) = -q;
      CHECK(max_abs_diff(hb.Lminus, expected) <= 1e-14);
    }
  }
  CHECK_THROWS(kmn_minus_matching(3, 3, 2, false).involution->with_half_choice({0, 2}));
}

TEST_CASE("basis matrix") {
  const double r = 1 / std::sqrt(2.0);
  const std::vector<std::size_t> swap{1, 0};
  const Matrix m2 = basis_matrix(verify_involution(path_graph(2), swap));
  CHECK(std::abs(m2(0, 0) - r) <= 1e-15);
  CHECK(std::abs(m2(1, 0) + r) <= 1e-15);
  CHECK(std::abs(m2(0, 1) - r) <= 1e-15);
  CHECK(std::abs(m2(1, 1) - r) <= 1e-15);

  const std::vector<std::size_t> flip{2, 1, 0};
  const Matrix m3 = basis_matrix(verify_involution(path_graph(3), flip));
  CHECK(std::abs(m3(0, 0) - r) <= 1e-15);
  CHECK(std::abs(m3(2, 0) + r) <= 1e-15);
  CHECK(std::abs(m3(2, 1) - r) <= 1e-15);
  CHECK(m3(1, 2) == 1.0);

  for (const auto& f : corpus_like()) {
    const Matrix m = basis_matrix(*f.involution);
    CHECK(max_abs_diff(m.transpose() * m, Matrix::identity(m.rows())) <= 1e-12);
  }
}

TEST_CASE("block diagonalization of the transition matrix") {
  const auto times = seeded_times(42, 20);
  for (const auto& f : corpus_like())
    for (double q : {1.0, -1.0, 0.5})
      CHECK_MESSAGE(verify_block_diagonalization(f.graph, *f.involution, QParameter(q), times) <= 1e-10, f.name);

  // A permutation that is not an automorphism breaks the block structure.
  const WeightedGraph w = wheel(5).graph;
  const Involution wrong = unchecked_involution({1, 0, 2, 3, 4});
  CHECK(verify_block_diagonalization(q_laplacian(w, QParameter(1.0)), wrong, times) > 1e-3);
}

TEST_CASE("spectrum factorization") {
  for (const auto& f : corpus_like())
    for (double q : {1.0, -1.0, 0.5})
      CHECK_MESSAGE(spectrum_factorization_check(f.graph, *f.involution, QParameter(q)), f.name);

  const WeightedGraph w = wheel(5).graph;
  const Involution inv = *wheel(5).involution;
  const Matrix l = q_laplacian(w, QParameter(1.0));
  HalfBlocks hb = half_blocks(l, inv);
  hb.Aphi(0, 0) += 0.5;
  const HalfBlocks corrupted = HalfBlocks::from_parts(hb.Lp, hb.Aphi, hb.AS, hb.LS);
  CHECK_FALSE(spectrum_factorization_check(l, corrupted));
}

TEST_CASE("minus-sector eigenvectors embed as [c, -c, 0]") {
  for (const auto& f : corpus_like()) {
    const Involution& inv = *f.involution;
    const double q = 0.7;
    const Matrix l = q_laplacian(f.graph, QParameter(q));
    const HalfBlocks hb = half_blocks(f.graph, inv, QParameter(q));
    const auto d = eigendecompose(hb.Lminus);
    const auto mirror = inv.mirror();
    for (std::size_t j = 0; j < d.distinct(); ++j) {
      const Matrix& proj = d.projector(j);
      for (std::size_t col = 0; col < proj.cols(); ++col) {
        std::vector<double> v(f.graph.order(), 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < inv.half().size(); ++i) {
          v[inv.half()[i]] = proj(i, col);
          v[mirror[i]] = -proj(i, col);
          norm += proj(i, col) * proj(i, col);
        }
        if (norm < 1e-6) continue;
        const auto lv = l * std::span<const double>(v);
        double res = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) res = std::max(res, std::abs(lv[i] - d.eigenvalue(j) * v[i]));
        CHECK(res <= 1e-9);
      }
    }
  }
}

TEST_CASE("U(t)(e_u - e_phi(u)) through the minus-sector projectors") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> td(0.0, 10.0);
  for (const auto& f : corpus_like()) {
    const Involution& inv = *f.involution;
    const double q = -0.6;
    const std::size_t n = f.graph.order();
    const auto d = eigendecompose(q_laplacian(f.graph, QParameter(q)));
    const HalfBlocks hb = half_blocks(f.graph, inv, QParameter(q));
    const auto dm = eigendecompose(hb.Lminus);
    const auto mirror = inv.mirror();
    for (std::size_t i = 0; i < inv.half().size(); ++i) {
      const double t = td(rng);
      const std::size_t u = inv.half()[i];
      const ComplexMatrix big = transition_matrix(d, t);
      const ComplexMatrix small = transition_matrix(dm, t);
      // (I - P) sum_r e^{it mu_r} F_r e_u, written in the full labelling.
      for (std::size_t k = 0; k < n; ++k) {
        const std::complex<double> lhs = big(k, u) - big(k, inv(u));
        std::complex<double> rhs = 0.0;
        for (std::size_t r = 0; r < inv.half().size(); ++r) {
          if (inv.half()[r] == k) rhs = small(r, i);
          if (mirror[r] == k) rhs = -small(r, i);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-9);
      }
    }
  }
}

TEST_CASE("lifting half-graph states") {
  const auto f = cycle_with_tail(6, 1);
  const Involution& inv = *f.involution;
  const auto& mk = f.markers;
  const std::size_t h = inv.half().size();
  std::vector<double> ea(h, 0.0);
  ea[static_cast<std::size_t>(std::find(inv.half().begin(), inv.half().end(), mk.at("a")) - inv.half().begin())] = 1.0;
  CHECK(lift_state(inv, ea, Sector::Minus).label() ==
        PureState::pair(f.graph.order(), mk.at("a"), mk.at("c")).label());
  CHECK(lift_state(inv, ea, Sector::Minus).kind() == StateKind::Pair);

  std::vector<double> plus(h + inv.fixed().size(), 0.0);
  plus[0] = 1.0;
  const PureState lifted = lift_state(inv, plus, Sector::Plus);
  CHECK(lifted.kind() == StateKind::Plus);
  CHECK(lifted.vector()[inv.half()[0]] == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(lifted.vector()[inv(inv.half()[0])] == doctest::Approx(1 / std::sqrt(2.0)));

  std::vector<double> fixed(h + inv.fixed().size(), 0.0);
  fixed[h] = 1.0;
  const PureState fs = lift_state(inv, fixed, Sector::Plus);
  CHECK(fs.kind() == StateKind::Vertex);
  CHECK(fs.vector()[inv.fixed()[0]] == 1.0);
}

TEST_CASE("half-graph reduction finds and re-verifies pair transfer") {
  {
    const auto f = c5_with_potential();
    // The Laplacian is the q-Laplacian at q = 1.
    const auto ws = reduce_pair_pst(f.graph, *f.involution, QParameter(1.0), 4.0);
    bool found = false;
    for (const auto& w : ws) {
      CHECK(w.fidelity >= 1.0 - 1e-9);
      if (w.x.label() == "pair:1,4" && w.y.label() == "pair:2,3") {
        found = true;
        CHECK(w.time == doctest::Approx(pi / 2).epsilon(1e-6));
      }
    }
    CHECK(found);
  }
  {
    const auto f = cycle_with_tail(6, 1);
    for (double q : {1.0, 0.5}) {
      const auto ws = reduce_pair_pst(f.graph, *f.involution, QParameter(q), 8.0);
      bool found = false;
      for (const auto& w : ws) {
        const auto d = eigendecompose(q_laplacian(f.graph, QParameter(q)));
        CHECK(detect_pst(d, w.x, w.y, w.time).verdict == Verdict::PST);
        CHECK(is_strongly_cospectral(d, w.x, w.y));
        if (w.sector == Sector::Minus && w.x.label() == "pair:1,5" && w.y.label() == "pair:2,4") {
          found = true;
          CHECK(w.time == doctest::Approx(pi / (2 * q)).epsilon(1e-6));
        }
      }
      CHECK(found);
    }
  }
  {
    const std::vector<std::size_t> swap{1, 0};
    const Involution inv = verify_involution(path_graph(2), swap);
    for (const auto& w : reduce_pair_pst(path_graph(2), inv, QParameter(1.0), 10.0))
      CHECK(w.sector != Sector::Minus);
  }
}
