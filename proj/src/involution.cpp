#include "qwalk/involution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <tuple>

#include "qwalk/spectral.hpp"

namespace qwalk {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

void check_permutation(std::span<const std::size_t> perm, std::size_t n) {
  if (perm.size() != n)
    throw NotPermutationError("permutation has " + std::to_string(perm.size()) +
                              " entries, graph has " + std::to_string(n) + " vertices");
  std::vector<bool> seen(n, false);
  for (std::size_t v : perm) {
    if (v >= n || seen[v]) throw NotPermutationError("not a permutation of the vertex set");
    seen[v] = true;
  }
}

void check_order_two(std::span<const std::size_t> perm) {
  bool identity = true;
  for (std::size_t v = 0; v < perm.size(); ++v) {
    if (perm[perm[v]] != v)
      throw NotOrderTwoError("permutation is not an involution at vertex " + std::to_string(v));
    identity = identity && perm[v] == v;
  }
  if (identity) throw TrivialInvolutionError("identity permutation is not a non-trivial involution");
}

/// Per-vertex invariant used to prune the backtracking search.
using VertexKey = std::tuple<double, std::vector<double>>;

std::vector<VertexKey> vertex_keys(const WeightedGraph& g) {
  std::vector<VertexKey> keys;
  keys.reserve(g.order());
  for (std::size_t v = 0; v < g.order(); ++v) {
    std::vector<double> ws;
    for (std::size_t u : g.neighbors(v)) ws.push_back(g.weight(u, v));
    std::sort(ws.begin(), ws.end());
    keys.emplace_back(g.potential(v), std::move(ws));
  }
  return keys;
}

class AutomorphismSearch {
 public:
  AutomorphismSearch(const WeightedGraph& g, bool involutions_only)
      : g_(g), n_(g.order()), involutions_(involutions_only), keys_(vertex_keys(g)),
        image_(n_, kUnset), used_(n_, false) {}

  std::vector<std::vector<std::size_t>> run() {
    extend(0);
    return found_;
  }

 private:
  static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

  bool consistent(std::size_t v, std::size_t w) const {
    if (keys_[v] != keys_[w]) return false;
    for (std::size_t u = 0; u < v; ++u)
      if (g_.weight(u, v) != g_.weight(image_[u], w)) return false;
    return true;
  }

  void extend(std::size_t v) {
    if (v == n_) {
      found_.push_back(image_);
      return;
    }
    if (involutions_) {
      // phi(w) = v for some earlier w forces phi(v) = w.
      for (std::size_t w = 0; w < v; ++w)
        if (image_[w] == v) {
          if (consistent(v, w)) assign(v, w);
          return;
        }
    }
    for (std::size_t w = 0; w < n_; ++w) {
      if (used_[w]) continue;
      if (involutions_ && w < v) continue;  // earlier targets are settled above
      if (!consistent(v, w)) continue;
      assign(v, w);
    }
  }

  void assign(std::size_t v, std::size_t w) {
    image_[v] = w;
    used_[w] = true;
    extend(v + 1);
    used_[w] = false;
    image_[v] = kUnset;
  }

  const WeightedGraph& g_;
  std::size_t n_;
  bool involutions_;
  std::vector<VertexKey> keys_;
  std::vector<std::size_t> image_;
  std::vector<bool> used_;
  std::vector<std::vector<std::size_t>> found_;
};

std::vector<std::size_t> concat_order(const Involution& inv) {
  std::vector<std::size_t> order(inv.half().begin(), inv.half().end());
  const auto mirror = inv.mirror();
  order.insert(order.end(), mirror.begin(), mirror.end());
  order.insert(order.end(), inv.fixed().begin(), inv.fixed().end());
  return order;
}

}  // namespace

std::vector<std::size_t> Involution::mirror() const {
  std::vector<std::size_t> m;
  m.reserve(half_.size());
  for (std::size_t h : half_) m.push_back(perm_[h]);
  return m;
}

Involution Involution::with_half_choice(std::vector<std::size_t> half) const {
  if (half.size() != half_.size())
    throw InvolutionError("half choice must pick exactly one vertex per 2-orbit");
  std::set<std::size_t> orbits;
  for (std::size_t h : half) {
    if (h >= perm_.size() || perm_[h] == h)
      throw InvolutionError("half choice contains a fixed or invalid vertex");
    orbits.insert(std::min(h, perm_[h]));
  }
  if (orbits.size() != half.size()) throw InvolutionError("half choice repeats an orbit");
  Involution copy = *this;
  copy.half_ = std::move(half);
  return copy;
}

Involution unchecked_involution(std::vector<std::size_t> perm) {
  check_permutation(perm, perm.size());
  check_order_two(perm);
  Involution inv;
  inv.perm_ = std::move(perm);
  for (std::size_t v = 0; v < inv.perm_.size(); ++v) {
    if (inv.perm_[v] == v)
      inv.fixed_.push_back(v);
    else if (v < inv.perm_[v])
      inv.half_.push_back(v);
  }
  return inv;
}

Involution verify_involution(const WeightedGraph& g, std::span<const std::size_t> perm) {
  check_permutation(perm, g.order());
  check_order_two(perm);
  for (std::size_t u = 0; u < g.order(); ++u)
    for (std::size_t v = u + 1; v < g.order(); ++v)
      if (g.weight(u, v) != g.weight(perm[u], perm[v]))
        throw NotAutomorphismError("edge {" + std::to_string(u) + "," + std::to_string(v) +
                                   "} is not preserved");
  for (std::size_t v = 0; v < g.order(); ++v)
    if (g.potential(v) != g.potential(perm[v]))
      throw AsymmetricPotentialError("potential differs between " + std::to_string(v) + " and " +
                                     std::to_string(perm[v]));
  return unchecked_involution({perm.begin(), perm.end()});
}

std::vector<std::vector<std::size_t>> find_automorphisms(const WeightedGraph& g,
                                                         std::size_t max_order) {
  if (g.order() > max_order)
    throw InvolutionError("automorphism search limited to " + std::to_string(max_order) +
                          " vertices");
  return AutomorphismSearch(g, false).run();
}

std::vector<Involution> find_involutions(const WeightedGraph& g,
                                         const InvolutionSearchOptions& opts) {
  std::vector<Involution> out;
  if (opts.candidates) {
    std::set<std::vector<std::size_t>> seen;
    for (const auto& perm : *opts.candidates) {
      try {
        Involution inv = verify_involution(g, perm);
        if (seen.insert(perm).second) out.push_back(std::move(inv));
      } catch (const InvolutionError&) {
      }
    }
    return out;
  }
  if (g.order() > opts.max_order)
    throw InvolutionError("exhaustive involution search limited to " +
                          std::to_string(opts.max_order) + " vertices; pass candidates");
  for (auto& perm : AutomorphismSearch(g, true).run()) {
    bool identity = true;
    for (std::size_t v = 0; v < perm.size(); ++v) identity = identity && perm[v] == v;
    if (!identity) out.push_back(unchecked_involution(std::move(perm)));
  }
  return out;
}

HalfBlocks HalfBlocks::from_parts(Matrix Lp, Matrix Aphi, Matrix AS, Matrix LS) {
  HalfBlocks b;
  const std::size_t h = Lp.rows();
  const std::size_t s = LS.rows();
  b.Lminus = Lp - Aphi;
  const Matrix top = Lp + Aphi;
  b.Lplus = Matrix(h + s, h + s);
  b.Lplus_sym = Matrix(h + s, h + s);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) {
      b.Lplus(i, j) = top(i, j);
      b.Lplus_sym(i, j) = top(i, j);
    }
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t k = 0; k < s; ++k) {
      b.Lplus(i, h + k) = AS(i, k);
      b.Lplus(h + k, i) = 2.0 * AS(i, k);
      b.Lplus_sym(i, h + k) = kSqrt2 * AS(i, k);
      b.Lplus_sym(h + k, i) = kSqrt2 * AS(i, k);
    }
  for (std::size_t k = 0; k < s; ++k)
    for (std::size_t l = 0; l < s; ++l) {
      b.Lplus(h + k, h + l) = LS(k, l);
      b.Lplus_sym(h + k, h + l) = LS(k, l);
    }
  b.Lp = std::move(Lp);
  b.Aphi = std::move(Aphi);
  b.AS = std::move(AS);
  b.LS = std::move(LS);
  return b;
}

Matrix HalfBlocks::reassemble(const Involution& inv) const {
  const std::size_t h = Lp.rows();
  const std::size_t s = LS.rows();
  const std::vector<std::size_t> order = concat_order(inv);
  Matrix layout(2 * h + s, 2 * h + s);
  auto put = [&](std::size_t r0, std::size_t c0, const Matrix& blk, bool transpose) {
    for (std::size_t i = 0; i < (transpose ? blk.cols() : blk.rows()); ++i)
      for (std::size_t j = 0; j < (transpose ? blk.rows() : blk.cols()); ++j)
        layout(r0 + i, c0 + j) = transpose ? blk(j, i) : blk(i, j);
  };
  put(0, 0, Lp, false);
  put(0, h, Aphi, false);
  put(0, 2 * h, AS, false);
  put(h, 0, Aphi, false);
  put(h, h, Lp, false);
  put(h, 2 * h, AS, false);
  put(2 * h, 0, AS, true);
  put(2 * h, h, AS, true);
  put(2 * h, 2 * h, LS, false);

  Matrix full(order.size(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j) full(order[i], order[j]) = layout(i, j);
  return full;
}

HalfBlocks half_blocks(const Matrix& m, const Involution& inv) {
  if (m.rows() != inv.order()) throw InvolutionError("matrix order does not match involution");
  const auto mirror = inv.mirror();
  return HalfBlocks::from_parts(submatrix(m, inv.half(), inv.half()),
                                submatrix(m, inv.half(), mirror),
                                submatrix(m, inv.half(), inv.fixed()),
                                submatrix(m, inv.fixed(), inv.fixed()));
}

HalfBlocks half_blocks(const WeightedGraph& g, const Involution& inv, QParameter q) {
  const Matrix full = q_laplacian(g, q);
  HalfBlocks b = half_blocks(full, inv);

  // Half-graph block: the induced subgraph's own q-Laplacian plus the degree
  // its vertices lose to edges leaving the half graph.
  const WeightedGraph half = g.induced(inv.half());
  Matrix lp = q_laplacian(half, q);
  const double q2 = q.value() * q.value();
  for (std::size_t i = 0; i < inv.half().size(); ++i)
    lp(i, i) += q2 * (g.weighted_degree(inv.half()[i]) - half.weighted_degree(i));
  return HalfBlocks::from_parts(std::move(lp), std::move(b.Aphi), std::move(b.AS),
                                std::move(b.LS));
}

Matrix basis_matrix(const Involution& inv) {
  const std::size_t n = inv.order();
  const std::size_t h = inv.half().size();
  const double r = 1.0 / kSqrt2;
  Matrix m(n, n);
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t u = inv.half()[i];
    const std::size_t pu = inv(u);
    m(u, i) = r;
    m(pu, i) = -r;
    m(u, h + i) = r;
    m(pu, h + i) = r;
  }
  for (std::size_t k = 0; k < inv.fixed().size(); ++k) m(inv.fixed()[k], 2 * h + k) = 1.0;
  return m;
}

double verify_block_diagonalization(const Matrix& m, const Involution& inv,
                                    std::span<const double> times) {
  const HalfBlocks blocks = half_blocks(m, inv);
  const SpectralDecomposition full = eigendecompose(m);
  const SpectralDecomposition minus = eigendecompose(blocks.Lminus);
  const SpectralDecomposition plus = eigendecompose(blocks.Lplus_sym);
  const Matrix basis = basis_matrix(inv);
  const Matrix basis_t = basis.transpose();
  double worst = 0.0;
  for (double t : times) {
    const ComplexMatrix lhs = basis_t * transition_matrix(full, t) * basis;
    const ComplexMatrix rhs =
        block_diagonal(transition_matrix(minus, t), transition_matrix(plus, t));
    worst = std::max(worst, max_abs_diff(lhs, rhs));
  }
  return worst;
}

double verify_block_diagonalization(const WeightedGraph& g, const Involution& inv, QParameter q,
                                    std::span<const double> times) {
  return verify_block_diagonalization(q_laplacian(g, q), inv, times);
}

bool spectrum_factorization_check(const Matrix& full, const HalfBlocks& blocks, double tol) {
  std::vector<double> whole = eigenvalues_sorted(full);
  std::vector<double> parts = eigenvalues_sorted(blocks.Lminus);
  const std::vector<double> plus = eigenvalues_sorted(blocks.Lplus_sym);
  parts.insert(parts.end(), plus.begin(), plus.end());
  std::sort(parts.begin(), parts.end());
  if (parts.size() != whole.size()) return false;
  for (std::size_t i = 0; i < whole.size(); ++i)
    if (std::abs(whole[i] - parts[i]) > tol) return false;
  return true;
}

bool spectrum_factorization_check(const WeightedGraph& g, const Involution& inv, QParameter q,
                                  double tol) {
  return spectrum_factorization_check(q_laplacian(g, q), half_blocks(g, inv, q), tol);
}

PureState lift_state(const Involution& inv, std::span<const double> half_state, Sector sector) {
  const std::size_t n = inv.order();
  const std::size_t h = inv.half().size();
  const std::size_t expected = sector == Sector::Minus ? h : h + inv.fixed().size();
  if (half_state.size() != expected)
    throw InvolutionError("lift_state: block state has " + std::to_string(half_state.size()) +
                          " entries, expected " + std::to_string(expected));

  // Basis vectors lift to tagged states.
  std::size_t nonzero = 0;
  std::size_t index = 0;
  for (std::size_t i = 0; i < half_state.size(); ++i)
    if (half_state[i] != 0.0) {
      ++nonzero;
      index = i;
    }
  if (nonzero == 1 && std::abs(half_state[index]) == 1.0 && half_state[index] > 0.0) {
    if (index < h) {
      const std::size_t u = inv.half()[index];
      return sector == Sector::Minus ? PureState::pair(n, u, inv(u)) : PureState::plus(n, u, inv(u));
    }
    return PureState::vertex(n, inv.fixed()[index - h]);
  }

  const Matrix basis = basis_matrix(inv);
  std::vector<double> embedded(n, 0.0);
  const std::size_t offset = sector == Sector::Minus ? 0 : h;
  for (std::size_t i = 0; i < half_state.size(); ++i) embedded[offset + i] = half_state[i];
  return PureState::raw(basis * std::span<const double>(embedded));
}

std::vector<LiftedWitness> reduce_pair_pst(const WeightedGraph& g, const Involution& inv,
                                           QParameter q, double t_max) {
  const Matrix full_matrix = q_laplacian(g, q);
  const SpectralDecomposition full = eigendecompose(full_matrix);
  const HalfBlocks blocks = half_blocks(full_matrix, inv);
  std::vector<LiftedWitness> out;

  for (Sector sector : {Sector::Minus, Sector::Plus}) {
    const Matrix& block = sector == Sector::Minus ? blocks.Lminus : blocks.Lplus_sym;
    const std::size_t m = block.rows();
    if (m < 2) continue;
    const SpectralDecomposition d = eigendecompose(block);
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = u + 1; v < m; ++v) {
        const PureState bu = PureState::vertex(m, u);
        const PureState bv = PureState::vertex(m, v);
        if (!is_strongly_cospectral(d, bu, bv)) continue;
        const auto hits = search_pst(d, bu, bv, t_max);
        if (hits.empty()) continue;
        PureState x = lift_state(inv, bu.vector(), sector);
        PureState y = lift_state(inv, bv.vector(), sector);
        const TransferReport r = detect_pst(full, x, y, hits.front().time);
        if (r.verdict != Verdict::PST) continue;
        out.push_back({sector, u, v, std::move(x), std::move(y), r.time, r.fidelity});
      }
  }
  return out;
}

}  // namespace qwalk
