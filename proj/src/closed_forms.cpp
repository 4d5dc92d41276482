#include "qwalk/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "qwalk/families.hpp"
#include "qwalk/involution.hpp"
#include "qwalk/kernels.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroTol = 1e-10;

double dn(std::size_t n) { return static_cast<double>(n); }

void check_cycle_index(std::size_t n, std::size_t j) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  if (j > n / 2) throw std::invalid_argument("cycle eigenpair index out of range");
}

std::vector<double> chord_vector(std::size_t n, std::size_t b, Zeta zeta) {
  std::vector<double> w(n, 0.0);
  w[0] = 1.0;
  w[b] += zeta.value();
  return w;
}

double nearest(std::span<const double> values, double target) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double v : values)
    if (std::isnan(best) || std::abs(v - target) < std::abs(best - target)) best = v;
  return best;
}

}  // namespace

Zeta::Zeta(int z) : z_(z) {
  if (z != 1 && z != -1) throw std::invalid_argument("zeta must be +1 or -1");
}

CycleEigenpair cycle_eigenpair(std::size_t n, std::size_t j, Zeta zeta) {
  check_cycle_index(n, j);
  CycleEigenpair p;
  p.theta = 2.0 + 2.0 * zeta.value() * std::cos(2.0 * kPi * dn(j) / dn(n));
  p.v.resize(n);
  if (j == 0 || 2 * j == n) {
    for (std::size_t k = 0; k < n; ++k)
      p.v[k] = (j == 0 || k % 2 == 0 ? 1.0 : -1.0) / std::sqrt(dn(n));
    return p;
  }
  const double scale = std::sqrt(2.0 / dn(n));
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double arg = 2.0 * kPi * dn(j * k % n) / dn(n);
    p.v[k] = scale * std::cos(arg);
    w[k] = scale * std::sin(arg);
  }
  p.w = std::move(w);
  return p;
}

Matrix perturbed_cycle_matrix(std::size_t n, std::size_t b, double rho, Zeta zeta) {
  return graph_matrix(cycle_plus_chord(n, b, rho).graph, zeta.kind(), zeta.value() < 0 ? 1.0 : -1.0);
}

PerturbedEigvec perturbed_eigvec(std::size_t n, std::size_t b, std::size_t j, Zeta zeta) {
  if (j < 1 || 2 * j >= n) throw std::invalid_argument("perturbed eigenvector needs 1 <= j < n/2");
  if (b < 1 || b >= n) throw std::invalid_argument("chord endpoint b must lie in 1..n-1");
  const CycleEigenpair p = cycle_eigenpair(n, j, zeta);
  const std::vector<double> w = chord_vector(n, b, zeta);
  const double wv = kernels::dot(w, p.v);
  const double ws = kernels::dot(w, *p.w);

  PerturbedEigvec out{n, b, j, zeta, std::vector<double>(n), EigvecBranch::Generic};
  if (std::abs(wv) <= kZeroTol && std::abs(ws) <= kZeroTol) {
    out.branch = EigvecBranch::Orthogonal;
    for (std::size_t k = 0; k < n; ++k) out.z[k] = p.v[k] + (*p.w)[k];
  } else {
    for (std::size_t k = 0; k < n; ++k) out.z[k] = ws * p.v[k] - wv * (*p.w)[k];
  }
  return out;
}

double perturbed_entry(std::size_t n, std::size_t b, std::size_t j, Zeta zeta,
                       EigvecBranch branch, std::size_t k) {
  const double N = dn(n);
  if (branch == EigvecBranch::Orthogonal)
    return 2.0 / std::sqrt(N) * std::cos(2.0 * dn(j) * dn(k) * kPi / N - kPi / 4.0);
  const double a = dn(b) * dn(j) * kPi / N;
  const double c = (2.0 * dn(k) - dn(b)) * dn(j) * kPi / N;
  if (zeta.value() > 0) return -4.0 / N * std::cos(a) * std::sin(c);
  return -4.0 / N * std::sin(a) * std::cos(c);
}

double eigen_residual(const Matrix& m, std::span<const double> z, double theta) {
  const std::vector<double> mz = m * z;
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) worst = std::max(worst, std::abs(mz[i] - theta * z[i]));
  return worst;
}

bool interlacing_check(const Matrix& b, const Matrix& c, double tol) {
  if (!b.is_square() || b.rows() != c.rows() || !c.is_square())
    throw std::invalid_argument("interlacing: matrices must be square of equal order");
  const std::vector<double> ce = eigenvalues_sorted(c);
  const double scale = std::max(1.0, c.max_abs());
  std::size_t positive = 0;
  for (double e : ce) {
    if (e < -tol * scale) throw std::invalid_argument("interlacing: C is not positive semidefinite");
    if (e > tol * scale) ++positive;
  }
  if (positive != 1) throw std::invalid_argument("interlacing: C is not of rank one");

  std::vector<double> alpha = eigenvalues_sorted(b);
  std::vector<double> gamma = eigenvalues_sorted(b + c);
  std::reverse(alpha.begin(), alpha.end());
  std::reverse(gamma.begin(), gamma.end());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (gamma[i] < alpha[i] - tol) return false;
    if (i + 1 < alpha.size() && alpha[i] < gamma[i + 1] - tol) return false;
  }
  return true;
}

std::optional<std::pair<std::size_t, std::size_t>> vertex_pst_candidates(std::size_t n,
                                                                         std::size_t b, Zeta zeta) {
  // Work in quarters (or eighths) so integrality is an exact divisibility test.
  if (zeta.value() < 0) {
    if ((2 * b + n) % 4 != 0) return std::nullopt;
    return std::pair{(2 * b + n) / 4 % n, (2 * b + 3 * n) / 4 % n};
  }
  if (2 * b != n) {
    if (b % 2 != 0 || n % 2 != 0) return std::nullopt;
    return std::pair{b / 2 % n, (n + b) / 2 % n};
  }
  if (n % 8 != 0) return std::nullopt;
  return std::pair{3 * n / 8, 7 * n / 8};
}

bool PairPredicate::operator()(std::size_t k, std::size_t l) const {
  if (k == l || k >= n || l >= n) return false;
  return std::find(residues.begin(), residues.end(), (k + l) % n) != residues.end();
}

PairPredicate pair_pst_candidates(std::size_t n, std::size_t b, Zeta zeta) {
  PairPredicate p;
  p.n = n;
  p.in_range = n >= 13;
  if (zeta.value() < 0) {
    p.residues = {b % n};
  } else if (2 * b != n) {
    if (n % 2 == 0) p.residues = {(b + n / 2) % n};
  } else if (n % 4 == 0) {
    p.residues = {n / 4};
  }
  return p;
}

NonexistenceReport nonexistence_witness(std::size_t n, std::size_t b, double rho, Zeta zeta) {
  NonexistenceReport r;
  r.n = n;
  r.b = b;
  r.rho = rho;
  r.zeta = zeta;
  const bool laplacian = zeta.value() < 0;
  r.j1 = 2;
  r.j2 = laplacian ? 3 : 4;
  const double N = dn(n);
  r.gap_closed_form = laplacian ? 4.0 * std::abs(std::sin(5.0 * kPi / N) * std::sin(kPi / N))
                                : 4.0 * std::abs(std::sin(6.0 * kPi / N) * std::sin(2.0 * kPi / N));
  r.gap_below_one = r.gap_closed_form < 1.0 - 1e-12;
  r.in_nonexistence_range = laplacian ? n >= 15 : (2 * b == n ? n >= 16 : n >= 22);

  const bool indices_ok = 2 * r.j2 < n;
  r.gap_numeric = std::numeric_limits<double>::quiet_NaN();
  if (indices_ok) {
    const std::vector<double> spec = eigenvalues_sorted(perturbed_cycle_matrix(n, b, rho, zeta));
    const double t1 = cycle_eigenpair(n, r.j1, zeta).theta;
    const double t2 = cycle_eigenpair(n, r.j2, zeta).theta;
    const double n1 = nearest(spec, t1);
    const double n2 = nearest(spec, t2);
    if (std::abs(n1 - t1) < 1e-8 && std::abs(n2 - t2) < 1e-8) r.gap_numeric = std::abs(n2 - n1);

    const std::vector<double> z1 = perturbed_eigvec(n, b, r.j1, zeta).z;
    const std::vector<double> z2 = perturbed_eigvec(n, b, r.j2, zeta).z;
    auto supported = [&](auto&& entry) {
      return std::abs(entry(z1)) > kZeroTol && std::abs(entry(z2)) > kZeroTol;
    };
    if (laplacian) {
      if (const auto c = vertex_pst_candidates(n, b, zeta)) {
        for (std::size_t k : {c->first, c->second}) {
          ++r.states_checked;
          if (supported([k](const std::vector<double>& z) { return z[k]; })) ++r.states_supported;
        }
      }
    } else {
      const PairPredicate pred = pair_pst_candidates(n, b, zeta);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
          if (!pred(k, l)) continue;
          ++r.states_checked;
          if (supported([k, l](const std::vector<double>& z) { return z[k] - z[l]; }))
            ++r.states_supported;
        }
    }
  }
  r.support_verified = indices_ok && r.states_supported == r.states_checked;

  r.preconditions_verified = r.in_nonexistence_range && r.gap_below_one && r.support_verified;
  if (!r.in_nonexistence_range)
    r.status = "inconclusive: outside the proven range";
  else if (r.preconditions_verified && r.states_checked == 0)
    r.status = "preconditions verified (no candidate states)";
  else if (r.preconditions_verified)
    r.status = "preconditions verified";
  else
    r.status = "preconditions not verified";
  return r;
}

P3Parameters p3_pst_parameters(long k, long l) {
  if (l < 1 || k <= l) throw std::invalid_argument("p3 parameters need integers k > l >= 1");
  if ((k - l) % 2 == 0) throw std::invalid_argument("p3 parameters need k and l of opposite parity");
  const double kk = static_cast<double>(k);
  const double ll = static_cast<double>(l);
  const double diff = kk * kk - ll * ll;
  return {std::sqrt(8.0 * ll * ll / diff), kPi * diff / (4.0 * ll)};
}

double path_potential_equivalence(std::size_t n, double omega, double q,
                                  std::span<const double> times) {
  const FamilyInstance f = path_with_end_potentials(n, omega, omega);
  const SpectralDecomposition lhs = eigendecompose(q_laplacian(f.graph, QParameter(q)));

  WeightedGraph shifted = path_graph(n);
  shifted.set_potential(0, (1.0 - omega) * q).set_potential(n - 1, (1.0 - omega) * q);
  Matrix a = adjacency_matrix(shifted) + potential_matrix(shifted);
  const SpectralDecomposition rhs = eigendecompose(a * (-q));

  double worst = 0.0;
  for (double t : times) {
    const ComplexMatrix u = transition_matrix(lhs, t);
    const ComplexMatrix v = transition_matrix(rhs, t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(std::abs(u(i, j)) - std::abs(v(i, j))));
  }
  return worst;
}

Matrix pn_omega_half_blocks(std::size_t n, double omega, double q) {
  if (n < 2) throw std::invalid_argument("P_n(omega) half block needs n >= 2");
  const std::size_t k = n / 2;
  const double q2 = q * q;
  Matrix m = q_laplacian(path_graph(k), QParameter(q));
  m(0, 0) += q2 * omega;
  m(k - 1, k - 1) += n % 2 == 0 ? q2 + q : q2;
  return m;
}

std::vector<std::size_t> cycle_chord_arc(std::size_t n, std::size_t b) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("cycle chord arc needs even n >= 4");
  if (b < 1 || b >= n) throw std::invalid_argument("chord endpoint b must lie in 1..n-1");
  const std::size_t m = n / 2;
  const std::size_t start = b % 2 == 0 ? b / 2 + 1 : (b + 1) / 2;
  const std::size_t len = b % 2 == 0 ? m - 1 : m;
  std::vector<std::size_t> arc(len);
  for (std::size_t i = 0; i < len; ++i) arc[i] = (start + i) % n;
  return arc;
}

std::vector<double> cycle_chord_path_potentials(std::size_t n, std::size_t b, double rho) {
  const std::vector<std::size_t> arc = cycle_chord_arc(n, b);
  std::vector<double> pot(arc.size(), 0.0);
  const double end = b % 2 == 0 ? 1.0 : 2.0;
  pot.front() += end;
  pot.back() += end;
  for (std::size_t i = 0; i < arc.size(); ++i)
    if (arc[i] == 0 || arc[i] == b) pot[i] += 2.0 * rho;
  return pot;
}

namespace {

using EdgeKey = std::pair<std::size_t, std::size_t>;

std::vector<EdgeKey> image(const std::vector<EdgeKey>& edges, const std::vector<std::size_t>& perm) {
  std::vector<EdgeKey> out;
  out.reserve(edges.size());
  for (auto [u, v] : edges) out.push_back(std::minmax(perm[u], perm[v]));
  std::sort(out.begin(), out.end());
  return out;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t pool) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < pool - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

}  // namespace

WeightedGraph apply_witness(const WeightedGraph& base, const PerturbationWitness& w) {
  WeightedGraph g = base;
  for (const Edge& e : w.edges) g.add_edge(e.u, e.v, e.weight);
  for (std::size_t v = 0; v < w.potentials.size(); ++v) g.set_potential(v, w.potentials[v]);
  return g;
}

std::vector<PerturbationWitness> perturbation_search(const WeightedGraph& base,
                                                     const PerturbationSearchOptions& opts) {
  const std::size_t n = base.order();
  if (n > opts.max_order)
    throw std::invalid_argument("perturbation search limited to " + std::to_string(opts.max_order) +
                                " vertices");
  for (const auto& pot : opts.potential_menu)
    if (pot.size() != n) throw std::invalid_argument("potential menu entry has wrong length");

  std::vector<EdgeKey> pool;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (!base.has_edge(u, v)) pool.emplace_back(u, v);
  const std::size_t k = opts.num_edges;
  const double menu = static_cast<double>(std::max<std::size_t>(opts.potential_menu.size(), 1));
  const double space = binomial(pool.size(), k) * menu;
  if (k > pool.size() || space > static_cast<double>(opts.max_candidates))
    throw std::invalid_argument("perturbation search space exceeds the configured bound");

  const auto automorphisms = find_automorphisms(base, opts.max_order);
  const std::vector<Involution> involutions = find_involutions(base, {opts.max_order, {}});

  // Canonical representatives of edge subsets under the base automorphisms.
  std::vector<std::vector<EdgeKey>> subsets;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  do {
    std::vector<EdgeKey> edges;
    for (std::size_t i : idx) edges.push_back(pool[i]);
    const bool canonical = std::all_of(automorphisms.begin(), automorphisms.end(),
                                       [&](const auto& a) { return !(image(edges, a) < edges); });
    if (canonical) subsets.push_back(std::move(edges));
  } while (k > 0 && next_combination(idx, pool.size()));

  std::vector<std::vector<double>> menu_items = opts.potential_menu;
  if (menu_items.empty()) menu_items.push_back(base.potentials());
  const std::size_t jobs = subsets.size() * menu_items.size();
  std::vector<std::vector<PerturbationWitness>> found(jobs);
  const double q = effective_q(opts.kind, opts.q);

  parallel_for(jobs, [&](std::size_t job) {
    const auto& edges = subsets[job / menu_items.size()];
    const auto& pot = menu_items[job % menu_items.size()];
    WeightedGraph g = base;
    std::vector<Edge> inserted;
    for (auto [u, v] : edges) {
      g.add_edge(u, v);
      inserted.push_back({u, v, 1.0});
    }
    for (std::size_t v = 0; v < n; ++v) g.set_potential(v, pot[v]);

    std::set<std::pair<std::string, std::string>> seen;
    for (const Involution& base_inv : involutions) {
      std::optional<Involution> inv;
      try {
        inv = verify_involution(g, base_inv.perm());
      } catch (const InvolutionError&) {
        continue;
      }
      for (LiftedWitness& w : reduce_pair_pst(g, *inv, QParameter(q), opts.t_max)) {
        if (opts.pairs_only && (w.x.kind() != StateKind::Pair || w.y.kind() != StateKind::Pair))
          continue;
        if (!seen.insert({w.x.label(), w.y.label()}).second) continue;
        found[job].push_back({inserted, pot, {inv->perm().begin(), inv->perm().end()},
                              std::move(w.x), std::move(w.y), w.time, w.fidelity, q, opts.kind});
      }
    }
  });

  std::vector<PerturbationWitness> out;
  for (auto& f : found)
    for (auto& w : f) out.push_back(std::move(w));
  return out;
}

}  // namespace qwalk
