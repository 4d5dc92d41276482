#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/graph.hpp"
#include "qwalk/matrix.hpp"
#include "qwalk/transfer.hpp"

namespace qwalk {

/// -1 selects the Laplacian, +1 the signless Laplacian.
class Zeta {
 public:
  explicit Zeta(int z);
  int value() const noexcept { return z_; }
  MatrixKind kind() const noexcept { return z_ < 0 ? MatrixKind::Laplacian : MatrixKind::Signless; }
  friend bool operator==(Zeta, Zeta) = default;

 private:
  int z_;
};

inline const Zeta kLaplacianZeta{-1};
inline const Zeta kSignlessZeta{1};

struct CycleEigenpair {
  double theta = 0.0;
  std::vector<double> v;                 // cosine vector v_j (or v_0, v_{n/2})
  std::optional<std::vector<double>> w;  // sine vector v_{n-j} for 1 <= j < n/2
};

/// theta_j = 2 + 2 zeta cos(2 j pi / n), 0 <= j <= floor(n/2).
CycleEigenpair cycle_eigenpair(std::size_t n, std::size_t j, Zeta zeta);

/// L or Q of C_n + rho {0, b}, i.e. M + rho w w^T with w = e_0 + zeta e_b.
Matrix perturbed_cycle_matrix(std::size_t n, std::size_t b, double rho, Zeta zeta);

enum class EigvecBranch { Orthogonal, Generic };

struct PerturbedEigvec {
  std::size_t n = 0;
  std::size_t b = 0;
  std::size_t j = 0;
  Zeta zeta{-1};
  std::vector<double> z;
  EigvecBranch branch = EigvecBranch::Generic;
};

/// z_j built from v_j and v_{n-j} so that w^T z_j = 0; 1 <= j < n/2.
PerturbedEigvec perturbed_eigvec(std::size_t n, std::size_t b, std::size_t j, Zeta zeta);

/// Entry k of z_j from the trigonometric product forms (no vectors involved).
double perturbed_entry(std::size_t n, std::size_t b, std::size_t j, Zeta zeta,
                       EigvecBranch branch, std::size_t k);

/// || M_rho z - theta z ||_max
double eigen_residual(const Matrix& m, std::span<const double> z, double theta);

/// Cauchy interlacing for B and B + C with C positive semidefinite of rank
/// one: gamma_1 >= alpha_1 >= gamma_2 >= ... (descending order). Throws
/// std::invalid_argument when C is not rank one PSD.
bool interlacing_check(const Matrix& b, const Matrix& c, double tol = 1e-9);

/// The two vertices at which e_k^T z_1 vanishes (reduced mod n), when both are
/// integers. n >= 7.
std::optional<std::pair<std::size_t, std::size_t>> vertex_pst_candidates(std::size_t n,
                                                                         std::size_t b, Zeta zeta);

/// Residues of k + l (mod n) allowed for a pair state (e_k - e_l)/sqrt2.
struct PairPredicate {
  std::size_t n = 0;
  std::vector<std::size_t> residues;  // empty: no pair is allowed
  bool in_range = true;               // n >= 13
  bool operator()(std::size_t k, std::size_t l) const;
};

PairPredicate pair_pst_candidates(std::size_t n, std::size_t b, Zeta zeta);

struct NonexistenceReport {
  std::size_t n = 0;
  std::size_t b = 0;
  double rho = 0.0;
  Zeta zeta{-1};
  std::size_t j1 = 2;  // gap is |theta_j2 - theta_j1|
  std::size_t j2 = 3;
  double gap_closed_form = 0.0;  // product-of-sines display
  double gap_numeric = 0.0;      // from eigenvalues of the perturbed matrix
  bool gap_below_one = false;
  bool in_nonexistence_range = false;
  std::size_t states_checked = 0;    // candidate vertices or pairs
  std::size_t states_supported = 0;  // with both eigenvalues in their support
  bool support_verified = false;
  bool preconditions_verified = false;
  std::string status;
};

/// Checks the hypotheses used by the nonexistence argument for vertex PST
/// (zeta = -1) or pair PST (zeta = +1). The result is a record of verified
/// preconditions, not a proof.
NonexistenceReport nonexistence_witness(std::size_t n, std::size_t b, double rho, Zeta zeta);

struct P3Parameters {
  double q = 0.0;
  double tau = 0.0;
};

/// q = sqrt(8 l^2 / (k^2 - l^2)), tau = pi (k^2 - l^2) / (4 l) for integers
/// k > l >= 1 of opposite parity.
P3Parameters p3_pst_parameters(long k, long l);

/// max over i, j, t of | |U_L(t)_{ij}| - |exp(-i t q A')_{ij}| | with
/// A' the adjacency matrix of P_n((1 - omega) q).
double path_potential_equivalence(std::size_t n, double omega, double q,
                                  std::span<const double> times);

/// Minus block of P_n(omega) under the reversal, written out directly.
Matrix pn_omega_half_blocks(std::size_t n, double omega, double q);

/// Half choice along the arc of C_n + rho {0, b} (n even) from one fixed
/// vertex or edge to the other, in path order.
std::vector<std::size_t> cycle_chord_arc(std::size_t n, std::size_t b);

/// Potentials of the path whose Laplacian equals the minus block of the
/// Laplacian of C_n + rho {0, b} over cycle_chord_arc (n even).
std::vector<double> cycle_chord_path_potentials(std::size_t n, std::size_t b, double rho);

struct PerturbationWitness {
  std::vector<Edge> edges;      // inserted edges
  std::vector<double> potentials;
  std::vector<std::size_t> involution;
  PureState x;
  PureState y;
  double time = 0.0;
  double fidelity = 0.0;
  double q = 1.0;
  MatrixKind kind = MatrixKind::QLaplacian;
};

struct PerturbationSearchOptions {
  std::size_t num_edges = 2;
  std::vector<std::vector<double>> potential_menu;  // whole potential vectors; empty: keep base
  MatrixKind kind = MatrixKind::QLaplacian;
  double q = 1.0;
  double t_max = 10.0;
  std::size_t max_order = 16;
  std::size_t max_candidates = 2'000'000;
  bool pairs_only = true;  // keep witnesses between pair states only
};

/// Inserts num_edges unit edges into `base` in every way (up to automorphisms
/// of the base), keeps insertions that preserve a base involution, and runs
/// the half-graph reduction. Each witness is re-verified on the full graph.
std::vector<PerturbationWitness> perturbation_search(const WeightedGraph& base,
                                                     const PerturbationSearchOptions& opts);

WeightedGraph apply_witness(const WeightedGraph& base, const PerturbationWitness& w);

}  // namespace qwalk
