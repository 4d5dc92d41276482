#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qwalk/graph.hpp"
#include "qwalk/matrix.hpp"
#include "qwalk/transfer.hpp"

namespace qwalk {

class InvolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class NotPermutationError : public InvolutionError {
 public:
  using InvolutionError::InvolutionError;
};
class TrivialInvolutionError : public InvolutionError {
 public:
  using InvolutionError::InvolutionError;
};
class NotOrderTwoError : public InvolutionError {
 public:
  using InvolutionError::InvolutionError;
};
class NotAutomorphismError : public InvolutionError {
 public:
  using InvolutionError::InvolutionError;
};
class AsymmetricPotentialError : public InvolutionError {
 public:
  using InvolutionError::InvolutionError;
};

/// Verified order-2 automorphism together with the block labelling it
/// induces: half_choice (one vertex per 2-orbit), their images, then the
/// fixed set.
class Involution {
 public:
  std::span<const std::size_t> perm() const noexcept { return perm_; }
  std::size_t operator()(std::size_t v) const { return perm_.at(v); }
  std::span<const std::size_t> fixed() const noexcept { return fixed_; }
  std::span<const std::size_t> half() const noexcept { return half_; }
  std::vector<std::size_t> mirror() const;
  std::size_t order() const noexcept { return perm_.size(); }

  /// Same involution with a different representative per orbit. Each entry
  /// must come from a distinct 2-orbit and all orbits must be covered.
  Involution with_half_choice(std::vector<std::size_t> half) const;

  friend bool operator==(const Involution& a, const Involution& b) { return a.perm_ == b.perm_; }

 private:
  friend Involution verify_involution(const WeightedGraph&, std::span<const std::size_t>);
  friend Involution unchecked_involution(std::vector<std::size_t>);

  std::vector<std::size_t> perm_;
  std::vector<std::size_t> fixed_;
  std::vector<std::size_t> half_;
};

/// Checks order two, non-triviality, weight preservation and potential
/// symmetry, each with its own exception type. The half choice is the
/// smallest label of each orbit, in increasing order.
Involution verify_involution(const WeightedGraph& g, std::span<const std::size_t> perm);

/// Builds the orbit structure without consulting a graph. Only order two and
/// non-triviality are checked. Used for negative controls.
Involution unchecked_involution(std::vector<std::size_t> perm);

struct InvolutionSearchOptions {
  std::size_t max_order = 16;
  /// When set, only these permutations are checked (no size limit applies).
  std::optional<std::vector<std::vector<std::size_t>>> candidates;
};

/// All non-trivial involutions. Exhaustive backtracking with a vertex-invariant
/// partition for pruning; throws when the graph exceeds max_order and no
/// candidates are given.
std::vector<Involution> find_involutions(const WeightedGraph& g,
                                         const InvolutionSearchOptions& opts = {});

/// All automorphisms (identity included), same bound as find_involutions.
std::vector<std::vector<std::size_t>> find_automorphisms(const WeightedGraph& g,
                                                         std::size_t max_order = 16);

/// Sub-blocks of the q-Laplacian under the (half, mirror, fixed) ordering.
/// Every block is a literal block of that matrix:
///   [[Lp, Aphi, AS], [Aphi, Lp, AS], [AS^T, AS^T, LS]].
struct HalfBlocks {
  Matrix Lp;
  Matrix Aphi;
  Matrix AS;
  Matrix LS;
  Matrix Lminus;     // Lp - Aphi
  Matrix Lplus;      // [[Lp + Aphi, AS], [2 AS^T, LS]]
  Matrix Lplus_sym;  // [[Lp + Aphi, sqrt2 AS], [sqrt2 AS^T, LS]]

  /// Fills the three derived matrices from the four literal blocks.
  static HalfBlocks from_parts(Matrix Lp, Matrix Aphi, Matrix AS, Matrix LS);

  /// Reassembles the full matrix in original vertex labels.
  Matrix reassemble(const Involution& inv) const;
};

HalfBlocks half_blocks(const WeightedGraph& g, const Involution& inv, QParameter q);
/// Same blocks cut from an arbitrary symmetric matrix that commutes with the
/// involution.
HalfBlocks half_blocks(const Matrix& m, const Involution& inv);

/// Orthogonal M with columns (e_u - e_phi(u))/sqrt2, (e_u + e_phi(u))/sqrt2
/// (half order), then e_s for fixed s.
Matrix basis_matrix(const Involution& inv);

/// max over t of || M^T U(t) M - diag(U_Lminus(t), U_Lplus_sym(t)) ||_max
double verify_block_diagonalization(const WeightedGraph& g, const Involution& inv, QParameter q,
                                    std::span<const double> times);
double verify_block_diagonalization(const Matrix& m, const Involution& inv,
                                    std::span<const double> times);

/// spec(L) == spec(Lplus) U spec(Lminus) as multisets, after sorted pairing.
bool spectrum_factorization_check(const Matrix& full, const HalfBlocks& blocks,
                                  double tol = 1e-8);
bool spectrum_factorization_check(const WeightedGraph& g, const Involution& inv, QParameter q,
                                  double tol = 1e-8);

enum class Sector { Minus, Plus };

/// Embeds a state of the minus block (length |half|) or plus block (length
/// |half| + |fixed|) into the full graph through M.
PureState lift_state(const Involution& inv, std::span<const double> half_state, Sector sector);

struct LiftedWitness {
  Sector sector;
  std::size_t block_u;  // vertex indices inside the block matrix
  std::size_t block_v;
  PureState x;
  PureState y;
  double time;
  double fidelity;  // re-verified on the full graph
};

/// Vertex-PST search inside Lminus and Lplus_sym, lifted and re-verified by
/// detect_pst on the full q-Laplacian. Earliest time per vertex pair.
std::vector<LiftedWitness> reduce_pair_pst(const WeightedGraph& g, const Involution& inv,
                                           QParameter q, double t_max);

}  // namespace qwalk
