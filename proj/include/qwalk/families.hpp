#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/graph.hpp"
#include "qwalk/involution.hpp"
#include "qwalk/transfer.hpp"

namespace qwalk {

/// A state-transfer claim attached to a family instance. Times are
/// expressions in q (see TimeExpr).
struct Claim {
  std::string x;
  std::string y;
  std::string time;
  MatrixKind kind = MatrixKind::QLaplacian;
  std::optional<double> fixed_q;  // claim holds only at this q
};

struct FamilyInstance {
  std::string name;
  WeightedGraph graph;
  std::optional<Involution> involution;
  std::map<std::string, std::size_t> markers;
  std::vector<Claim> claims;
  std::vector<Claim> claims_dropped;  // no longer backed by a symmetry
};

WeightedGraph path_graph(std::size_t n);
WeightedGraph cycle_graph(std::size_t n);

FamilyInstance path(std::size_t n);
FamilyInstance cycle(std::size_t n);
FamilyInstance complete_bipartite(std::size_t m, std::size_t n);
/// Hub is the last vertex; the rim is visited 0, 1, 3, 5, ..., then the even
/// labels downwards, so wheel(5) carries the labels of the usual drawing.
FamilyInstance wheel(std::size_t n = 5);
FamilyInstance path_with_end_potentials(std::size_t n, double w1, double w2);
FamilyInstance cycle_with_tail(std::size_t cycle_len, std::size_t tail_len);
/// X_i = 2i, Y_j = 2j+1 for the first min(m, n) indices, then the rest of
/// the larger side. The removed matching is {X_i, Y_i}, i < k; a = X_0,
/// b = X_1, c = Y_0, d = Y_1. With add_e, a and b are joined to X_n..X_{m-1}.
FamilyInstance kmn_minus_matching(std::size_t m, std::size_t n, std::size_t k, bool add_e);
FamilyInstance cycle_plus_chord(std::size_t n, std::size_t b, double rho);
FamilyInstance path_plus_two_edges(std::size_t n);
/// Glues vertex 0 of `tree` onto the marked vertex of `base`. Claims survive
/// only when that vertex is fixed by the base involution.
FamilyInstance attach_graph(const FamilyInstance& base, const WeightedGraph& tree,
                            const std::string& at_marker);
FamilyInstance c5_with_potential();

/// Family parameters as expressions in q, e.g. {"n": "4", "w1": "1+1/q"}.
using ParamMap = std::map<std::string, std::string>;

std::vector<std::string> family_names();
/// Throws std::invalid_argument for unknown families or bad parameters.
FamilyInstance build_family(const std::string& name, const ParamMap& params, double q = 1.0);

struct ClaimCheck {
  double q = 1.0;
  double time = 0.0;
  TransferReport report;
};

/// q values a claim is checked at: its fixed q, the value implied by its
/// matrix kind, or else `samples`.
std::vector<double> claim_q_values(const Claim& c, const std::vector<double>& samples);

ClaimCheck check_claim(const WeightedGraph& g, const Claim& c, double q);

}  // namespace qwalk
