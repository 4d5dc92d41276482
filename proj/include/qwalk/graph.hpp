#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/matrix.hpp"

namespace qwalk {

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph with positive edge weights and real vertex potentials.
/// Loops are never stored as edges; a loop of weight w is the potential w.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t n);

  /// Throws GraphError on self-loops, duplicates, out-of-range endpoints or
  /// non-positive weights.
  WeightedGraph& add_edge(std::size_t u, std::size_t v, double weight = 1.0);
  /// Adds weight to an existing edge, or inserts the edge.
  WeightedGraph& increase_edge(std::size_t u, std::size_t v, double weight);
  WeightedGraph& set_potential(std::size_t v, double value);

  std::size_t order() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<double>& potentials() const noexcept { return potential_; }
  double potential(std::size_t v) const { return potential_.at(v); }

  /// 0 when {u, v} is not an edge.
  double weight(std::size_t u, std::size_t v) const;
  bool has_edge(std::size_t u, std::size_t v) const { return weight(u, v) != 0.0; }
  std::vector<std::size_t> neighbors(std::size_t v) const;
  double weighted_degree(std::size_t v) const;

  /// Subgraph induced on `vertices` (in that order), potentials restricted.
  WeightedGraph induced(std::span<const std::size_t> vertices) const;

 private:
  void check_vertex(std::size_t v) const;

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> weights_;  // dense n*n lookup
  std::vector<double> potential_;
};

/// Nonzero real parameter of the q-Laplacian family.
class QParameter {
 public:
  explicit QParameter(double q);
  double value() const noexcept { return q_; }

 private:
  double q_;
};

enum class MatrixKind { QLaplacian, Laplacian, Signless };

std::string to_string(MatrixKind kind);
MatrixKind parse_matrix_kind(const std::string& s);

Matrix adjacency_matrix(const WeightedGraph& g);
/// Row sums of the adjacency matrix. Potentials are not included.
Matrix degree_matrix(const WeightedGraph& g);
Matrix potential_matrix(const WeightedGraph& g);
/// (Delta + Delta') - A
Matrix laplacian(const WeightedGraph& g);
/// (Delta + Delta') + A
Matrix signless_laplacian(const WeightedGraph& g);
/// (1 - q^2) I + q^2 (Delta + Delta') - q A
Matrix q_laplacian(const WeightedGraph& g, QParameter q);

/// The matrix kind evaluated at q (q is ignored for Laplacian / Signless).
Matrix graph_matrix(const WeightedGraph& g, MatrixKind kind, double q);
/// q value the kind corresponds to: 1 for Laplacian, -1 for Signless.
double effective_q(MatrixKind kind, double q);

/// N(u)\{u,v} == N(v)\{u,v} with equal weights, and equal potentials.
bool are_twins(const WeightedGraph& g, std::size_t u, std::size_t v);

bool is_connected(const WeightedGraph& g);

}  // namespace qwalk
