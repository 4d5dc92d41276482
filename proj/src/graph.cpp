#include "qwalk/graph.hpp"

#include <cmath>
#include <string>

namespace qwalk {

WeightedGraph::WeightedGraph(std::size_t n)
    : n_(n), weights_(n * n, 0.0), potential_(n, 0.0) {}

void WeightedGraph::check_vertex(std::size_t v) const {
  if (v >= n_)
    throw GraphError("vertex " + std::to_string(v) + " out of range for graph of order " +
                     std::to_string(n_));
}

WeightedGraph& WeightedGraph::add_edge(std::size_t u, std::size_t v, double weight) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw GraphError("self-loop at " + std::to_string(u) + "; use a potential");
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw GraphError("edge weight must be positive and finite");
  if (weights_[u * n_ + v] != 0.0)
    throw GraphError("duplicate edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
  edges_.push_back({std::min(u, v), std::max(u, v), weight});
  weights_[u * n_ + v] = weight;
  weights_[v * n_ + u] = weight;
  return *this;
}

WeightedGraph& WeightedGraph::increase_edge(std::size_t u, std::size_t v, double weight) {
  check_vertex(u);
  check_vertex(v);
  if (!has_edge(u, v)) return add_edge(u, v, weight);
  if (!(weight > 0.0)) throw GraphError("edge weight increment must be positive");
  for (auto& e : edges_)
    if (e.u == std::min(u, v) && e.v == std::max(u, v)) e.weight += weight;
  weights_[u * n_ + v] += weight;
  weights_[v * n_ + u] += weight;
  return *this;
}

WeightedGraph& WeightedGraph::set_potential(std::size_t v, double value) {
  check_vertex(v);
  if (!std::isfinite(value)) throw GraphError("potential must be finite");
  potential_[v] = value;
  return *this;
}

double WeightedGraph::weight(std::size_t u, std::size_t v) const {
  check_vertex(u);
  check_vertex(v);
  return weights_[u * n_ + v];
}

std::vector<std::size_t> WeightedGraph::neighbors(std::size_t v) const {
  check_vertex(v);
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n_; ++u)
    if (weights_[v * n_ + u] != 0.0) out.push_back(u);
  return out;
}

double WeightedGraph::weighted_degree(std::size_t v) const {
  check_vertex(v);
  double d = 0.0;
  for (std::size_t u = 0; u < n_; ++u) d += weights_[v * n_ + u];
  return d;
}

WeightedGraph WeightedGraph::induced(std::span<const std::size_t> vertices) const {
  WeightedGraph sub(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    sub.set_potential(i, potential(vertices[i]));
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      const double w = weight(vertices[i], vertices[j]);
      if (w != 0.0) sub.add_edge(i, j, w);
    }
  }
  return sub;
}

QParameter::QParameter(double q) : q_(q) {
  if (q == 0.0 || !std::isfinite(q))
    throw std::invalid_argument("q must be a nonzero finite real");
}

std::string to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::QLaplacian: return "qlap";
    case MatrixKind::Laplacian: return "lap";
    case MatrixKind::Signless: return "signless";
  }
  return "?";
}

MatrixKind parse_matrix_kind(const std::string& s) {
  if (s == "qlap") return MatrixKind::QLaplacian;
  if (s == "lap") return MatrixKind::Laplacian;
  if (s == "signless") return MatrixKind::Signless;
  throw std::invalid_argument("unknown matrix kind '" + s + "' (qlap|lap|signless)");
}

Matrix adjacency_matrix(const WeightedGraph& g) {
  const std::size_t n = g.order();
  Matrix a(n, n);
  for (const Edge& e : g.edges()) {
    a(e.u, e.v) = e.weight;
    a(e.v, e.u) = e.weight;
  }
  return a;
}

Matrix degree_matrix(const WeightedGraph& g) {
  Matrix d(g.order(), g.order());
  for (const Edge& e : g.edges()) {
    d(e.u, e.u) += e.weight;
    d(e.v, e.v) += e.weight;
  }
  return d;
}

Matrix potential_matrix(const WeightedGraph& g) { return Matrix::diagonal(g.potentials()); }

Matrix laplacian(const WeightedGraph& g) {
  return degree_matrix(g) + potential_matrix(g) - adjacency_matrix(g);
}

Matrix signless_laplacian(const WeightedGraph& g) {
  return degree_matrix(g) + potential_matrix(g) + adjacency_matrix(g);
}

Matrix q_laplacian(const WeightedGraph& g, QParameter qp) {
  const double q = qp.value();
  const std::size_t n = g.order();
  Matrix l(n, n);
  const Matrix d = degree_matrix(g);
  for (std::size_t i = 0; i < n; ++i) l(i, i) = (1.0 - q * q) + q * q * (d(i, i) + g.potential(i));
  for (const Edge& e : g.edges()) {
    l(e.u, e.v) = -q * e.weight;
    l(e.v, e.u) = -q * e.weight;
  }
  return l;
}

double effective_q(MatrixKind kind, double q) {
  switch (kind) {
    case MatrixKind::Laplacian: return 1.0;
    case MatrixKind::Signless: return -1.0;
    case MatrixKind::QLaplacian: break;
  }
  return q;
}

Matrix graph_matrix(const WeightedGraph& g, MatrixKind kind, double q) {
  switch (kind) {
    case MatrixKind::Laplacian: return laplacian(g);
    case MatrixKind::Signless: return signless_laplacian(g);
    case MatrixKind::QLaplacian: break;
  }
  return q_laplacian(g, QParameter(q));
}

bool are_twins(const WeightedGraph& g, std::size_t u, std::size_t v) {
  if (u >= g.order() || v >= g.order()) throw GraphError("are_twins: vertex out of range");
  if (u == v) throw GraphError("are_twins: vertices must be distinct");
  if (g.potential(u) != g.potential(v)) return false;
  for (std::size_t z = 0; z < g.order(); ++z) {
    if (z == u || z == v) continue;
    if (g.weight(u, z) != g.weight(v, z)) return false;
  }
  return true;
}

bool is_connected(const WeightedGraph& g) {
  const std::size_t n = g.order();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : g.neighbors(v))
      if (!seen[u]) {
        seen[u] = true;
        ++count;
        stack.push_back(u);
      }
  }
  return count == n;
}

}  // namespace qwalk
