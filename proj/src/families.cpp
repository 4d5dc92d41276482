#include "qwalk/families.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <stdexcept>

#include "qwalk/spectral.hpp"
#include "qwalk/time_expr.hpp"

namespace qwalk {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void label_vertices(FamilyInstance& f) {
  for (std::size_t v = 0; v < f.graph.order(); ++v) f.markers[std::to_string(v + 1)] = v;
}

std::string pair(std::size_t a, std::size_t b) {
  return "pair:" + std::to_string(a) + "," + std::to_string(b);
}

Involution reflection(const WeightedGraph& g, const std::function<std::size_t(std::size_t)>& f) {
  std::vector<std::size_t> perm(g.order());
  for (std::size_t v = 0; v < g.order(); ++v) perm[v] = f(v);
  return verify_involution(g, perm);
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

WeightedGraph path_graph(std::size_t n) {
  require(n >= 1, "path needs n >= 1");
  WeightedGraph g(n);
  for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

WeightedGraph cycle_graph(std::size_t n) {
  require(n >= 3, "cycle needs n >= 3");
  WeightedGraph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

FamilyInstance path(std::size_t n) {
  FamilyInstance f{"path", path_graph(n), {}, {}, {}, {}};
  if (n >= 2) f.involution = reflection(f.graph, [n](std::size_t v) { return n - 1 - v; });
  label_vertices(f);
  if (n == 2) f.claims.push_back({"v:0", "v:1", "pi/(2q)", MatrixKind::QLaplacian, {}});
  return f;
}

FamilyInstance cycle(std::size_t n) {
  FamilyInstance f{"cycle", cycle_graph(n), {}, {}, {}, {}};
  f.involution = reflection(f.graph, [n](std::size_t v) { return (n - v) % n; });
  return f;
}

FamilyInstance complete_bipartite(std::size_t m, std::size_t n) {
  require(m >= 1 && n >= 1, "complete bipartite graph needs m, n >= 1");
  FamilyInstance f{"complete-bipartite", WeightedGraph(m + n), {}, {}, {}, {}};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) f.graph.add_edge(i, m + j);
  std::size_t s = 0;
  std::size_t t = 1;
  if (m < 2 && n >= 2) {
    s = m;
    t = m + 1;
  }
  f.involution = reflection(f.graph, [s, t](std::size_t v) { return v == s ? t : v == t ? s : v; });
  return f;
}

FamilyInstance wheel(std::size_t n) {
  require(n >= 4, "wheel needs n >= 4");
  const std::size_t rim = n - 1;
  std::vector<std::size_t> order{0};
  for (std::size_t v = 1; v < rim; v += 2) order.push_back(v);
  for (std::size_t v = (rim - 1) / 2 * 2; v >= 2; v -= 2) order.push_back(v);

  FamilyInstance f{"wheel", WeightedGraph(n), {}, {}, {}, {}};
  const std::size_t hub = rim;
  for (std::size_t i = 0; i < rim; ++i) f.graph.add_edge(order[i], order[(i + 1) % rim]);
  for (std::size_t v = 0; v < rim; ++v) f.graph.add_edge(v, hub);

  std::vector<std::size_t> position(rim);
  for (std::size_t i = 0; i < rim; ++i) position[order[i]] = i;
  f.involution = reflection(f.graph, [&](std::size_t v) {
    return v == hub ? hub : order[rim - 1 - position[v]];
  });
  label_vertices(f);
  f.markers["hub"] = hub;
  return f;
}

FamilyInstance path_with_end_potentials(std::size_t n, double w1, double w2) {
  require(n >= 2, "path with end potentials needs n >= 2");
  require(std::isfinite(w1) && std::isfinite(w2), "potentials must be finite");
  FamilyInstance f{"path-potentials", path_graph(n), {}, {}, {}, {}};
  f.graph.set_potential(0, w1).set_potential(n - 1, w2);
  label_vertices(f);
  if (w1 != w2) return f;
  f.involution = reflection(f.graph, [n](std::size_t v) { return n - 1 - v; });

  const double w = w1;
  if (n == 2) f.claims.push_back({"v:0", "v:1", "pi/(2q)", MatrixKind::QLaplacian, {}});
  if (n == 3 && w == 1.0)
    f.claims.push_back({pair(0, 1), pair(1, 2), "pi/(q*sqrt(2))", MatrixKind::QLaplacian, {}});
  if (n == 4 && w != 1.0)
    f.claims.push_back({pair(0, 3), pair(1, 2), "pi/(2q)", MatrixKind::QLaplacian, 1.0 / (w - 1.0)});
  if (n == 5 && w == 1.0)
    f.claims.push_back({pair(0, 4), pair(1, 3), "pi/(2q)", MatrixKind::QLaplacian, {}});
  if (n == 7 && w == 1.0)
    f.claims.push_back({pair(0, 6), pair(2, 4), "pi/(q*sqrt(2))", MatrixKind::QLaplacian, {}});
  return f;
}

FamilyInstance cycle_with_tail(std::size_t cycle_len, std::size_t tail_len) {
  require(cycle_len == 6 || cycle_len == 8, "cycle with tail needs cycle length 6 or 8");
  require(tail_len >= 1, "cycle with tail needs a tail of length >= 1");
  const std::size_t n = cycle_len;
  FamilyInstance f{"cycle-with-tail", WeightedGraph(n + tail_len), {}, {}, {}, {}};
  for (std::size_t i = 0; i < n; ++i) f.graph.add_edge(i, (i + 1) % n);
  const std::size_t attach = n / 2;
  std::size_t prev = attach;
  for (std::size_t i = 0; i < tail_len; ++i) {
    f.graph.add_edge(prev, n + i);
    prev = n + i;
  }
  f.involution = reflection(f.graph, [n](std::size_t v) { return v < n ? (n - v) % n : v; });

  const std::size_t a = 1;
  const std::size_t b = n == 6 ? 2 : 3;
  const std::size_t c = n - a;
  const std::size_t d = n - b;
  f.markers = {{"A", 0}, {"a", a}, {"b", b}, {"c", c}, {"d", d}, {"F", attach}};
  f.claims.push_back({pair(a, c), pair(b, d), n == 6 ? "pi/(2q)" : "pi/(q*sqrt(2))",
                      MatrixKind::QLaplacian, {}});
  return f;
}

FamilyInstance kmn_minus_matching(std::size_t m, std::size_t n, std::size_t k, bool add_e) {
  require(k >= 2, "matching size k must be >= 2");
  require(k <= std::min(m, n), "matching size k exceeds a partite set");
  require(!add_e || m > n, "the E augmentation needs m > n");
  const std::size_t common = std::min(m, n);
  auto x = [&](std::size_t i) { return i < common ? 2 * i : common + i; };
  auto y = [&](std::size_t j) { return j < common ? 2 * j + 1 : common + j; };

  FamilyInstance f{"kmn-minus-matching", WeightedGraph(m + n), {}, {}, {}, {}};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(i == j && i < k)) f.graph.add_edge(x(i), y(j));
  if (add_e)
    for (std::size_t i = n; i < m; ++i) {
      f.graph.add_edge(x(0), x(i));
      f.graph.add_edge(x(1), x(i));
    }
  const std::size_t a = x(0), b = x(1), c = y(0), d = y(1);
  f.involution = reflection(f.graph, [=](std::size_t v) {
    if (v == a) return b;
    if (v == b) return a;
    if (v == c) return d;
    if (v == d) return c;
    return v;
  });
  label_vertices(f);
  f.markers["a"] = a;
  f.markers["b"] = b;
  f.markers["c"] = c;
  f.markers["d"] = d;
  Claim claim{pair(a, b), pair(c, d), "pi/(2q)", MatrixKind::QLaplacian, {}};
  (m == n || add_e ? f.claims : f.claims_dropped).push_back(claim);
  return f;
}

FamilyInstance cycle_plus_chord(std::size_t n, std::size_t b, double rho) {
  require(n >= 3, "cycle plus chord needs n >= 3");
  require(b >= 1 && b < n, "chord endpoint b must lie in 1..n-1");
  require(rho > 0.0 && std::isfinite(rho), "chord weight must be positive");
  FamilyInstance f{"cycle-plus-chord", cycle_graph(n), {}, {}, {}, {}};
  f.graph.increase_edge(0, b, rho);
  f.involution = reflection(f.graph, [n, b](std::size_t a) { return (b + n - a) % n; });
  f.markers = {{"0", 0}, {"b", b}};

  using MK = MatrixKind;
  if (n == 3 && b == 1 && rho == std::round(rho))
    f.claims.push_back({pair(0, 2), pair(1, 2), "pi/(2*" + number(rho) + ")", MK::Laplacian, {}});
  if (n == 4 && b == 1 && rho == 1.0)
    f.claims.push_back({pair(0, 1), pair(2, 3), "pi/2", MK::Signless, {}});
  if (n == 4 && b == 2 && rho == 1.0)
    f.claims.push_back({pair(0, 1), pair(0, 3), "pi/2", MK::Laplacian, {}});
  if (n == 4 && b == 2 && rho == 2.0)
    f.claims.push_back({pair(0, 1), pair(2, 3), "pi/2", MK::Laplacian, {}});
  return f;
}

FamilyInstance path_plus_two_edges(std::size_t n) {
  require(n >= 6, "path plus two edges needs n >= 6");
  FamilyInstance f{"path-plus-two-edges", path_graph(n), {}, {}, {}, {}};
  f.graph.add_edge(1, n - 3).add_edge(2, n - 2);
  f.graph.set_potential(0, 2.0).set_potential(n - 1, 2.0);
  f.involution = reflection(f.graph, [n](std::size_t v) { return n - 1 - v; });
  label_vertices(f);
  f.claims.push_back({pair(0, n - 1), pair(1, n - 2), "pi/(2q)", MatrixKind::QLaplacian, {}});
  return f;
}

FamilyInstance attach_graph(const FamilyInstance& base, const WeightedGraph& tree,
                            const std::string& at_marker) {
  const auto it = base.markers.find(at_marker);
  if (it == base.markers.end())
    throw std::invalid_argument("family '" + base.name + "' has no marker '" + at_marker + "'");
  require(tree.order() >= 1, "attached graph must be non-empty");
  const std::size_t at = it->second;
  const std::size_t n = base.graph.order();

  FamilyInstance f = base;
  f.name = base.name + "+attached";
  f.graph = WeightedGraph(n + tree.order() - 1);
  for (const Edge& e : base.graph.edges()) f.graph.add_edge(e.u, e.v, e.weight);
  for (std::size_t v = 0; v < n; ++v) f.graph.set_potential(v, base.graph.potential(v));
  auto map = [&](std::size_t v) { return v == 0 ? at : n + v - 1; };
  for (const Edge& e : tree.edges()) f.graph.add_edge(map(e.u), map(e.v), e.weight);
  for (std::size_t v = 0; v < tree.order(); ++v)
    if (tree.potential(v) != 0.0)
      f.graph.set_potential(map(v), f.graph.potential(map(v)) + tree.potential(v));

  f.involution.reset();
  if (base.involution && (*base.involution)(at) == at) {
    std::vector<std::size_t> perm(base.involution->perm().begin(), base.involution->perm().end());
    for (std::size_t v = n; v < f.graph.order(); ++v) perm.push_back(v);
    f.involution = verify_involution(f.graph, perm);
  } else {
    f.claims_dropped.insert(f.claims_dropped.end(), f.claims.begin(), f.claims.end());
    f.claims.clear();
  }
  return f;
}

FamilyInstance c5_with_potential() {
  FamilyInstance f{"c5-potential", cycle_graph(5), {}, {}, {}, {}};
  f.graph.set_potential(1, 1.0).set_potential(4, 1.0);
  f.involution = reflection(f.graph, [](std::size_t v) { return (5 - v) % 5; });
  f.claims.push_back({pair(1, 4), pair(2, 3), "pi/2", MatrixKind::Laplacian, {}});
  return f;
}

namespace {

class Params {
 public:
  Params(const ParamMap& p, double q) : p_(p), q_(q) {}

  double real(const std::string& key) {
    used_.insert(key);
    const auto it = p_.find(key);
    if (it == p_.end()) throw std::invalid_argument("missing parameter '" + key + "'");
    return TimeExpr(it->second)(q_);
  }
  double real(const std::string& key, double fallback) {
    return p_.count(key) ? real(key) : (used_.insert(key), fallback);
  }
  std::size_t integer(const std::string& key) {
    const double v = real(key);
    if (v < 0.0 || v != std::round(v))
      throw std::invalid_argument("parameter '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  std::size_t integer(const std::string& key, std::size_t fallback) {
    return p_.count(key) ? integer(key) : (used_.insert(key), fallback);
  }
  bool flag(const std::string& key) { return real(key, 0.0) != 0.0; }

  void finish(const std::string& family) const {
    for (const auto& [k, v] : p_)
      if (!used_.count(k))
        throw std::invalid_argument("family '" + family + "' does not take parameter '" + k + "'");
  }

 private:
  const ParamMap& p_;
  double q_;
  std::set<std::string> used_;
};

using Builder = std::function<FamilyInstance(Params&)>;

const std::map<std::string, Builder>& registry() {
  static const std::map<std::string, Builder> r = {
      {"path", [](Params& p) { return path(p.integer("n")); }},
      {"cycle", [](Params& p) { return cycle(p.integer("n")); }},
      {"complete-bipartite",
       [](Params& p) { return complete_bipartite(p.integer("m"), p.integer("n")); }},
      {"wheel", [](Params& p) { return wheel(p.integer("n", 5)); }},
      {"path-potentials",
       [](Params& p) {
         const double w = p.real("w", 0.0);
         const std::size_t n = p.integer("n");
         const double w1 = p.real("w1", w);
         return path_with_end_potentials(n, w1, p.real("w2", w1));
       }},
      {"cycle-with-tail",
       [](Params& p) { return cycle_with_tail(p.integer("cycle"), p.integer("tail", 1)); }},
      {"kmn-minus-matching",
       [](Params& p) {
         const std::size_t m = p.integer("m");
         const std::size_t n = p.integer("n");
         const std::size_t k = p.integer("k", 2);
         return kmn_minus_matching(m, n, k, p.flag("add-e"));
       }},
      {"cycle-plus-chord",
       [](Params& p) {
         const std::size_t n = p.integer("n");
         const std::size_t b = p.integer("b");
         return cycle_plus_chord(n, b, p.real("rho", 1.0));
       }},
      {"path-plus-two-edges", [](Params& p) { return path_plus_two_edges(p.integer("n")); }},
      {"c5-potential", [](Params&) { return c5_with_potential(); }},
  };
  return r;
}

}  // namespace

std::vector<std::string> family_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

FamilyInstance build_family(const std::string& name, const ParamMap& params, double q) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown family '" + name + "'");
  Params p(params, q);
  FamilyInstance f = it->second(p);
  p.finish(name);
  return f;
}

std::vector<double> claim_q_values(const Claim& c, const std::vector<double>& samples) {
  if (c.fixed_q) return {*c.fixed_q};
  if (c.kind != MatrixKind::QLaplacian) return {effective_q(c.kind, 1.0)};
  return samples;
}

ClaimCheck check_claim(const WeightedGraph& g, const Claim& c, double q) {
  ClaimCheck out;
  out.q = c.fixed_q ? *c.fixed_q : effective_q(c.kind, q);
  out.time = TimeExpr(c.time)(out.q);
  const SpectralDecomposition d = eigendecompose(graph_matrix(g, c.kind, out.q));
  out.report = detect_pst(d, parse_state(c.x, g.order()), parse_state(c.y, g.order()), out.time);
  return out;
}

}  // namespace qwalk
