#include "qwalk/json_io.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qwalk {
namespace {

std::size_t vertex(const json& j, std::size_t n) {
  if (!j.is_number_integer() || j.get<long long>() < 0 || j.get<std::size_t>() >= n)
    throw std::invalid_argument("vertex index " + j.dump() + " out of range");
  return j.get<std::size_t>();
}

}  // namespace

json graph_to_json(const WeightedGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, e.weight});
  json pot = json::object();
  for (std::size_t v = 0; v < g.order(); ++v)
    if (g.potential(v) != 0.0) pot[std::to_string(v)] = g.potential(v);
  return {{"n", g.order()}, {"edges", edges}, {"potentials", pot}};
}

WeightedGraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n")) throw std::invalid_argument("graph JSON needs field 'n'");
  const auto n = j.at("n").get<std::size_t>();
  WeightedGraph g(n);
  for (const json& e : j.value("edges", json::array())) {
    if (!e.is_array() || (e.size() != 2 && e.size() != 3))
      throw std::invalid_argument("edge entries must be [u, v] or [u, v, w]");
    g.add_edge(vertex(e[0], n), vertex(e[1], n), e.size() == 3 ? e[2].get<double>() : 1.0);
  }
  const json pot = j.value("potentials", json::object());
  for (const auto& [key, value] : pot.items()) {
    std::size_t used = 0;
    const unsigned long v = std::stoul(key, &used);
    if (used != key.size() || v >= n) throw std::invalid_argument("bad potential key '" + key + "'");
    g.set_potential(v, value.get<double>());
  }
  return g;
}

json report_to_json(const TransferReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"time", r.time},
          {"phase", {{"re", r.phase.real()}, {"im", r.phase.imag()}}},
          {"fidelity", r.fidelity},
          {"residual", r.residual},
          {"strongly_cospectral", r.strongly_cospectral}};
}

json involution_to_json(const Involution& inv) {
  json orbits = json::array();
  for (std::size_t h : inv.half()) orbits.push_back({h, inv(h)});
  return {{"orbits", orbits}, {"fixed", std::vector<std::size_t>(inv.fixed().begin(), inv.fixed().end())}};
}

std::vector<std::size_t> permutation_from_json(const json& j, std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t v = 0; v < n; ++v) perm[v] = v;
  std::vector<bool> listed(n, false);
  for (const json& orbit : j.at("orbits")) {
    if (!orbit.is_array() || orbit.empty())
      throw std::invalid_argument("orbits must be non-empty arrays");
    std::vector<std::size_t> cyc;
    for (const json& v : orbit) {
      const std::size_t x = vertex(v, n);
      if (listed[x]) throw std::invalid_argument("vertex " + std::to_string(x) + " listed twice");
      listed[x] = true;
      cyc.push_back(x);
    }
    for (std::size_t i = 0; i < cyc.size(); ++i) perm[cyc[i]] = cyc[(i + 1) % cyc.size()];
  }
  return perm;
}

json claim_to_json(const Claim& c) {
  json j = {{"x", c.x}, {"y", c.y}, {"time", c.time}, {"matrix", to_string(c.kind)}};
  if (c.fixed_q) j["q"] = *c.fixed_q;
  return j;
}

Claim claim_from_json(const json& j) {
  Claim c;
  c.x = j.at("x").get<std::string>();
  c.y = j.at("y").get<std::string>();
  c.time = j.at("time").is_number() ? j.at("time").dump()
                                    : j.at("time").get<std::string>();
  c.kind = parse_matrix_kind(j.value("matrix", std::string("qlap")));
  if (j.contains("q")) c.fixed_q = j.at("q").get<double>();
  return c;
}

json family_to_json(const FamilyInstance& f) {
  json claims = json::array();
  for (const Claim& c : f.claims) claims.push_back(claim_to_json(c));
  json dropped = json::array();
  for (const Claim& c : f.claims_dropped) dropped.push_back(claim_to_json(c));
  json j = {{"family", f.name},
            {"graph", graph_to_json(f.graph)},
            {"markers", f.markers},
            {"claims", claims},
            {"claims_dropped", dropped}};
  j["involution"] = f.involution ? involution_to_json(*f.involution) : json(nullptr);
  return j;
}

json witness_to_json(const PerturbationWitness& w) {
  json edges = json::array();
  for (const Edge& e : w.edges) edges.push_back({e.u, e.v, e.weight});
  json pot = json::object();
  for (std::size_t v = 0; v < w.potentials.size(); ++v)
    if (w.potentials[v] != 0.0) pot[std::to_string(v)] = w.potentials[v];
  return {{"edges", edges},
          {"potentials", pot},
          {"involution", w.involution},
          {"states", {w.x.label(), w.y.label()}},
          {"time", w.time},
          {"fidelity", w.fidelity},
          {"q", w.q},
          {"matrix", to_string(w.kind)}};
}

PerturbationWitness witness_from_json(const json& j, std::size_t n) {
  std::vector<Edge> edges;
  for (const json& e : j.at("edges"))
    edges.push_back({vertex(e.at(0), n), vertex(e.at(1), n), e.size() > 2 ? e[2].get<double>() : 1.0});
  std::vector<double> pot(n, 0.0);
  const json pot_json = j.value("potentials", json::object());
  for (const auto& [key, value] : pot_json.items())
    pot.at(std::stoul(key)) = value.get<double>();
  const auto& states = j.at("states");
  return {std::move(edges),
          std::move(pot),
          j.value("involution", std::vector<std::size_t>{}),
          parse_state(states.at(0).get<std::string>(), n),
          parse_state(states.at(1).get<std::string>(), n),
          j.at("time").get<double>(),
          j.value("fidelity", 0.0),
          j.value("q", 1.0),
          parse_matrix_kind(j.value("matrix", std::string("qlap")))};
}

json nonexistence_to_json(const NonexistenceReport& r) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return {{"n", r.n},
          {"b", r.b},
          {"rho", r.rho},
          {"zeta", r.zeta.value()},
          {"gap_indices", {r.j1, r.j2}},
          {"gap_closed_form", r.gap_closed_form},
          {"gap_numeric", num(r.gap_numeric)},
          {"gap_below_one", r.gap_below_one},
          {"in_nonexistence_range", r.in_nonexistence_range},
          {"states_checked", r.states_checked},
          {"states_supported", r.states_supported},
          {"support_verified", r.support_verified},
          {"preconditions_verified", r.preconditions_verified},
          {"status", r.status}};
}

}  // namespace qwalk
