#pragma once

#include <json.hpp>

#include "qwalk/closed_forms.hpp"
#include "qwalk/families.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/involution.hpp"
#include "qwalk/transfer.hpp"

namespace qwalk {

using nlohmann::json;

/// {"n": 5, "edges": [[u, v, w], ...], "potentials": {"v": value}}.
/// Two-element edges get weight 1.
json graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const json& j);

json report_to_json(const TransferReport& r);

/// {"orbits": [[u, v], ...], "fixed": [s, ...]}
json involution_to_json(const Involution& inv);
/// Permutation described by the orbit notation, unverified. Vertices not
/// listed are fixed.
std::vector<std::size_t> permutation_from_json(const json& j, std::size_t n);

json claim_to_json(const Claim& c);
Claim claim_from_json(const json& j);

json family_to_json(const FamilyInstance& f);

json witness_to_json(const PerturbationWitness& w);
PerturbationWitness witness_from_json(const json& j, std::size_t n);

json nonexistence_to_json(const NonexistenceReport& r);

}  // namespace qwalk
