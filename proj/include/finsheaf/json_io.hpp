#pragma once

// JSON readers for spaces, rings, presheaves, cocycles, weights and maps, and
// writers for the objects that appear in reports. Structural problems (bad
// JSON, missing fields, wrong types) raise ParseError; mathematical problems
// raise the error kind of the owning module.

#include <string>

#include <json.hpp>

#include "finsheaf/grassmann.hpp"

namespace finsheaf {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);

/// {"points": [...], "min_open": {"a": ["a"], ...}}
SpacePtr parse_space(const Json& j, SpaceLimits limits = {});
Json space_to_json(const FinSpace& s);

/// {"kind": "Fp", "p": 3} | {"kind": "Zm", "m": 6} |
/// {"kind": "quotient", "p": 2, "poly": [0, 0, 1]} | {"kind": "product", "left": .., "right": ..}
RingPtr parse_ring(const Json& j);

/// {"carriers": {"<open key>": carrier, ...}, "restrictions": [{"from": key, "to": key, "map": [...]}, ...]}
/// A carrier is {"kind": "set", "size": n}, {"kind": "ring", "ring": ring} or
/// {"kind": "module", "ring": ring, "rank": r}. Restrictions that are not
/// listed are filled in by composing listed ones; identities are implicit.
Presheaf parse_presheaf(const Json& j, const SpacePtr& space);

/// {"cover": [[points], ...], "rank": k, "transitions": {"i,j": matrix}}. A
/// matrix entry is an element code of A(U_i n U_j) or an array of germs, one
/// per point of the overlap in point order.
TransitionCocycle parse_cocycle(const Json& j, const AlgebraPtr& a);

/// {"weights": {"0": entry, ...}} keyed by cover index; entries as for matrices, over A(X).
WeightFamily parse_weights(const Json& j, const AlgebraPtr& a, const std::vector<OpenSet>& cover);

/// {"domain": space, "assignment": {"y": "x", ...}}
ContinuousMap parse_map(const Json& j, const SpacePtr& codomain, SpaceLimits limits = {});

struct AlgebraPair {
  RingPtr a0, a1;
  std::vector<Element> rho;
};

/// {"a0": ring, "a1": ring, "rho": [...]}
AlgebraPair parse_algebras(const Json& j);

Json ring_to_json(const FinRing& r);
Json carrier_to_json(const Carrier& c);
Json open_to_json(const FinSpace& s, OpenSet u);
Json matrix_to_json(const Matrix& m);
/// Stalk bases by point name.
Json subsheaf_to_json(const VectorSubsheaf& t);

}  // namespace finsheaf
