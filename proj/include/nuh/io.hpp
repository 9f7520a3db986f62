#pragma once

// JSON form of a map specification:
//   {"linear": [e11, e12, e21, e22], "t": 1042, "alpha": 2, "order": "EH",
//    "profile": {"cos": [...], "sin": [...], "a": .., "b": .., "regions": [x1, x2, x3, x4]}}
// A missing profile selects the default for odd tau2; a missing alpha is
// searched for on a coarse grid.

#include <json.hpp>
#include <string>

#include "nuh/endo.hpp"

namespace nuh {

using Json = nlohmann::json;

MapSpec map_spec_from_json(const Json& j);
Json map_spec_to_json(const MapSpec& spec);
MapSpec load_map_spec(const std::string& path);

/// "5,5,0,5" -> matrix.
IntMatrix2 parse_matrix(const std::string& text);

/// Alpha grid 1.1, 1.2, ..., 10 used when no alpha is given.
double default_alpha_for(const IntMatrix2& linear);

}  // namespace nuh
