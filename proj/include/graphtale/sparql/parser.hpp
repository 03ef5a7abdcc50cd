#pragma once

#include <map>
#include <string>
#include <string_view>

#include "graphtale/sparql/ast.hpp"

namespace graphtale::sparql {

// Parses the supported SPARQL subset: PREFIX, SELECT [DISTINCT], basic
// graph patterns, BIND (IRI or {slot} placeholder), FILTER (=, !=, booleans,
// &&, parentheses), OPTIONAL, GROUP BY, GROUP_CONCAT(DISTINCT ?v;
// separator="..."), ORDER BY ?v / ASC(?v) / DESC(?v).
QueryPlan parse_query(std::string_view text);

// Returns a copy of the plan with every {slot} replaced by its IRI.
// Bindings must cover exactly the plan's unbound slots.
QueryPlan bind_parameters(const QueryPlan& plan, const std::map<std::string, std::string>& bindings);

}  // namespace graphtale::sparql
