#pragma once

#include <vector>

#include "graphtale/rdf/graph.hpp"
#include "graphtale/sparql/ast.hpp"

namespace graphtale::sparql {

// Result rows plus, for each row, the instantiated pattern triples that
// produced it (evidence provenance). For grouped queries a row's support is
// the union over its group, in derivation order.
struct TracedResult {
    ResultTable table;
    std::vector<std::vector<rdf::Triple>> row_triples;
};

// Bag-semantics execution: left-to-right pattern joins via the graph
// indexes, OPTIONAL as left join, FILTER applied at the end of its group,
// GROUP_CONCAT values sorted lexicographically, deterministic ORDER BY with
// unbound last. Throws MissingBinding if the plan has unbound slots.
ResultTable execute(const QueryPlan& plan, const rdf::Graph& graph);

TracedResult execute_traced(const QueryPlan& plan, const rdf::Graph& graph);

}  // namespace graphtale::sparql
