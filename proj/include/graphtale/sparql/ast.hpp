#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/rdf/term.hpp"

namespace graphtale::sparql {

struct QuerySyntaxError : std::runtime_error {
    QuerySyntaxError(std::size_t position, const std::string& message);
    std::size_t position;
    std::string message;
};

struct UnsupportedFeature : std::runtime_error {
    explicit UnsupportedFeature(std::string feature);
    std::string feature;
};

struct MissingBinding : std::runtime_error {
    explicit MissingBinding(std::string slot);
    std::string slot;
};

struct UnknownSlot : std::runtime_error {
    explicit UnknownSlot(std::string slot);
    std::string slot;
};

// One position of a triple pattern / BIND / FILTER atom: a concrete term,
// a variable, or an unbound template parameter written {name}.
struct PatternTerm {
    enum class Kind { Fixed, Var, Slot };
    Kind kind = Kind::Fixed;
    rdf::Term term;    // Fixed
    std::string name;  // Var / Slot

    bool operator==(const PatternTerm&) const = default;

    static PatternTerm fixed(rdf::Term t) { return {Kind::Fixed, std::move(t), ""}; }
    static PatternTerm var(std::string n) { return {Kind::Var, {}, std::move(n)}; }
    static PatternTerm slot(std::string n) { return {Kind::Slot, {}, std::move(n)}; }
};

struct TriplePattern {
    PatternTerm subject, predicate, object;
    bool operator==(const TriplePattern&) const = default;
};

struct FilterExpr {
    enum class Op { Atom, Eq, Ne, And };
    Op op = Op::Atom;
    PatternTerm atom;              // Op::Atom
    std::vector<FilterExpr> args;  // Eq/Ne: exactly 2; And: 2+

    bool operator==(const FilterExpr&) const = default;
};

struct GroupBlock;

struct Element {
    enum class Kind { Pattern, Bind, Filter, Optional };
    Kind kind = Kind::Pattern;
    TriplePattern pattern;          // Pattern
    PatternTerm bind_value;         // Bind: IRI or slot
    std::string bind_var;           // Bind
    FilterExpr filter;              // Filter
    std::vector<Element> optional;  // Optional: the nested block

    bool operator==(const Element&) const = default;
};

struct GroupBlock {
    std::vector<Element> elements;
    bool operator==(const GroupBlock&) const = default;
};

struct Aggregate {
    std::string source_var;  // ?v inside GROUP_CONCAT
    std::string as_var;      // output column
    std::string separator;
    bool distinct = false;
    bool operator==(const Aggregate&) const = default;
};

struct OrderKey {
    std::string var;
    bool ascending = true;
    bool operator==(const OrderKey&) const = default;
};

struct QueryPlan {
    std::map<std::string, std::string> prefixes;
    std::vector<std::string> select_vars;  // output columns in SELECT order
    bool distinct = false;
    GroupBlock where;
    std::vector<std::string> group_by;
    std::vector<Aggregate> aggregates;  // each as_var appears in select_vars
    std::vector<OrderKey> order_by;

    bool operator==(const QueryPlan&) const = default;

    // Names of still-unbound template parameters, sorted, deduplicated.
    std::vector<std::string> slot_names() const;
};

struct ResultTable {
    std::vector<std::string> columns;
    using Row = std::vector<std::optional<rdf::Term>>;  // aligned with columns
    std::vector<Row> rows;
    std::vector<std::string> notes;  // logged evaluation warnings (type mismatches)

    std::optional<rdf::Term> cell(std::size_t row, const std::string& column) const;

    bool operator==(const ResultTable&) const = default;
};

}  // namespace graphtale::sparql
