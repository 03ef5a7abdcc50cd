#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphtale/rdf/term.hpp"

namespace graphtale::rdf {

struct GraphProfile {
    std::size_t total_triples = 0;
    std::size_t distinct_classes = 0;
    std::size_t distinct_predicates_excl_type = 0;
    std::size_t typed_subjects = 0;
    std::size_t dual_typed_subjects = 0;

    bool operator==(const GraphProfile&) const = default;
};

// A pattern position: either a concrete term or a wildcard.
using TermPattern = std::optional<Term>;

// Immutable, interned in-memory triple store with SPO/POS/OSP orderings.
// Construction is single-threaded; after load any number of readers may
// query concurrently.
class Graph {
public:
    Graph() = default;

    // Builder interface, used by the Turtle parser and by test fixtures.
    void add(Triple t);
    void add_prefix(const std::string& prefix, const std::string& base);
    void freeze();  // sorts and deduplicates; idempotent

    std::size_t size() const { return spo_.size(); }
    const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

    // All triples matching the concrete positions, in the order of the most
    // selective index. Deterministic for a fixed graph.
    std::vector<Triple> match(const TermPattern& s, const TermPattern& p,
                              const TermPattern& o) const;
    bool contains(const Triple& t) const;

    // True when the term occurs as a subject or object of some triple.
    bool mentions(const Term& t) const;

    std::vector<Triple> triples() const;  // SPO order

    // Distinct terms appearing anywhere in the graph, sorted.
    std::vector<Term> terms() const;

    // Subjects with an rdf:type triple for the given class, sorted by IRI.
    std::vector<Term> subjects_of_type(const Term& class_iri) const;

    // Lexicographically smallest schema:name literal for the term, if any.
    std::optional<std::string> label(const Term& t) const;

    // Label when present, otherwise the IRI local name (or lexical form).
    std::string display_name(const Term& t) const;

    GraphProfile profile() const;

    // Turtle serialization: prefix directives plus one triple per line with
    // absolute IRIs. Reparsing yields a set-equal triple set.
    std::string to_turtle() const;

private:
    struct IdTriple {
        std::uint32_t s, p, o;
        auto operator<=>(const IdTriple&) const = default;
    };

    std::uint32_t intern(const Term& t);
    std::optional<std::uint32_t> find_id(const Term& t) const;
    Triple materialize(const IdTriple& t) const;
    void ensure_frozen() const;

    std::vector<Term> terms_;
    std::map<Term, std::uint32_t> ids_;
    mutable std::vector<IdTriple> spo_, pos_, osp_;
    std::map<std::string, std::string> prefixes_;
    mutable bool frozen_ = false;
};

}  // namespace graphtale::rdf
