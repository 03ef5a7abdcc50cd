#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace graphtale::rdf {

namespace iris {
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline constexpr std::string_view kSchemaName = "http://schema.org/name";
inline constexpr std::string_view kOwlSameAs = "http://www.w3.org/2002/07/owl#sameAs";
}  // namespace iris

enum class TermKind { Iri, Blank, Literal };

// An RDF term. Literals carry at most one of datatype/language; IRIs and
// blank nodes carry neither. Comparison is exact lexical form plus datatype,
// no value-space canonicalization.
struct Term {
    TermKind kind = TermKind::Iri;
    std::string value;     // absolute IRI, blank label, or literal lexical form
    std::string datatype;  // datatype IRI for typed literals, else empty
    std::string language;  // BCP-47 tag for language literals, else empty

    auto operator<=>(const Term&) const = default;

    bool is_iri() const { return kind == TermKind::Iri; }
    bool is_blank() const { return kind == TermKind::Blank; }
    bool is_literal() const { return kind == TermKind::Literal; }

    static Term iri(std::string v) { return {TermKind::Iri, std::move(v), "", ""}; }
    static Term blank(std::string label) { return {TermKind::Blank, std::move(label), "", ""}; }
    static Term literal(std::string lex) { return {TermKind::Literal, std::move(lex), "", ""}; }
    static Term typed_literal(std::string lex, std::string dt) {
        return {TermKind::Literal, std::move(lex), std::move(dt), ""};
    }
    static Term lang_literal(std::string lex, std::string lang) {
        return {TermKind::Literal, std::move(lex), "", std::move(lang)};
    }
    static Term boolean(bool b) {
        return typed_literal(b ? "true" : "false", std::string(iris::kXsdBoolean));
    }

    // Fragment after the last '#' or '/', the IRI's local name.
    std::string local_name() const;

    // N-Triples style rendering, used for diagnostics and serialization.
    std::string to_ntriples() const;
};

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    auto operator<=>(const Triple&) const = default;
    std::string to_ntriples() const;
};

}  // namespace graphtale::rdf
