#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/cq/library.hpp"
#include "graphtale/rdf/graph.hpp"

namespace graphtale::validate {

struct RegistryError : std::runtime_error {
    explicit RegistryError(const std::string& message)
        : std::runtime_error("vocabulary registry: " + message) {}
};

struct FixtureError : std::runtime_error {
    explicit FixtureError(const std::string& message)
        : std::runtime_error("fixture bindings: " + message) {}
};

// The namespaces a graph release may draw its vocabulary from. When a
// namespace carries declared_terms, membership is checked per term;
// otherwise any IRI under the prefix is accepted.
struct VocabularyRegistry {
    std::set<std::string> namespaces;
    std::map<std::string, std::set<std::string>> declared_terms;

    static VocabularyRegistry load(const std::string& file);
};

// Per-CQ binding sets the coverage gate executes. Every listed binding set
// must yield at least one row.
using FixtureBindings = std::map<std::string, std::vector<std::map<std::string, std::string>>>;

FixtureBindings load_fixture_bindings(const std::string& file);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::vector<std::string> findings;

    bool operator==(const CheckResult&) const = default;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool overall = false;  // pass iff all checks pass

    bool operator==(const ValidationReport&) const = default;
};

// Every predicate IRI and every rdf:type object IRI must fall inside a
// registered namespace (and its declared term list when one is given).
// Findings name each offending term once, with its smallest example triple.
CheckResult check_schema_conformance(const rdf::Graph& graph,
                                     const VocabularyRegistry& registry);

// (a) subjects under the pattern's literal IRI prefix must match the full
// pattern; (b) distinct IRIs sharing identical label and type sets without an
// owl:sameAs link are flagged as duplication suspects; (c) owl:sameAs targets
// must be IRIs in a recognized external namespace.
extern const std::set<std::string> kDefaultExternalNamespaces;  // wikidata, musicbrainz
CheckResult check_identifier_integrity(
    const rdf::Graph& graph, const std::string& iri_pattern,
    const std::set<std::string>& external_namespaces = kDefaultExternalNamespaces);

// Every template must execute without error and return >= 1 row for each of
// its fixture binding sets. An empty library passes vacuously with a warning.
CheckResult check_cq_coverage(const rdf::Graph& graph, const cq::Library& library,
                              const FixtureBindings& fixture);

// The three checks in fixed order; overall pass requires all of them.
ValidationReport run_gate(const rdf::Graph& graph, const VocabularyRegistry& registry,
                          const std::string& iri_pattern, const cq::Library& library,
                          const FixtureBindings& fixture);

std::string report_to_json(const ValidationReport& report);

}  // namespace graphtale::validate
