#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "graphtale/rdf/term.hpp"
#include "graphtale/sparql/ast.hpp"

namespace graphtale::retrieve {

struct Snippet {
    std::string id;
    std::string text;
    std::string source_url;
    std::string access_date;  // ISO date
    std::vector<std::string> entity_iris;
    double score = 0.0;  // lexical relevance, computed at query time

    bool operator==(const Snippet&) const = default;
};

// Reference from a factlet into the pack's triples or snippets.
struct SupportRef {
    enum class Kind { Triple, Snippet };
    Kind kind = Kind::Triple;
    std::size_t index = 0;

    bool operator==(const SupportRef&) const = default;
};

struct Factlet {
    std::string text;  // one-sentence verbalization
    std::vector<SupportRef> supporting_items;

    bool operator==(const Factlet&) const = default;
};

// The shared output schema of all three retrieval strategies.
struct EvidencePack {
    int beat_index = 0;
    std::string cq_id;
    std::string strategy;              // "kg" | "hybrid" | "graph"
    std::vector<rdf::Triple> triples;  // capped
    sparql::ResultTable result_rows;   // kg/hybrid only
    std::vector<Snippet> snippets;     // hybrid only
    std::vector<Factlet> factlets;
    std::vector<std::string> triple_provenance;         // aligned with triples
    std::map<std::string, std::string> bound_entities;  // slot name -> IRI
    std::map<std::string, std::string> entity_labels;   // IRI -> display label
    bool sparse = false;
    std::string query_file;

    bool operator==(const EvidencePack&) const = default;

    // Display labels (with camel-case-split variants) for every entity the
    // pack knows about; the evaluator's mention detection runs over these.
    std::vector<std::pair<std::string, std::string>> labelled_entities() const;
};

// Canonical JSON round-trip; serialization is byte-stable for equal packs.
std::string pack_to_json(const EvidencePack& pack);
EvidencePack pack_from_json(const std::string& json_text);

}  // namespace graphtale::retrieve
