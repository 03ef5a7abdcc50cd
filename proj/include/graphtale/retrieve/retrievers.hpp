#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/cq/library.hpp"
#include "graphtale/rdf/graph.hpp"
#include "graphtale/retrieve/pack.hpp"

namespace graphtale::retrieve {

struct MissingProvenance : std::runtime_error {
    std::string file;
    explicit MissingProvenance(std::string file_)
        : std::runtime_error("snippet missing provenance: " + file_), file(std::move(file_)) {}
};

// Lexical snippet store loaded from a directory of JSON files, each holding
// {id, text, source_url, access_date, entities}. Files without a non-empty
// source_url and access_date are rejected at load time.
class SnippetIndex {
public:
    static SnippetIndex build(const std::filesystem::path& directory);

    // Top-k snippets by content-token overlap with `text` (distinct shared
    // tokens). Zero-overlap snippets never match; ties break by id ascending.
    // Returned copies carry their score.
    std::vector<Snippet> query(const std::string& text, std::size_t k) const;

    std::size_t size() const { return snippets_.size(); }
    const std::vector<Snippet>& snippets() const { return snippets_; }

private:
    std::vector<Snippet> snippets_;  // sorted by id
    std::map<std::string, std::vector<std::size_t>> token_index_;
};

// Predicate IRI -> sentence template with {subject} / {object} placeholders.
using PredicateTemplates = std::map<std::string, std::string>;

PredicateTemplates load_predicate_templates(const std::filesystem::path& file);

struct GraphRagConfig {
    std::set<std::string> relation_allowlist;  // predicate IRIs, both directions
    int hop_limit = 1;                         // 1 or 2
    std::size_t node_cap = 64;                 // visited entity budget, seeds included
    std::uint64_t seed = 0;                    // drives cap truncation only
};

// Display label for verbalization and pack label tables: schema:name when
// present, otherwise the camel-split local name ("QueenMembership1" ->
// "Queen Membership 1"), so raw identifiers never reach generated text.
std::string readable_label(const rdf::Graph& graph, const rdf::Term& term);

// One factlet per triple via the template table, generic fallback
// "<subject>'s <predicate local name> was <object>". Self-naming triples
// (schema:name whose object equals the subject's label) are skipped.
std::vector<Factlet> verbalize_facts(const std::vector<rdf::Triple>& triples,
                                     const rdf::Graph& graph,
                                     const PredicateTemplates& templates);

// Executes the bound query; triples are the per-row instantiated patterns in
// row order, deduplicated and truncated to `cap`. One factlet per result row,
// kept only while at least one of its supporting triples survived the cap.
EvidencePack retrieve_kg(const cq::BoundCQ& cq, const rdf::Graph& graph, std::size_t cap = 25,
                         const std::string& query_file = "");

// The kg pack plus, when the question is flagged for enrichment, the top-k
// snippets scored against the realized question text. Triples, rows and
// factlets are identical to the kg pack under the same cap.
EvidencePack retrieve_hybrid(const cq::BoundCQ& cq, const rdf::Graph& graph,
                             const SnippetIndex& index, bool needs_enrichment,
                             std::size_t k = 3, std::size_t cap = 25,
                             const std::string& query_file = "");

// Query-less neighbourhood expansion from the bound entities: breadth-first
// over allowlisted predicates in both directions up to hop_limit, frontier
// ordered by IRI, visited set truncated at node_cap by a seeded draw. The
// subgraph over visited nodes is flattened into canonically sorted triples;
// result rows stay empty. No allowlisted edge at all yields an empty pack
// flagged sparse.
EvidencePack retrieve_graph(const cq::BoundCQ& cq, const rdf::Graph& graph,
                            const GraphRagConfig& config, const PredicateTemplates& templates);

}  // namespace graphtale::retrieve
