#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/rdf/graph.hpp"
#include "graphtale/sparql/ast.hpp"

namespace graphtale::cq {

struct ManifestError : std::runtime_error {
    explicit ManifestError(const std::string& message)
        : std::runtime_error("manifest error: " + message) {}
};

struct SlotMismatch : std::runtime_error {
    std::string cq_id;
    explicit SlotMismatch(std::string id, const std::string& detail)
        : std::runtime_error("slot mismatch in " + id + ": " + detail), cq_id(std::move(id)) {}
};

struct UnknownCQ : std::runtime_error {
    std::string cq_id;
    explicit UnknownCQ(std::string id)
        : std::runtime_error("unknown competency question: " + id), cq_id(std::move(id)) {}
};

struct EntityNotInGraph : std::runtime_error {
    std::string iri;
    explicit EntityNotInGraph(std::string iri_)
        : std::runtime_error("entity not present in graph: " + iri_), iri(std::move(iri_)) {}
};

// One parameter of a question template: `name` is the placeholder used in the
// query text ({name}), `marker` the bracketed token in the question ([Marker]).
struct ParameterSlot {
    std::string name;
    std::string marker;

    bool operator==(const ParameterSlot&) const = default;
};

struct CQTemplate {
    std::string id;  // CQ-[EL]<number>
    std::string question;
    std::vector<ParameterSlot> slots;
    std::string query_file;  // manifest-relative path
    std::string query_text;
    sparql::QueryPlan plan;
    std::vector<std::string> beats;
    std::vector<std::string> personas;
    bool needs_enrichment = false;

    bool operator==(const CQTemplate&) const = default;
};

struct BoundCQ {
    std::string template_id;
    std::map<std::string, std::string> bindings;  // slot name -> IRI
    std::string question_text;
    sparql::QueryPlan bound_plan;
};

class Library {
public:
    // Templates sorted by id. An empty/missing directory yields an empty
    // library; a malformed manifest throws.
    static Library load(const std::filesystem::path& directory);

    const std::vector<CQTemplate>& templates() const { return templates_; }
    const CQTemplate& require(const std::string& cq_id) const;
    const CQTemplate* find(const std::string& cq_id) const;
    const std::filesystem::path& directory() const { return directory_; }

private:
    std::vector<CQTemplate> templates_;
    std::filesystem::path directory_;
};

// Realizes the question text against graph labels and binds the query plan.
BoundCQ instantiate(const Library& library, const std::string& cq_id,
                    const std::map<std::string, std::string>& bindings,
                    const rdf::Graph& graph);

}  // namespace graphtale::cq
