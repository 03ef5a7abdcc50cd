#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphtale/cq/library.hpp"
#include "graphtale/rdf/graph.hpp"

namespace graphtale::plan {

struct NoEligibleCQ : std::runtime_error {
    std::string beat_tag;
    explicit NoEligibleCQ(std::string tag)
        : std::runtime_error("no eligible competency question for beat: " + tag),
          beat_tag(std::move(tag)) {}
};

struct NoCompatibleEntity : std::runtime_error {
    std::string slot;
    explicit NoCompatibleEntity(std::string slot_)
        : std::runtime_error("no type-compatible entity for slot: " + slot_),
          slot(std::move(slot_)) {}
};

struct SchemaViolation : std::runtime_error {
    std::string path;
    SchemaViolation(std::string path_, const std::string& message)
        : std::runtime_error("plan schema violation at " + path_ + ": " + message),
          path(std::move(path_)) {}
};

struct Persona {
    std::string id;
    std::string name;
    std::vector<std::string> tone;
    std::string dos;
    std::string donts;
    std::string reading_level;
    std::map<std::string, std::pair<int, int>> target_words;  // tier -> (min, max)
};

// Length tier -> ordered beat tags.
using BeatTemplates = std::map<std::string, std::vector<std::string>>;
// Slot name -> class IRIs whose union forms the candidate pool.
using SlotDomains = std::map<std::string, std::vector<std::string>>;

Persona load_persona(const std::filesystem::path& file);
BeatTemplates load_beat_templates(const std::filesystem::path& file);
SlotDomains load_slot_domains(const std::filesystem::path& file);

struct PlannedBeat {
    std::string beat_tag;
    cq::BoundCQ bound_cq;
};

struct BeatPlan {
    std::string persona_id;
    std::string length;  // Small | Medium | Long
    std::uint64_t seed = 0;
    std::vector<PlannedBeat> beats;
    std::string created_at;  // informational; excluded from the canonical form
};

// Deterministic: identical inputs and seed give byte-identical serialized
// plans. Draws go through a single seeded generator in beat order.
BeatPlan build_beat_plan(const Persona& persona, const std::string& length,
                         std::uint64_t seed, const cq::Library& library,
                         const rdf::Graph& graph, const BeatTemplates& templates,
                         const SlotDomains& domains);

// Canonical JSON: sorted keys, no volatile fields; equality of plans is
// equality of bytes.
std::string serialize_plan(const BeatPlan& plan);

// Structural validation plus rebinding against the library's query templates.
BeatPlan deserialize_plan(const std::string& text, const cq::Library& library);

}  // namespace graphtale::plan
