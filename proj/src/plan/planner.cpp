#include "graphtale/plan/planner.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "graphtale/sparql/parser.hpp"
#include "graphtale/util/rng.hpp"
#include "json.hpp"

namespace graphtale::plan {

namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& file, const char* what) {
    std::ifstream in(file);
    if (!in) throw SchemaViolation(file.string(), std::string("cannot read ") + what);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaViolation(file.string(), e.what());
    }
}

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

Persona load_persona(const std::filesystem::path& file) {
    auto j = read_json(file, "persona");
    Persona p;
    p.id = file.stem().string();
    try {
        p.name = j.at("name").get<std::string>();
        for (const auto& t : j.at("tone")) p.tone.push_back(t.get<std::string>());
        p.dos = j.at("dos").get<std::string>();
        p.donts = j.at("donts").get<std::string>();
        p.reading_level = j.at("reading_level").get<std::string>();
        for (const auto& [tier, range] : j.at("target_words").items())
            p.target_words[tier] = {range.at(0).get<int>(), range.at(1).get<int>()};
    } catch (const json::exception& e) {
        throw SchemaViolation(file.string(), e.what());
    }
    if (p.tone.empty()) throw SchemaViolation(file.string(), "tone must be non-empty");
    if (p.reading_level.empty())
        throw SchemaViolation(file.string(), "reading_level must be non-empty");
    return p;
}

BeatTemplates load_beat_templates(const std::filesystem::path& file) {
    auto j = read_json(file, "beat templates");
    BeatTemplates out;
    try {
        for (const auto& [tier, tags] : j.items())
            for (const auto& tag : tags) out[tier].push_back(tag.get<std::string>());
    } catch (const json::exception& e) {
        throw SchemaViolation(file.string(), e.what());
    }
    return out;
}

SlotDomains load_slot_domains(const std::filesystem::path& file) {
    auto j = read_json(file, "slot domains");
    SlotDomains out;
    try {
        for (const auto& [slot, classes] : j.items())
            for (const auto& c : classes) out[slot].push_back(c.get<std::string>());
    } catch (const json::exception& e) {
        throw SchemaViolation(file.string(), e.what());
    }
    return out;
}

BeatPlan build_beat_plan(const Persona& persona, const std::string& length,
                         std::uint64_t seed, const cq::Library& library,
                         const rdf::Graph& graph, const BeatTemplates& templates,
                         const SlotDomains& domains) {
    auto tier = templates.find(length);
    if (tier == templates.end())
        throw SchemaViolation("length", "unknown length tier: " + length);

    util::SplitMix64 rng(seed);
    BeatPlan plan;
    plan.persona_id = persona.id;
    plan.length = length;
    plan.seed = seed;
    plan.created_at = utc_now();

    std::set<std::string> used;
    for (const auto& beat_tag : tier->second) {
        // Library order is sorted by id, so the candidate list is stable.
        std::vector<const cq::CQTemplate*> eligible;
        for (const auto& t : library.templates()) {
            if (used.count(t.id)) continue;
            if (std::find(t.personas.begin(), t.personas.end(), persona.id) ==
                t.personas.end())
                continue;
            if (std::find(t.beats.begin(), t.beats.end(), beat_tag) == t.beats.end())
                continue;
            eligible.push_back(&t);
        }
        if (eligible.empty()) throw NoEligibleCQ(beat_tag);
        const auto& tmpl = *eligible[rng.below(eligible.size())];
        used.insert(tmpl.id);

        std::map<std::string, std::string> bindings;
        for (const auto& slot : tmpl.slots) {
            auto domain = domains.find(slot.name);
            if (domain == domains.end()) throw NoCompatibleEntity(slot.name);
            std::set<std::string> pool;
            for (const auto& class_iri : domain->second)
                for (const auto& subject : graph.subjects_of_type(rdf::Term::iri(class_iri)))
                    pool.insert(subject.value);
            if (pool.empty()) throw NoCompatibleEntity(slot.name);
            std::vector<std::string> candidates(pool.begin(), pool.end());
            bindings[slot.name] = candidates[rng.below(candidates.size())];
        }

        PlannedBeat beat;
        beat.beat_tag = beat_tag;
        beat.bound_cq = cq::instantiate(library, tmpl.id, bindings, graph);
        plan.beats.push_back(std::move(beat));
    }
    return plan;
}

std::string serialize_plan(const BeatPlan& plan) {
    json j;
    j["persona_id"] = plan.persona_id;
    j["length"] = plan.length;
    j["seed"] = plan.seed;
    j["beats"] = json::array();
    for (const auto& beat : plan.beats) {
        json b;
        b["beat_tag"] = beat.beat_tag;
        b["cq_id"] = beat.bound_cq.template_id;
        b["bindings"] = json::object();
        for (const auto& [slot, iri] : beat.bound_cq.bindings) b["bindings"][slot] = iri;
        b["question"] = beat.bound_cq.question_text;
        j["beats"].push_back(std::move(b));
    }
    return j.dump(2) + "\n";
}

BeatPlan deserialize_plan(const std::string& text, const cq::Library& library) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaViolation("$", e.what());
    }
    if (!j.is_object()) throw SchemaViolation("$", "plan must be a JSON object");

    const std::set<std::string> top_fields{"persona_id", "length", "seed", "beats"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!top_fields.count(key)) throw SchemaViolation(key, "unknown field");
    }
    for (const auto& field : top_fields)
        if (!j.contains(field)) throw SchemaViolation(field, "missing field");

    BeatPlan plan;
    if (!j["persona_id"].is_string()) throw SchemaViolation("persona_id", "must be a string");
    plan.persona_id = j["persona_id"].get<std::string>();
    if (!j["length"].is_string()) throw SchemaViolation("length", "must be a string");
    plan.length = j["length"].get<std::string>();
    if (!j["seed"].is_number_unsigned())
        throw SchemaViolation("seed", "must be an unsigned integer");
    plan.seed = j["seed"].get<std::uint64_t>();
    if (!j["beats"].is_array()) throw SchemaViolation("beats", "must be an array");

    const std::set<std::string> beat_fields{"beat_tag", "cq_id", "bindings", "question"};
    std::size_t index = 0;
    for (const auto& b : j["beats"]) {
        std::string where = "beats[" + std::to_string(index) + "]";
        if (!b.is_object()) throw SchemaViolation(where, "must be an object");
        for (const auto& [key, value] : b.items()) {
            (void)value;
            if (!beat_fields.count(key)) throw SchemaViolation(where + "." + key, "unknown field");
        }
        for (const auto& field : beat_fields)
            if (!b.contains(field)) throw SchemaViolation(where + "." + field, "missing field");

        PlannedBeat beat;
        beat.beat_tag = b["beat_tag"].get<std::string>();
        beat.bound_cq.template_id = b["cq_id"].get<std::string>();
        const auto* tmpl = library.find(beat.bound_cq.template_id);
        if (!tmpl)
            throw SchemaViolation(where + ".cq_id",
                                  "unknown CQ id: " + beat.bound_cq.template_id);
        if (!b["bindings"].is_object())
            throw SchemaViolation(where + ".bindings", "must be an object");
        for (const auto& [slot, iri] : b["bindings"].items()) {
            if (!iri.is_string())
                throw SchemaViolation(where + ".bindings." + slot, "must be a string");
            beat.bound_cq.bindings[slot] = iri.get<std::string>();
        }
        std::vector<std::string> bound_names;
        for (const auto& [slot, iri] : beat.bound_cq.bindings) {
            (void)iri;
            bound_names.push_back(slot);
        }
        if (bound_names != tmpl->plan.slot_names())
            throw SchemaViolation(where + ".bindings",
                                  "bindings do not match template slots");
        beat.bound_cq.question_text = b["question"].get<std::string>();
        try {
            beat.bound_cq.bound_plan =
                sparql::bind_parameters(tmpl->plan, beat.bound_cq.bindings);
        } catch (const std::exception& e) {
            throw SchemaViolation(where + ".bindings", e.what());
        }
        plan.beats.push_back(std::move(beat));
        ++index;
    }
    return plan;
}

}  // namespace graphtale::plan
