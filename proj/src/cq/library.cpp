#include "graphtale/cq/library.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "graphtale/sparql/parser.hpp"
#include "json.hpp"

namespace graphtale::cq {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::set<std::string> kManifestFields{
    "id", "question", "slots", "query", "beats", "personas", "needs_enrichment"};

CQTemplate parse_entry(const json& entry, const std::filesystem::path& directory) {
    if (!entry.is_object()) throw ManifestError("manifest entries must be objects");
    for (const auto& [key, value] : entry.items()) {
        (void)value;
        if (!kManifestFields.count(key))
            throw ManifestError("unknown manifest field: " + key);
    }
    for (const auto& field : kManifestFields)
        if (!entry.contains(field))
            throw ManifestError("manifest entry missing field: " + field);

    CQTemplate t;
    t.id = entry.at("id").get<std::string>();
    t.question = entry.at("question").get<std::string>();
    for (const auto& slot : entry.at("slots")) {
        ParameterSlot p;
        p.name = slot.at("name").get<std::string>();
        p.marker = slot.at("marker").get<std::string>();
        t.slots.push_back(std::move(p));
    }
    t.query_file = entry.at("query").get<std::string>();
    for (const auto& b : entry.at("beats")) t.beats.push_back(b.get<std::string>());
    for (const auto& p : entry.at("personas")) t.personas.push_back(p.get<std::string>());
    t.needs_enrichment = entry.at("needs_enrichment").get<bool>();

    auto query_path = directory / t.query_file;
    if (!std::filesystem::exists(query_path))
        throw ManifestError("query file missing for " + t.id + ": " + t.query_file);
    t.query_text = read_file(query_path);
    try {
        t.plan = sparql::parse_query(t.query_text);
    } catch (const sparql::QuerySyntaxError& e) {
        throw sparql::QuerySyntaxError(e.position,
                                       std::string(e.what()) + " (in " + t.id + ")");
    }

    // The declared slots must match the query placeholders exactly, and each
    // declared marker must appear in the question text.
    std::vector<std::string> declared;
    for (const auto& s : t.slots) declared.push_back(s.name);
    std::sort(declared.begin(), declared.end());
    if (std::adjacent_find(declared.begin(), declared.end()) != declared.end())
        throw SlotMismatch(t.id, "duplicate slot name");
    auto placeholders = t.plan.slot_names();
    if (declared != placeholders) {
        std::string detail = "declared {";
        for (const auto& d : declared) detail += d + " ";
        detail += "} vs query {";
        for (const auto& p : placeholders) detail += p + " ";
        detail += "}";
        throw SlotMismatch(t.id, detail);
    }
    for (const auto& s : t.slots)
        if (t.question.find("[" + s.marker + "]") == std::string::npos)
            throw SlotMismatch(t.id, "marker [" + s.marker + "] not in question");
    return t;
}

}  // namespace

Library Library::load(const std::filesystem::path& directory) {
    Library lib;
    lib.directory_ = directory;
    auto manifest_path = directory / "cq_manifest.json";
    if (!std::filesystem::exists(manifest_path)) return lib;

    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ManifestError(std::string("invalid manifest JSON: ") + e.what());
    }
    if (!manifest.is_array()) throw ManifestError("manifest must be a JSON array");

    std::set<std::string> seen;
    try {
        for (const auto& entry : manifest) {
            auto t = parse_entry(entry, directory);
            if (!seen.insert(t.id).second) throw ManifestError("duplicate id: " + t.id);
            lib.templates_.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw ManifestError(std::string("malformed manifest entry: ") + e.what());
    }
    std::sort(lib.templates_.begin(), lib.templates_.end(),
              [](const CQTemplate& a, const CQTemplate& b) { return a.id < b.id; });
    return lib;
}

const CQTemplate* Library::find(const std::string& cq_id) const {
    for (const auto& t : templates_)
        if (t.id == cq_id) return &t;
    return nullptr;
}

const CQTemplate& Library::require(const std::string& cq_id) const {
    const auto* t = find(cq_id);
    if (!t) throw UnknownCQ(cq_id);
    return *t;
}

BoundCQ instantiate(const Library& library, const std::string& cq_id,
                    const std::map<std::string, std::string>& bindings,
                    const rdf::Graph& graph) {
    const auto& tmpl = library.require(cq_id);

    BoundCQ bound;
    bound.template_id = cq_id;
    bound.bindings = bindings;
    bound.question_text = tmpl.question;

    for (const auto& slot : tmpl.slots) {
        auto it = bindings.find(slot.name);
        if (it == bindings.end()) throw sparql::MissingBinding(slot.name);
        const auto& iri = it->second;
        auto term = rdf::Term::iri(iri);
        if (!graph.mentions(term)) throw EntityNotInGraph(iri);
        std::string label = graph.display_name(term);
        std::string marker = "[" + slot.marker + "]";
        std::size_t pos;
        while ((pos = bound.question_text.find(marker)) != std::string::npos)
            bound.question_text.replace(pos, marker.size(), label);
    }

    // Markers without a declared slot name the question's target, not a
    // parameter ("Which [Artist] performed..."); realize them as plain words.
    std::size_t open;
    while ((open = bound.question_text.find('[')) != std::string::npos) {
        std::size_t close = bound.question_text.find(']', open);
        if (close == std::string::npos) break;
        std::string word = bound.question_text.substr(open + 1, close - open - 1);
        for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        bound.question_text.replace(open, close - open + 1, word);
    }

    bound.bound_plan = sparql::bind_parameters(tmpl.plan, bindings);
    return bound;
}

}  // namespace graphtale::cq
