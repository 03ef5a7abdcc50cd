#include "graphtale/retrieve/retrievers.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "graphtale/sparql/engine.hpp"
#include "graphtale/text/tokens.hpp"
#include "graphtale/util/rng.hpp"
#include "json.hpp"

namespace graphtale::retrieve {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("invalid JSON in " + file.string() + ": " + e.what());
    }
}

// Literal lexical form for values, display label for entities.
std::string render(const rdf::Graph& graph, const rdf::Term& term) {
    if (term.is_literal()) return term.value;
    return readable_label(graph, term);
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos;
         pos += to.size()) {
        text.replace(pos, from.size(), to);
    }
    return text;
}

// "foundingMembers" -> "founding members"
std::string humanize_column(const std::string& column) {
    return text::lowercase(text::camel_split(column));
}

bool plural_column(const std::string& humanized) {
    return !humanized.empty() && humanized.back() == 's';
}

// One sentence per row: "The artist name was X; the founding members were Y."
std::string verbalize_row(const sparql::ResultTable& table, std::size_t row,
                          const rdf::Graph& graph) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const auto& cell = table.rows[row][c];
        if (!cell) continue;
        std::string name = humanize_column(table.columns[c]);
        if (!out.empty()) out += "; ";
        out += "the " + name + (plural_column(name) ? " were " : " was ") + render(graph, *cell);
    }
    if (out.empty()) return out;
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    if (out.back() != '.' && out.back() != '!' && out.back() != '?') out += '.';
    return out;
}

void collect_entity_labels(EvidencePack& pack, const rdf::Graph& graph) {
    auto note = [&](const rdf::Term& t) {
        if (t.is_iri()) pack.entity_labels[t.value] = readable_label(graph, t);
    };
    for (const auto& [slot, iri] : pack.bound_entities) note(rdf::Term::iri(iri));
    for (const auto& t : pack.triples) {
        note(t.subject);
        note(t.object);
    }
    for (const auto& row : pack.result_rows.rows)
        for (const auto& cell : row)
            if (cell) note(*cell);
    for (const auto& s : pack.snippets)
        for (const auto& iri : s.entity_iris) note(rdf::Term::iri(iri));
}

}  // namespace

std::string readable_label(const rdf::Graph& graph, const rdf::Term& term) {
    if (term.is_literal()) return term.value;
    if (auto label = graph.label(term)) return *label;
    return text::camel_split(term.local_name());
}

SnippetIndex SnippetIndex::build(const fs::path& directory) {
    SnippetIndex index;
    if (!fs::exists(directory)) return index;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        json j = read_json_file(file);
        Snippet s;
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
            !j.contains("text") || !j["text"].is_string())
            throw std::runtime_error("snippet missing id/text: " + file.string());
        s.id = j["id"].get<std::string>();
        s.text = j["text"].get<std::string>();
        if (!j.contains("source_url") || !j["source_url"].is_string() ||
            j["source_url"].get<std::string>().empty() || !j.contains("access_date") ||
            !j["access_date"].is_string() || j["access_date"].get<std::string>().empty())
            throw MissingProvenance(file.string());
        s.source_url = j["source_url"].get<std::string>();
        s.access_date = j["access_date"].get<std::string>();
        if (j.contains("entities"))
            for (const auto& e : j["entities"]) s.entity_iris.push_back(e.get<std::string>());
        index.snippets_.push_back(std::move(s));
    }

    std::sort(index.snippets_.begin(), index.snippets_.end(),
              [](const Snippet& a, const Snippet& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < index.snippets_.size(); ++i)
        if (index.snippets_[i].id == index.snippets_[i - 1].id)
            throw std::runtime_error("duplicate snippet id: " + index.snippets_[i].id);

    for (std::size_t i = 0; i < index.snippets_.size(); ++i)
        for (const auto& token :
             text::content_token_set(index.snippets_[i].text, text::default_stopwords()))
            index.token_index_[token].push_back(i);
    return index;
}

std::vector<Snippet> SnippetIndex::query(const std::string& text, std::size_t k) const {
    std::vector<std::size_t> overlap(snippets_.size(), 0);
    for (const auto& token : text::content_token_set(text, text::default_stopwords())) {
        auto it = token_index_.find(token);
        if (it == token_index_.end()) continue;
        for (std::size_t i : it->second) ++overlap[i];
    }
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < snippets_.size(); ++i)
        if (overlap[i] > 0) hits.push_back(i);
    std::sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
        if (overlap[a] != overlap[b]) return overlap[a] > overlap[b];
        return snippets_[a].id < snippets_[b].id;
    });
    if (hits.size() > k) hits.resize(k);

    std::vector<Snippet> out;
    for (std::size_t i : hits) {
        Snippet s = snippets_[i];
        s.score = static_cast<double>(overlap[i]);
        out.push_back(std::move(s));
    }
    return out;
}

PredicateTemplates load_predicate_templates(const fs::path& file) {
    json j = read_json_file(file);
    if (!j.is_object()) throw std::runtime_error("template table must be an object: " + file.string());
    PredicateTemplates table;
    for (const auto& [iri, tmpl] : j.items()) {
        if (!tmpl.is_string()) throw std::runtime_error("template for " + iri + " must be a string");
        auto text = tmpl.get<std::string>();
        if (text.find("{subject}") == std::string::npos ||
            text.find("{object}") == std::string::npos)
            throw std::runtime_error("template for " + iri +
                                     " must mention {subject} and {object}");
        table[iri] = text;
    }
    return table;
}

std::vector<Factlet> verbalize_facts(const std::vector<rdf::Triple>& triples,
                                     const rdf::Graph& graph,
                                     const PredicateTemplates& templates) {
    std::vector<Factlet> out;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const auto& t = triples[i];
        std::string subject = readable_label(graph, t.subject);
        std::string object = render(graph, t.object);
        if (t.predicate.value == rdf::iris::kSchemaName && t.object.is_literal() &&
            subject == t.object.value)
            continue;  // "Queen was called Queen" adds nothing
        std::string text;
        if (auto it = templates.find(t.predicate.value); it != templates.end()) {
            text = replace_all(replace_all(it->second, "{subject}", subject), "{object}", object);
        } else {
            text = subject + "'s " + t.predicate.local_name() + " was " + object + ".";
        }
        out.push_back(Factlet{std::move(text), {SupportRef{SupportRef::Kind::Triple, i}}});
    }
    return out;
}

EvidencePack retrieve_kg(const cq::BoundCQ& cq, const rdf::Graph& graph, std::size_t cap,
                         const std::string& query_file) {
    EvidencePack pack;
    pack.cq_id = cq.template_id;
    pack.strategy = "kg";
    pack.bound_entities = cq.bindings;
    pack.query_file = query_file;

    auto traced = sparql::execute_traced(cq.bound_plan, graph);
    pack.result_rows = traced.table;

    // Distinct evidence triples in row order, truncated to the cap.
    std::map<rdf::Triple, std::size_t> index_of;
    for (const auto& row : traced.row_triples) {
        for (const auto& t : row) {
            if (index_of.count(t)) continue;
            if (pack.triples.size() >= cap) continue;
            index_of.emplace(t, pack.triples.size());
            pack.triples.push_back(t);
            pack.triple_provenance.push_back(cq.template_id);
        }
    }

    for (std::size_t r = 0; r < traced.table.rows.size(); ++r) {
        std::string text = verbalize_row(traced.table, r, graph);
        if (text.empty()) continue;
        std::vector<SupportRef> support;
        std::set<std::size_t> seen;
        for (const auto& t : traced.row_triples[r]) {
            auto it = index_of.find(t);
            if (it == index_of.end() || !seen.insert(it->second).second) continue;
            support.push_back(SupportRef{SupportRef::Kind::Triple, it->second});
        }
        if (support.empty()) continue;  // all of this row's evidence fell past the cap
        std::sort(support.begin(), support.end(),
                  [](const SupportRef& a, const SupportRef& b) { return a.index < b.index; });
        pack.factlets.push_back(Factlet{std::move(text), std::move(support)});
    }

    pack.sparse = pack.result_rows.rows.empty();
    collect_entity_labels(pack, graph);
    return pack;
}

EvidencePack retrieve_hybrid(const cq::BoundCQ& cq, const rdf::Graph& graph,
                             const SnippetIndex& index, bool needs_enrichment, std::size_t k,
                             std::size_t cap, const std::string& query_file) {
    EvidencePack pack = retrieve_kg(cq, graph, cap, query_file);
    pack.strategy = "hybrid";
    if (needs_enrichment) {
        pack.snippets = index.query(cq.question_text, k);
        collect_entity_labels(pack, graph);
    }
    return pack;
}

EvidencePack retrieve_graph(const cq::BoundCQ& cq, const rdf::Graph& graph,
                            const GraphRagConfig& config, const PredicateTemplates& templates) {
    EvidencePack pack;
    pack.cq_id = cq.template_id;
    pack.strategy = "graph";
    pack.bound_entities = cq.bindings;

    util::SplitMix64 rng(config.seed);
    auto truncate = [&](std::vector<rdf::Term>& candidates, std::size_t room) {
        if (candidates.size() <= room) return;
        if (room == 0) {
            candidates.clear();
            return;
        }
        // Contiguous window of the IRI-sorted candidates; the seeded draw
        // picks its offset.
        auto start = static_cast<std::size_t>(rng.below(candidates.size() - room + 1));
        candidates = {candidates.begin() + static_cast<std::ptrdiff_t>(start),
                      candidates.begin() + static_cast<std::ptrdiff_t>(start + room)};
    };

    std::vector<rdf::Term> frontier;
    for (const auto& [slot, iri] : cq.bindings) frontier.push_back(rdf::Term::iri(iri));
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    truncate(frontier, config.node_cap);

    std::set<rdf::Term> visited(frontier.begin(), frontier.end());
    std::map<rdf::Triple, int> found_at;  // earliest hop of each edge

    for (int depth = 1; depth <= config.hop_limit && !frontier.empty(); ++depth) {
        std::vector<rdf::Triple> pending;
        std::set<rdf::Term> discovered;
        for (const auto& node : frontier) {
            for (const auto& predicate : config.relation_allowlist) {
                auto p = rdf::Term::iri(predicate);
                for (auto& t : graph.match(node, p, std::nullopt)) {
                    if (!t.object.is_literal() && !visited.count(t.object))
                        discovered.insert(t.object);
                    pending.push_back(std::move(t));
                }
                for (auto& t : graph.match(std::nullopt, p, node)) {
                    if (!visited.count(t.subject)) discovered.insert(t.subject);
                    pending.push_back(std::move(t));
                }
            }
        }
        std::vector<rdf::Term> accepted(discovered.begin(), discovered.end());
        truncate(accepted, config.node_cap - visited.size());
        visited.insert(accepted.begin(), accepted.end());

        // Keep only edges whose entity endpoints are all in the visited set;
        // literal objects belong to their subject and always pass.
        for (const auto& t : pending) {
            if (!visited.count(t.subject)) continue;
            if (!t.object.is_literal() && !visited.count(t.object)) continue;
            found_at.emplace(t, depth);
        }
        frontier = std::move(accepted);
    }

    for (const auto& [triple, depth] : found_at) {  // std::map: canonical order
        pack.triples.push_back(triple);
        pack.triple_provenance.push_back("hop:" + std::to_string(depth));
    }
    pack.factlets = verbalize_facts(pack.triples, graph, templates);
    pack.sparse = pack.triples.empty();
    collect_entity_labels(pack, graph);
    return pack;
}

}  // namespace graphtale::retrieve
