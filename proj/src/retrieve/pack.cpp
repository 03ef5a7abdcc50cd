#include "graphtale/retrieve/pack.hpp"

#include "graphtale/text/tokens.hpp"
#include "json.hpp"

namespace graphtale::retrieve {

namespace {

using nlohmann::json;
using rdf::Term;
using rdf::TermKind;

json term_to_json(const Term& t) {
    json j;
    switch (t.kind) {
        case TermKind::Iri: j["kind"] = "iri"; break;
        case TermKind::Blank: j["kind"] = "blank"; break;
        case TermKind::Literal: j["kind"] = "literal"; break;
    }
    j["value"] = t.value;
    if (!t.datatype.empty()) j["datatype"] = t.datatype;
    if (!t.language.empty()) j["language"] = t.language;
    return j;
}

Term term_from_json(const json& j) {
    Term t;
    std::string kind = j.at("kind");
    t.kind = kind == "iri" ? TermKind::Iri : kind == "blank" ? TermKind::Blank : TermKind::Literal;
    t.value = j.at("value");
    if (j.contains("datatype")) t.datatype = j.at("datatype");
    if (j.contains("language")) t.language = j.at("language");
    return t;
}

json triple_to_json(const rdf::Triple& t) {
    return json::array({term_to_json(t.subject), term_to_json(t.predicate), term_to_json(t.object)});
}

rdf::Triple triple_from_json(const json& j) {
    return {term_from_json(j.at(0)), term_from_json(j.at(1)), term_from_json(j.at(2))};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> EvidencePack::labelled_entities() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [iri, label] : entity_labels) {
        out.emplace_back(iri, label);
        std::string split = text::camel_split(label);
        if (split != label) out.emplace_back(iri, split);
    }
    return out;
}

std::string pack_to_json(const EvidencePack& pack) {
    json j;
    j["beat_index"] = pack.beat_index;
    j["cq_id"] = pack.cq_id;
    j["strategy"] = pack.strategy;
    j["sparse"] = pack.sparse;
    j["query_file"] = pack.query_file;
    j["bound_entities"] = pack.bound_entities;
    j["entity_labels"] = pack.entity_labels;

    json triples = json::array();
    for (const auto& t : pack.triples) triples.push_back(triple_to_json(t));
    j["triples"] = std::move(triples);
    j["triple_provenance"] = pack.triple_provenance;

    json table;
    table["columns"] = pack.result_rows.columns;
    json rows = json::array();
    for (const auto& row : pack.result_rows.rows) {
        json cells = json::array();
        for (const auto& cell : row) cells.push_back(cell ? term_to_json(*cell) : json(nullptr));
        rows.push_back(std::move(cells));
    }
    table["rows"] = std::move(rows);
    table["notes"] = pack.result_rows.notes;
    j["result_rows"] = std::move(table);

    json snippets = json::array();
    for (const auto& s : pack.snippets) {
        json sj;
        sj["id"] = s.id;
        sj["text"] = s.text;
        sj["source_url"] = s.source_url;
        sj["access_date"] = s.access_date;
        sj["entity_iris"] = s.entity_iris;
        sj["score"] = s.score;
        snippets.push_back(std::move(sj));
    }
    j["snippets"] = std::move(snippets);

    json factlets = json::array();
    for (const auto& f : pack.factlets) {
        json fj;
        fj["text"] = f.text;
        json items = json::array();
        for (const auto& ref : f.supporting_items) {
            json rj;
            rj["kind"] = ref.kind == SupportRef::Kind::Triple ? "triple" : "snippet";
            rj["index"] = ref.index;
            items.push_back(std::move(rj));
        }
        fj["supporting_items"] = std::move(items);
        factlets.push_back(std::move(fj));
    }
    j["factlets"] = std::move(factlets);
    return j.dump();
}

EvidencePack pack_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    EvidencePack pack;
    pack.beat_index = j.at("beat_index");
    pack.cq_id = j.at("cq_id");
    pack.strategy = j.at("strategy");
    pack.sparse = j.at("sparse");
    pack.query_file = j.at("query_file");
    pack.bound_entities = j.at("bound_entities").get<std::map<std::string, std::string>>();
    pack.entity_labels = j.at("entity_labels").get<std::map<std::string, std::string>>();
    for (const auto& tj : j.at("triples")) pack.triples.push_back(triple_from_json(tj));
    pack.triple_provenance = j.at("triple_provenance").get<std::vector<std::string>>();

    const json& table = j.at("result_rows");
    pack.result_rows.columns = table.at("columns").get<std::vector<std::string>>();
    for (const auto& rj : table.at("rows")) {
        sparql::ResultTable::Row row;
        for (const auto& cell : rj)
            row.push_back(cell.is_null() ? std::nullopt
                                         : std::optional<rdf::Term>(term_from_json(cell)));
        pack.result_rows.rows.push_back(std::move(row));
    }
    pack.result_rows.notes = table.at("notes").get<std::vector<std::string>>();

    for (const auto& sj : j.at("snippets")) {
        Snippet s;
        s.id = sj.at("id");
        s.text = sj.at("text");
        s.source_url = sj.at("source_url");
        s.access_date = sj.at("access_date");
        s.entity_iris = sj.at("entity_iris").get<std::vector<std::string>>();
        s.score = sj.at("score");
        pack.snippets.push_back(std::move(s));
    }
    for (const auto& fj : j.at("factlets")) {
        Factlet f;
        f.text = fj.at("text");
        for (const auto& rj : fj.at("supporting_items")) {
            SupportRef ref;
            ref.kind = rj.at("kind") == "triple" ? SupportRef::Kind::Triple
                                                 : SupportRef::Kind::Snippet;
            ref.index = rj.at("index");
            f.supporting_items.push_back(ref);
        }
        pack.factlets.push_back(std::move(f));
    }
    return pack;
}

}  // namespace graphtale::retrieve
