#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "graphtale/rdf/turtle.hpp"
#include "graphtale/sparql/engine.hpp"
#include "graphtale/sparql/parser.hpp"
#include "oracles/sparql_oracle.hpp"

using namespace graphtale::rdf;
using namespace graphtale::sparql;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string query_text(const std::string& cq_id) {
    return read_file(std::string(GRAPHTALE_ROOT) + "/assets/cq/queries/" + cq_id + ".rq");
}

const char* kBandFixture = R"(
@prefix schema: <http://schema.org/> .
@prefix mm: <https://w3id.org/polifonia/ontology/music-meta/> .
@prefix ex: <http://wembrewind.live/ex#> .
ex:TheBand a mm:MusicEnsemble ;
    schema:name "The Band" ;
    schema:foundingDate "1970" .
ex:m1 a mm:MusicEnsembleMembership ;
    mm:involvesMusicEnsemble ex:TheBand ;
    mm:involvesMemberOfMusicEnsemble ex:Alice ;
    ex:isOriginalMember true .
ex:m2 a mm:MusicEnsembleMembership ;
    mm:involvesMusicEnsemble ex:TheBand ;
    mm:involvesMemberOfMusicEnsemble ex:Bob ;
    ex:isOriginalMember true .
ex:m3 a mm:MusicEnsembleMembership ;
    mm:involvesMusicEnsemble ex:TheBand ;
    mm:involvesMemberOfMusicEnsemble ex:Carol ;
    ex:isOriginalMember false .
ex:Alice schema:name "Alice" .
ex:Bob schema:name "Bob" .
ex:Carol schema:name "Carol" .
)";

const char* kSetlistFixture = R"(
@prefix schema: <http://schema.org/> .
@prefix mm: <https://w3id.org/polifonia/ontology/music-meta/> .
@prefix ex: <http://wembrewind.live/ex#> .
ex:TheBand a mm:MusicEnsemble ; schema:name "The Band" .
ex:Fest schema:name "Fest" .
ex:perf1 a mm:LivePerformance ;
    schema:performer ex:TheBand ;
    schema:isPartOf ex:Fest ;
    ex:setList ex:sl1 .
ex:sl1 schema:itemListElement ex:li1 , ex:li2 , ex:li3 .
ex:li1 schema:item ex:songA ; schema:position 2 .
ex:li2 schema:item ex:songB ; schema:position 1 .
ex:li3 schema:item ex:songC ; schema:position 3 .
ex:songA schema:name "Song A" .
ex:songB schema:name "Song B" .
ex:songC schema:name "Song C" .
)";

const char* kAnnotationFixture = R"(
@prefix schema: <http://schema.org/> .
@prefix oa: <http://www.w3.org/ns/oa#> .
@prefix dct: <http://purl.org/dc/terms/> .
@prefix ex: <http://wembrewind.live/ex#> .
ex:LiveAid1985 schema:name "Live Aid 1985" .
ex:ann1 a oa:Annotation ;
    dct:subject ex:Performances ;
    schema:spatial ex:WembleyStadium ;
    oa:hasTarget ex:LiveAid1985 ;
    oa:hasBody ex:bg1 .
ex:bg1 oa:hasSource "https://example.org/review-1" ;
    oa:hasSelector ex:sel1 .
ex:sel1 oa:refinedBy ex:sub1 ;
    oa:exact "The crowd roared as the band took the stage" .
ex:sub1 oa:exact "band took the stage" ;
    oa:start 15 ;
    oa:end 34 .
ex:ann2 a oa:Annotation ;
    dct:subject ex:Performances ;
    schema:spatial ex:WembleyStadium ;
    oa:hasTarget ex:LiveAid1985 ;
    oa:hasBody ex:bg2 .
ex:bg2 oa:hasSource "https://example.org/review-2" ;
    oa:hasSelector ex:sel2 .
ex:sel2 oa:exact "A plain section selector with no refinement" .
)";

std::vector<ResultTable::Row> sorted_rows(const ResultTable& t) {
    auto rows = t.rows;
    std::sort(rows.begin(), rows.end());
    return rows;
}

void check_against_oracle(const QueryPlan& plan, const Graph& g) {
    ResultTable actual = execute(plan, g);
    ResultTable expected = oracle::evaluate(plan, g);
    REQUIRE(actual.columns == expected.columns);
    if (plan.order_by.empty()) {
        CHECK(sorted_rows(actual) == sorted_rows(expected));
    } else {
        CHECK(actual.rows == expected.rows);
    }
}

}  // namespace

TEST_CASE("setlist template parses with ascending position ordering") {
    QueryPlan plan = parse_query(query_text("CQ-L10"));
    REQUIRE(plan.order_by.size() == 1);
    CHECK(plan.order_by[0].var == "position");
    CHECK(plan.order_by[0].ascending);
    CHECK(plan.select_vars ==
          std::vector<std::string>{"eventName", "artistName", "song", "position"});
}

TEST_CASE("founding-members template parses with one GROUP_CONCAT aggregate") {
    QueryPlan plan = parse_query(query_text("CQ-L14"));
    REQUIRE(plan.aggregates.size() == 1);
    CHECK(plan.aggregates[0].source_var == "founderName");
    CHECK(plan.aggregates[0].as_var == "foundingMembers");
    CHECK(plan.aggregates[0].separator == ", ");
    CHECK(plan.aggregates[0].distinct);
    CHECK(plan.group_by == std::vector<std::string>{"artistName"});
    CHECK(plan.slot_names() == std::vector<std::string>{"musicgroup"});
}

TEST_CASE("minimal query with a repeated variable") {
    QueryPlan plan = parse_query("SELECT ?x WHERE { ?x ?x ?x }");
    REQUIRE(plan.where.elements.size() == 1);
    CHECK(plan.where.elements[0].kind == Element::Kind::Pattern);
    CHECK(plan.select_vars == std::vector<std::string>{"x"});

    Graph g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:a ex:a . ex:a ex:p ex:b .");
    auto table = execute(plan, g);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0][0] == Term::iri("http://e/a"));
}

TEST_CASE("bind_parameters injects the entity IRI and leaves the original intact") {
    QueryPlan plan = parse_query(query_text("CQ-L14"));
    QueryPlan bound = bind_parameters(plan, {{"musicgroup", "http://wembrewind.live/ex#Queen"}});
    CHECK(plan.slot_names() == std::vector<std::string>{"musicgroup"});
    CHECK(bound.slot_names().empty());
    bool found = false;
    for (const auto& el : bound.where.elements)
        if (el.kind == Element::Kind::Bind && el.bind_var == "artist") {
            CHECK(el.bind_value ==
                  PatternTerm::fixed(Term::iri("http://wembrewind.live/ex#Queen")));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("binding a plan without slots with an empty map is the identity") {
    QueryPlan plan = parse_query("SELECT ?x WHERE { ?x ?p ?o }");
    CHECK(bind_parameters(plan, {}) == plan);
}

TEST_CASE("partial bindings raise MissingBinding for the absent slot") {
    QueryPlan plan = parse_query(query_text("CQ-E3"));
    try {
        bind_parameters(plan, {{"event", "http://wembrewind.live/ex#LiveAid1985"}});
        FAIL("expected MissingBinding");
    } catch (const MissingBinding& e) {
        CHECK(e.slot == "venue");
    }
}

TEST_CASE("extraneous bindings raise UnknownSlot") {
    QueryPlan plan = parse_query(query_text("CQ-L14"));
    CHECK_THROWS_AS(bind_parameters(plan, {{"musicgroup", "http://e/q"}, {"venue", "http://e/v"}}),
                    UnknownSlot);
}

TEST_CASE("executing a plan with unbound slots raises MissingBinding") {
    QueryPlan plan = parse_query(query_text("CQ-L14"));
    Graph g = parse_turtle(kBandFixture);
    CHECK_THROWS_AS(execute(plan, g), MissingBinding);
}

TEST_CASE("founding members aggregate to an alphabetized list") {
    QueryPlan plan = bind_parameters(parse_query(query_text("CQ-L14")),
                                     {{"musicgroup", "http://wembrewind.live/ex#TheBand"}});
    Graph g = parse_turtle(kBandFixture);
    auto table = execute(plan, g);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.cell(0, "artistName") == Term::literal("The Band"));
    CHECK(table.cell(0, "foundingMembers") == Term::literal("Alice, Bob"));
    check_against_oracle(plan, g);
}

TEST_CASE("setlist rows come back in position order") {
    QueryPlan plan = bind_parameters(parse_query(query_text("CQ-L10")),
                                     {{"musicgroup", "http://wembrewind.live/ex#TheBand"},
                                      {"event", "http://wembrewind.live/ex#Fest"}});
    Graph g = parse_turtle(kSetlistFixture);
    auto table = execute(plan, g);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.cell(0, "song") == Term::literal("Song B"));
    CHECK(table.cell(1, "song") == Term::literal("Song A"));
    CHECK(table.cell(2, "song") == Term::literal("Song C"));
    CHECK(table.cell(0, "position") ==
          Term::typed_literal("1", std::string(iris::kXsdInteger)));
    check_against_oracle(plan, g);
}

TEST_CASE("annotation template walks the selector chain with optional refinement") {
    QueryPlan plan = bind_parameters(parse_query(query_text("CQ-E3")),
                                     {{"event", "http://wembrewind.live/ex#LiveAid1985"},
                                      {"venue", "http://wembrewind.live/ex#WembleyStadium"}});
    Graph g = parse_turtle(kAnnotationFixture);
    auto table = execute(plan, g);
    REQUIRE(table.rows.size() == 2);
    check_against_oracle(plan, g);

    // One row fully refined, one row with the optional part unbound.
    bool refined = false, unrefined = false;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        auto exact = table.cell(r, "exactSelector");
        auto refinedBy = table.cell(r, "refinedBy");
        if (exact && refinedBy) {
            CHECK(*refinedBy == Term::literal("band took the stage"));
            refined = true;
        }
        if (!exact && !refinedBy) unrefined = true;
    }
    CHECK(refined);
    CHECK(unrefined);
}

TEST_CASE("every template yields zero rows on an empty graph") {
    Graph empty = parse_turtle("");
    for (const char* id : {"CQ-L14", "CQ-E3", "CQ-L10"}) {
        QueryPlan plan = parse_query(query_text(id));
        std::map<std::string, std::string> bindings;
        for (const auto& slot : plan.slot_names()) bindings[slot] = "http://e/x";
        CHECK(execute(bind_parameters(plan, bindings), empty).rows.empty());
    }
}

TEST_CASE("engine matches the reference evaluator on ad-hoc queries") {
    Graph g = parse_turtle(std::string(kBandFixture) + kSetlistFixture + kAnnotationFixture);
    std::vector<std::string> queries = {
        "PREFIX schema: <http://schema.org/> SELECT DISTINCT ?p WHERE { ?s ?p ?o }",
        "PREFIX ex: <http://wembrewind.live/ex#> PREFIX mm: "
        "<https://w3id.org/polifonia/ontology/music-meta/> SELECT ?m WHERE { ?r "
        "mm:involvesMemberOfMusicEnsemble ?m . ?r ex:isOriginalMember ?flag . FILTER(?flag) }",
        "PREFIX ex: <http://wembrewind.live/ex#> PREFIX mm: "
        "<https://w3id.org/polifonia/ontology/music-meta/> SELECT ?m ?flag WHERE { ?r "
        "mm:involvesMemberOfMusicEnsemble ?m ; ex:isOriginalMember ?flag . "
        "FILTER(?flag = false) }",
        "PREFIX schema: <http://schema.org/> SELECT ?s ?n WHERE { ?s schema:name ?n . "
        "FILTER(?n != \"The Band\") }",
        "PREFIX schema: <http://schema.org/> PREFIX ex: <http://wembrewind.live/ex#> "
        "SELECT ?s ?n ?pos WHERE { ?s schema:item ?w . OPTIONAL { ?s schema:position ?pos } "
        "OPTIONAL { ?w schema:name ?n } }",
        "PREFIX schema: <http://schema.org/> SELECT ?a ?b WHERE { ?x schema:name ?a . "
        "OPTIONAL { ?x schema:foundingDate ?b } } ORDER BY DESC(?a)",
        "PREFIX mm: <https://w3id.org/polifonia/ontology/music-meta/> PREFIX schema: "
        "<http://schema.org/> SELECT ?band (GROUP_CONCAT(?n; separator=\"; \") AS ?members) "
        "WHERE { ?r mm:involvesMusicEnsemble ?band ; mm:involvesMemberOfMusicEnsemble ?m . "
        "?m schema:name ?n } GROUP BY ?band",
        "PREFIX schema: <http://schema.org/> SELECT ?x WHERE { ?x schema:position ?p } "
        "ORDER BY DESC(?p)",
        "PREFIX ex: <http://wembrewind.live/ex#> PREFIX mm: "
        "<https://w3id.org/polifonia/ontology/music-meta/> SELECT ?m WHERE { ?r "
        "mm:involvesMemberOfMusicEnsemble ?m ; ex:isOriginalMember ?f1 , ?f2 . "
        "FILTER((?f1 = ?f2) && ?f1) }",
    };
    for (const auto& q : queries) {
        CAPTURE(q);
        check_against_oracle(parse_query(q), g);
    }
}

TEST_CASE("DISTINCT is idempotent") {
    Graph g = parse_turtle(kSetlistFixture);
    auto table = execute(
        parse_query("PREFIX schema: <http://schema.org/> SELECT DISTINCT ?p WHERE { ?s ?p ?o }"),
        g);
    auto deduped = table.rows;
    std::set<ResultTable::Row> seen;
    std::vector<ResultTable::Row> twice;
    for (const auto& r : deduped)
        if (seen.insert(r).second) twice.push_back(r);
    CHECK(twice == table.rows);
}

TEST_CASE("bind_parameters equals textual slot substitution") {
    Graph g = parse_turtle(std::string(kBandFixture) + kSetlistFixture);
    std::map<std::string, std::string> bindings = {
        {"musicgroup", "http://wembrewind.live/ex#TheBand"},
        {"event", "http://wembrewind.live/ex#Fest"},
    };
    for (const char* id : {"CQ-L14", "CQ-L10"}) {
        std::string text = query_text(id);
        QueryPlan plan = parse_query(text);
        std::map<std::string, std::string> used;
        for (const auto& slot : plan.slot_names()) used[slot] = bindings.at(slot);
        ResultTable via_bind = execute(bind_parameters(plan, used), g);

        std::string substituted = text;
        for (const auto& [name, iri] : used) {
            std::string needle = "{" + name + "}";
            for (std::size_t at = substituted.find(needle); at != std::string::npos;
                 at = substituted.find(needle))
                substituted.replace(at, needle.size(), "<" + iri + ">");
        }
        ResultTable via_text = execute(parse_query(substituted), g);
        CHECK(via_bind.columns == via_text.columns);
        CHECK(via_bind.rows == via_text.rows);
    }
}

TEST_CASE("OPTIONAL never filters solutions away") {
    Graph g = parse_turtle(kAnnotationFixture);
    QueryPlan with_opt = bind_parameters(parse_query(query_text("CQ-E3")),
                                         {{"event", "http://wembrewind.live/ex#LiveAid1985"},
                                          {"venue", "http://wembrewind.live/ex#WembleyStadium"}});
    QueryPlan without = with_opt;
    std::erase_if(without.where.elements,
                  [](const Element& el) { return el.kind == Element::Kind::Optional; });
    auto rows_with = execute(with_opt, g).rows.size();
    auto rows_without = execute(without, g).rows.size();
    CHECK(rows_with >= rows_without);
    // Selector chains are one-to-one, so dropping the OPTIONAL block keeps
    // the row count unchanged on library fixtures.
    CHECK(rows_with == rows_without);
}

TEST_CASE("filters inside OPTIONAL act as join conditions") {
    Graph g = parse_turtle(kBandFixture);
    auto table = execute(
        parse_query("PREFIX schema: <http://schema.org/> PREFIX ex: <http://wembrewind.live/ex#> "
                    "PREFIX mm: <https://w3id.org/polifonia/ontology/music-meta/> "
                    "SELECT ?m ?flag WHERE { ?r mm:involvesMemberOfMusicEnsemble ?m . "
                    "OPTIONAL { ?r ex:isOriginalMember ?flag . FILTER(?flag = true) } }"),
        g);
    REQUIRE(table.rows.size() == 3);  // Carol's row survives with ?flag unbound
    int unbound = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        if (!table.cell(r, "flag")) ++unbound;
    CHECK(unbound == 1);
    check_against_oracle(
        parse_query("PREFIX schema: <http://schema.org/> PREFIX ex: <http://wembrewind.live/ex#> "
                    "PREFIX mm: <https://w3id.org/polifonia/ontology/music-meta/> "
                    "SELECT ?m ?flag WHERE { ?r mm:involvesMemberOfMusicEnsemble ?m . "
                    "OPTIONAL { ?r ex:isOriginalMember ?flag . FILTER(?flag = true) } }"),
        g);
}

TEST_CASE("type mismatches in FILTER drop rows and are logged") {
    Graph g = parse_turtle(kBandFixture);
    auto table = execute(
        parse_query("PREFIX schema: <http://schema.org/> SELECT ?s WHERE { ?s schema:name ?n . "
                    "FILTER(?s = \"The Band\") }"),
        g);
    CHECK(table.rows.empty());
    CHECK(!table.notes.empty());
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_query("SELECT ?x WHERE { ?x ?p }");
        FAIL("expected QuerySyntaxError");
    } catch (const QuerySyntaxError& e) {
        CHECK(e.position > 0);
        CHECK(!e.message.empty());
    }
    CHECK_THROWS_AS(parse_query("SELECT ?x { ?x <p> <o> . } GROUP BY"), QuerySyntaxError);
    CHECK_THROWS_AS(parse_query("SELECT ?missing WHERE { ?x <p> <o> . }"), QuerySyntaxError);
    CHECK_THROWS_AS(
        parse_query("SELECT ?x ?y WHERE { ?x <p> ?y . {dup} <q> {dup} . }"),
        QuerySyntaxError);
}

TEST_CASE("constructs outside the subset raise UnsupportedFeature") {
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { { ?x <p> ?y } UNION { ?x <q> ?y } }"),
                    UnsupportedFeature);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x <p> ?y . } LIMIT 5"), UnsupportedFeature);
    CHECK_THROWS_AS(parse_query("SELECT * WHERE { ?x <p> ?y . }"), UnsupportedFeature);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { SELECT ?x WHERE { ?x <p> ?y } }"),
                    UnsupportedFeature);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x <p>/<q> ?y . }"), UnsupportedFeature);
    CHECK_THROWS_AS(parse_query("SELECT (COUNT(?x) AS ?n) WHERE { ?x <p> ?y . }"),
                    UnsupportedFeature);
    CHECK_THROWS_AS(parse_query("SELECT ?x WHERE { ?x <p> ?y . FILTER(?y = <a> || ?y = <b>) }"),
                    UnsupportedFeature);
}

TEST_CASE("grouping validation rejects ungrouped selected variables") {
    CHECK_THROWS_AS(
        parse_query("SELECT ?a ?b WHERE { ?a <p> ?b . } GROUP BY ?a"),
        QuerySyntaxError);
}
