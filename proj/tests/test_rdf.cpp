#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "graphtale/rdf/graph.hpp"
#include "graphtale/rdf/turtle.hpp"
#include "graphtale/util/rng.hpp"

using namespace graphtale::rdf;
using graphtale::util::SplitMix64;

namespace {

Term iri(const std::string& s) { return Term::iri(s); }

// Reference implementation for match(): scan every triple and test each
// bound position directly.
std::vector<Triple> linear_scan(const Graph& g, const TermPattern& s, const TermPattern& p,
                                const TermPattern& o) {
    std::vector<Triple> out;
    for (const auto& t : g.triples()) {
        if (s && t.subject != *s) continue;
        if (p && t.predicate != *p) continue;
        if (o && t.object != *o) continue;
        out.push_back(t);
    }
    return out;
}

std::vector<Triple> sorted(std::vector<Triple> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("empty document parses to an empty graph") {
    Graph g = parse_turtle("");
    CHECK(g.size() == 0);
    CHECK(g.profile() == GraphProfile{});
}

TEST_CASE("prefix expansion produces absolute IRIs") {
    Graph g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ex:b .");
    REQUIRE(g.size() == 1);
    auto ts = g.triples();
    CHECK(ts[0].subject == iri("http://e/a"));
    CHECK(ts[0].predicate == iri("http://e/p"));
    CHECK(ts[0].object == iri("http://e/b"));
}

TEST_CASE("universal pattern returns every triple") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:a ex:p ex:b .\n"
        "ex:b ex:p ex:c .\n"
        "ex:c ex:q ex:a .\n");
    CHECK(g.match(std::nullopt, std::nullopt, std::nullopt).size() == 3);
}

TEST_CASE("dual-typed subject matches two type triples") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "@prefix schema: <http://schema.org/> .\n"
        "@prefix mm: <https://w3id.org/polifonia/ontology/music-meta/> .\n"
        "ex:queen a schema:MusicGroup, mm:MusicEnsemble .\n");
    auto rows = g.match(iri("http://e/queen"), iri(std::string(iris::kRdfType)), std::nullopt);
    CHECK(rows.size() == 2);
}

TEST_CASE("pattern with absent object matches nothing") {
    Graph g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ex:b .");
    CHECK(g.match(std::nullopt, iri("http://e/p"), iri("http://e/missing")).empty());
}

TEST_CASE("profile of a dual-typing fixture") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n"
        "ex:a rdf:type ex:C1 .\n"
        "ex:a rdf:type ex:C2 .\n");
    auto p = g.profile();
    CHECK(p.total_triples == 2);
    CHECK(p.distinct_classes == 2);
    CHECK(p.distinct_predicates_excl_type == 0);
    CHECK(p.typed_subjects == 1);
    CHECK(p.dual_typed_subjects == 1);
}

TEST_CASE("profile counts ordinary predicates separately from rdf:type") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:a a ex:C1 .\n"
        "ex:a ex:p ex:b ;\n"
        "     ex:q \"v\" .\n"
        "ex:b a ex:C1 .\n");
    auto p = g.profile();
    CHECK(p.total_triples == 4);
    CHECK(p.distinct_classes == 1);
    CHECK(p.distinct_predicates_excl_type == 2);
    CHECK(p.typed_subjects == 2);
    CHECK(p.dual_typed_subjects == 0);
}

TEST_CASE("profile invariants hold on parsed fixtures") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:a a ex:C1 , ex:C2 .\n"
        "ex:b a ex:C1 .\n"
        "ex:c ex:p ex:a .\n");
    auto p = g.profile();
    CHECK(p.dual_typed_subjects <= p.typed_subjects);
    CHECK(p.typed_subjects <= p.total_triples);
}

TEST_CASE("duplicate triples are stored once") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:a ex:p ex:b .\n"
        "ex:a ex:p ex:b .\n");
    CHECK(g.size() == 1);
}

TEST_CASE("the a keyword expands to rdf:type") {
    Graph g = parse_turtle("@prefix ex: <http://e/> . ex:x a ex:C .");
    auto ts = g.triples();
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].predicate.value == iris::kRdfType);
}

TEST_CASE("predicate and object lists expand to individual triples") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:s ex:p ex:a , ex:b ;\n"
        "     ex:q ex:c .\n");
    CHECK(g.size() == 3);
    CHECK(g.contains({iri("http://e/s"), iri("http://e/p"), iri("http://e/a")}));
    CHECK(g.contains({iri("http://e/s"), iri("http://e/p"), iri("http://e/b")}));
    CHECK(g.contains({iri("http://e/s"), iri("http://e/q"), iri("http://e/c")}));
}

TEST_CASE("comments are ignored") {
    Graph g = parse_turtle(
        "# leading comment\n"
        "@prefix ex: <http://e/> . # trailing\n"
        "ex:a ex:p ex:b . # done\n");
    CHECK(g.size() == 1);
}

TEST_CASE("literal forms parse with datatype and language") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
        "ex:s ex:plain \"hello\" ;\n"
        "     ex:lang \"bonjour\"@fr ;\n"
        "     ex:typed \"1985-07-13\"^^xsd:date ;\n"
        "     ex:int 42 ;\n"
        "     ex:dec 3.5 ;\n"
        "     ex:dbl 1.0e3 ;\n"
        "     ex:neg -7 ;\n"
        "     ex:flag true ;\n"
        "     ex:esc \"line\\nbreak \\\"quoted\\\"\" .\n");
    auto value_of = [&](const std::string& pred) {
        auto rows = g.match(std::nullopt, iri("http://e/" + pred), std::nullopt);
        REQUIRE(rows.size() == 1);
        return rows[0].object;
    };
    CHECK(value_of("plain") == Term::literal("hello"));
    CHECK(value_of("lang") == Term::lang_literal("bonjour", "fr"));
    CHECK(value_of("typed") ==
          Term::typed_literal("1985-07-13", "http://www.w3.org/2001/XMLSchema#date"));
    CHECK(value_of("int") == Term::typed_literal("42", std::string(iris::kXsdInteger)));
    CHECK(value_of("dec") == Term::typed_literal("3.5", std::string(iris::kXsdDecimal)));
    CHECK(value_of("dbl") == Term::typed_literal("1.0e3", std::string(iris::kXsdDouble)));
    CHECK(value_of("neg") == Term::typed_literal("-7", std::string(iris::kXsdInteger)));
    CHECK(value_of("flag") == Term::boolean(true));
    CHECK(value_of("esc") == Term::literal("line\nbreak \"quoted\""));
}

TEST_CASE("literal comparison is lexical, not value-space") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:a ex:p 1 .\n"
        "ex:b ex:p 01 .\n");
    auto one = g.match(std::nullopt, std::nullopt,
                       Term::typed_literal("1", std::string(iris::kXsdInteger)));
    CHECK(one.size() == 1);
    CHECK(one[0].subject == iri("http://e/a"));
}

TEST_CASE("labelled blank nodes are preserved") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "_:n1 ex:p ex:a .\n"
        "_:n1 ex:q _:n2 .\n");
    CHECK(g.size() == 2);
    auto rows = g.match(Term::blank("n1"), std::nullopt, std::nullopt);
    CHECK(rows.size() == 2);
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_turtle("@prefix ex: <http://e/> .\nex:a ex:p .\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);
        CHECK(e.column > 1);
    }
}

TEST_CASE("undeclared prefix raises UnknownPrefix") {
    try {
        parse_turtle("ex:a ex:p ex:b .");
        FAIL("expected UnknownPrefix");
    } catch (const UnknownPrefix& e) {
        CHECK(e.prefix == "ex");
        CHECK(e.line == 1);
    }
}

TEST_CASE("constructs outside the subset raise UnsupportedSyntax") {
    CHECK_THROWS_AS(parse_turtle("@prefix ex: <http://e/> . ex:a ex:p [ ex:q ex:b ] ."),
                    UnsupportedSyntax);
    CHECK_THROWS_AS(parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ( ex:b ex:c ) ."),
                    UnsupportedSyntax);
    CHECK_THROWS_AS(parse_turtle("@base <http://e/> ."), UnsupportedSyntax);
    CHECK_THROWS_AS(parse_turtle("@prefix ex: <http://e/> . ex:a ex:p \"\"\"long\"\"\" ."),
                    UnsupportedSyntax);
}

TEST_CASE("match agrees with a linear-scan oracle on randomized patterns") {
    SplitMix64 rng(0x5eedu);
    Graph g;
    std::vector<Term> nodes;
    for (int i = 0; i < 8; ++i) nodes.push_back(iri("http://e/n" + std::to_string(i)));
    std::vector<Term> preds;
    for (int i = 0; i < 4; ++i) preds.push_back(iri("http://e/p" + std::to_string(i)));
    for (int i = 0; i < 120; ++i)
        g.add({nodes[rng.below(nodes.size())], preds[rng.below(preds.size())],
               nodes[rng.below(nodes.size())]});
    g.freeze();

    auto pick = [&](const std::vector<Term>& pool) -> TermPattern {
        if (rng.below(3) == 0) return std::nullopt;
        return pool[rng.below(pool.size())];
    };
    for (int trial = 0; trial < 200; ++trial) {
        TermPattern s = pick(nodes), p = pick(preds), o = pick(nodes);
        CHECK(sorted(g.match(s, p, o)) == sorted(linear_scan(g, s, p, o)));
    }
}

TEST_CASE("serialization round-trip preserves the triple set") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
        "ex:s ex:p ex:a , ex:b ;\n"
        "     ex:n \"Queen\" ;\n"
        "     ex:langd \"reine\"@fr ;\n"
        "     ex:count 3 ;\n"
        "     ex:ok true .\n"
        "_:b ex:p ex:s .\n");
    Graph back = parse_turtle(g.to_turtle());
    CHECK(sorted(g.triples()) == sorted(back.triples()));
}

TEST_CASE("profile is invariant under document reordering") {
    std::vector<std::string> lines = {
        "ex:a a ex:C1 .", "ex:a a ex:C2 .",      "ex:b ex:p ex:a .",
        "ex:c ex:q 5 .",  "ex:b a ex:C1 .",      "ex:a ex:p ex:c .",
        "ex:d ex:r \"x\" .", "ex:c a ex:C3 .",
    };
    auto build = [&](const std::vector<std::string>& order) {
        std::string doc = "@prefix ex: <http://e/> .\n";
        for (const auto& l : order) doc += l + "\n";
        return parse_turtle(doc).profile();
    };
    auto base = build(lines);
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto shuffled = lines;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        CHECK(build(shuffled) == base);
    }
}

TEST_CASE("subjects_of_type returns sorted subjects") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "ex:zeta a ex:C .\n"
        "ex:alpha a ex:C .\n"
        "ex:mid a ex:OtherC .\n");
    auto subs = g.subjects_of_type(iri("http://e/C"));
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].value == "http://e/alpha");
    CHECK(subs[1].value == "http://e/zeta");
}

TEST_CASE("label picks the smallest schema:name and display_name falls back") {
    Graph g = parse_turtle(
        "@prefix ex: <http://e/> .\n"
        "@prefix schema: <http://schema.org/> .\n"
        "ex:q schema:name \"Queen\" .\n"
        "ex:q schema:name \"Queen (band)\" .\n");
    CHECK(g.label(iri("http://e/q")) == std::string("Queen"));
    CHECK(g.display_name(iri("http://e/q")) == "Queen");
    CHECK(g.display_name(iri("http://e/unlabelled")) == "unlabelled");
    CHECK(!g.label(iri("http://e/unlabelled")).has_value());
}

TEST_CASE("mentions distinguishes node occurrence from predicates") {
    Graph g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ex:b .");
    CHECK(g.mentions(iri("http://e/a")));
    CHECK(g.mentions(iri("http://e/b")));
    CHECK(!g.mentions(iri("http://e/p")));
    CHECK(!g.mentions(iri("http://e/absent")));
}
