#include "graphtale/validate/validator.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "graphtale/sparql/engine.hpp"
#include "json.hpp"

namespace graphtale::validate {

namespace {

constexpr std::string_view kRdfType = rdf::iris::kRdfType;
constexpr std::string_view kSchemaName = rdf::iris::kSchemaName;
constexpr std::string_view kOwlSameAs = rdf::iris::kOwlSameAs;

bool looks_like_iri_base(const std::string& prefix) {
    static const std::regex scheme(R"(^[A-Za-z][A-Za-z0-9+.\-]*:.+)");
    return std::regex_match(prefix, scheme);
}

// True when the IRI sits inside some registered namespace and, if that
// namespace declares explicit terms, names one of them.
bool term_registered(const std::string& iri, const VocabularyRegistry& registry) {
    for (const auto& ns : registry.namespaces) {
        if (!iri.starts_with(ns)) continue;
        auto it = registry.declared_terms.find(ns);
        if (it == registry.declared_terms.end() || it->second.empty()) return true;
        if (it->second.count(iri.substr(ns.size()))) return true;
    }
    return false;
}

// The literal IRI prefix a regular expression starts with: characters up to
// the first unescaped metacharacter, with escapes resolved.
std::string regex_literal_prefix(const std::string& pattern) {
    static const std::string meta = ".[](){}*+?|^$";
    std::string prefix;
    std::size_t i = 0;
    if (!pattern.empty() && pattern[0] == '^') i = 1;
    for (; i < pattern.size(); ++i) {
        char c = pattern[i];
        if (c == '\\' && i + 1 < pattern.size()) {
            prefix += pattern[++i];
            continue;
        }
        if (meta.find(c) != std::string::npos) break;
        prefix += c;
    }
    return prefix;
}

std::string describe_bindings(const std::map<std::string, std::string>& bindings) {
    std::string out = "{";
    bool first = true;
    for (const auto& [slot, value] : bindings) {
        if (!first) out += ", ";
        out += slot + "=" + value;
        first = false;
    }
    return out + "}";
}

}  // namespace

const std::set<std::string> kDefaultExternalNamespaces = {
    "http://www.wikidata.org/entity/",
    "https://www.wikidata.org/entity/",
    "http://musicbrainz.org/",
    "https://musicbrainz.org/",
};

VocabularyRegistry VocabularyRegistry::load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw RegistryError("cannot open " + file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw RegistryError(file + ": " + e.what());
    }

    VocabularyRegistry registry;
    for (const auto& ns : j.at("namespaces")) registry.namespaces.insert(ns.get<std::string>());
    if (j.contains("declared_terms"))
        for (const auto& [ns, terms] : j.at("declared_terms").items())
            for (const auto& term : terms)
                registry.declared_terms[ns].insert(term.get<std::string>());

    if (registry.namespaces.empty()) throw RegistryError("namespaces must be non-empty");
    for (const auto& ns : registry.namespaces)
        if (!looks_like_iri_base(ns)) throw RegistryError("not an absolute IRI base: " + ns);
    for (const auto& [ns, terms] : registry.declared_terms)
        if (!registry.namespaces.count(ns))
            throw RegistryError("declared_terms for unregistered namespace: " + ns);
    return registry;
}

FixtureBindings load_fixture_bindings(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw FixtureError("cannot open " + file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FixtureError(file + ": " + e.what());
    }

    FixtureBindings fixture;
    for (const auto& [cq_id, sets] : j.items()) {
        for (const auto& bindings : sets) {
            std::map<std::string, std::string> set;
            for (const auto& [slot, value] : bindings.items())
                set[slot] = value.get<std::string>();
            fixture[cq_id].push_back(std::move(set));
        }
        if (fixture[cq_id].empty())
            throw FixtureError(cq_id + " has an empty binding list");
    }
    return fixture;
}

CheckResult check_schema_conformance(const rdf::Graph& graph,
                                     const VocabularyRegistry& registry) {
    CheckResult result;
    result.name = "schema-conformance";

    // Smallest example triple per offender keeps findings independent of
    // input order.
    std::map<std::string, rdf::Triple> bad_predicates;
    std::map<std::string, rdf::Triple> bad_classes;
    for (const auto& t : graph.triples()) {
        const std::string& p = t.predicate.value;
        if (!term_registered(p, registry)) {
            auto [it, fresh] = bad_predicates.try_emplace(p, t);
            if (!fresh && t < it->second) it->second = t;
        }
        if (p == kRdfType && t.object.is_iri() &&
            !term_registered(t.object.value, registry)) {
            auto [it, fresh] = bad_classes.try_emplace(t.object.value, t);
            if (!fresh && t < it->second) it->second = t;
        }
    }

    for (const auto& [iri, example] : bad_predicates)
        result.findings.push_back("undeclared predicate " + iri +
                                  "; example: " + example.to_ntriples());
    for (const auto& [iri, example] : bad_classes)
        result.findings.push_back("undeclared class " + iri +
                                  "; example: " + example.to_ntriples());
    result.passed = result.findings.empty();
    return result;
}

CheckResult check_identifier_integrity(const rdf::Graph& graph,
                                       const std::string& iri_pattern,
                                       const std::set<std::string>& external_namespaces) {
    CheckResult result;
    result.name = "identifier-integrity";
    const std::regex re(iri_pattern);
    const std::string project_prefix = regex_literal_prefix(iri_pattern);

    std::set<std::string> subjects;
    for (const auto& t : graph.triples())
        if (t.subject.is_iri()) subjects.insert(t.subject.value);

    // (a) project identifiers follow the pattern.
    for (const auto& iri : subjects)
        if (!project_prefix.empty() && iri.starts_with(project_prefix) &&
            !std::regex_match(iri, re))
            result.findings.push_back("irregular identifier " + iri);

    // (b) identical label + type sets without a sameAs link.
    using Signature = std::pair<std::set<std::string>, std::set<std::string>>;
    std::map<Signature, std::vector<std::string>> groups;
    for (const auto& iri : subjects) {
        const rdf::Term subject = rdf::Term::iri(iri);
        std::set<std::string> labels;
        for (const auto& t :
             graph.match(subject, rdf::Term::iri(std::string(kSchemaName)), std::nullopt))
            if (t.object.is_literal()) labels.insert(t.object.value);
        if (labels.empty()) continue;
        std::set<std::string> types;
        for (const auto& t :
             graph.match(subject, rdf::Term::iri(std::string(kRdfType)), std::nullopt))
            types.insert(t.object.value);
        groups[{std::move(labels), std::move(types)}].push_back(iri);
    }
    auto linked = [&](const std::string& a, const std::string& b) {
        const rdf::Term same = rdf::Term::iri(std::string(kOwlSameAs));
        return graph.contains({rdf::Term::iri(a), same, rdf::Term::iri(b)}) ||
               graph.contains({rdf::Term::iri(b), same, rdf::Term::iri(a)});
    };
    for (const auto& [signature, members] : groups) {
        if (members.size() < 2) continue;
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t k = i + 1; k < members.size(); ++k)
                if (!linked(members[i], members[k]))
                    result.findings.push_back(
                        "possible duplicate entities " + members[i] + " and " + members[k] +
                        " (identical labels and types, no owl:sameAs)");
    }

    // (c) sameAs targets resolve to recognized external namespaces.
    for (const auto& t : graph.match(std::nullopt, rdf::Term::iri(std::string(kOwlSameAs)),
                                     std::nullopt)) {
        bool recognized = t.object.is_iri() &&
                          std::any_of(external_namespaces.begin(), external_namespaces.end(),
                                      [&](const std::string& ns) {
                                          return t.object.value.starts_with(ns);
                                      });
        if (!recognized)
            result.findings.push_back("owl:sameAs target " + t.object.to_ntriples() +
                                      " is not a recognized external identifier (subject " +
                                      t.subject.value + ")");
    }

    std::sort(result.findings.begin(), result.findings.end());
    result.passed = result.findings.empty();
    return result;
}

CheckResult check_cq_coverage(const rdf::Graph& graph, const cq::Library& library,
                              const FixtureBindings& fixture) {
    CheckResult result;
    result.name = "cq-coverage";

    if (library.templates().empty()) {
        result.findings.push_back("warning: library is empty; coverage passes vacuously");
        result.passed = true;
        return result;
    }

    bool failed = false;
    for (const auto& tmpl : library.templates()) {
        auto it = fixture.find(tmpl.id);
        if (it == fixture.end() || it->second.empty()) {
            result.findings.push_back(tmpl.id + " has no fixture bindings");
            failed = true;
            continue;
        }
        for (const auto& bindings : it->second) {
            try {
                auto bound = cq::instantiate(library, tmpl.id, bindings, graph);
                auto table = sparql::execute(bound.bound_plan, graph);
                if (table.rows.empty()) {
                    result.findings.push_back(tmpl.id + " returned 0 rows for " +
                                              describe_bindings(bindings));
                    failed = true;
                }
            } catch (const std::exception& e) {
                result.findings.push_back(tmpl.id + " failed: " + e.what());
                failed = true;
            }
        }
    }
    for (const auto& [cq_id, sets] : fixture)
        if (!library.find(cq_id))
            result.findings.push_back("warning: fixture binds unknown template " + cq_id);

    result.passed = !failed;
    return result;
}

ValidationReport run_gate(const rdf::Graph& graph, const VocabularyRegistry& registry,
                          const std::string& iri_pattern, const cq::Library& library,
                          const FixtureBindings& fixture) {
    ValidationReport report;
    report.checks.push_back(check_schema_conformance(graph, registry));
    report.checks.push_back(check_identifier_integrity(graph, iri_pattern));
    report.checks.push_back(check_cq_coverage(graph, library, fixture));
    report.overall = std::all_of(report.checks.begin(), report.checks.end(),
                                 [](const CheckResult& c) { return c.passed; });
    return report;
}

std::string report_to_json(const ValidationReport& report) {
    nlohmann::ordered_json j;
    j["overall"] = report.overall ? "pass" : "fail";
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& check : report.checks) {
        nlohmann::ordered_json c;
        c["name"] = check.name;
        c["status"] = check.passed ? "pass" : "fail";
        c["findings"] = check.findings;
        j["checks"].push_back(std::move(c));
    }
    return j.dump(2) + "\n";
}

}  // namespace graphtale::validate
