#include "graphtale/rdf/term.hpp"

namespace graphtale::rdf {

namespace {

std::string escape_literal(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string Term::local_name() const {
    if (kind != TermKind::Iri) return value;
    auto hash = value.find_last_of('#');
    if (hash != std::string::npos && hash + 1 < value.size()) return value.substr(hash + 1);
    auto slash = value.find_last_of('/');
    if (slash != std::string::npos && slash + 1 < value.size()) return value.substr(slash + 1);
    return value;
}

std::string Term::to_ntriples() const {
    switch (kind) {
        case TermKind::Iri: return "<" + value + ">";
        case TermKind::Blank: return "_:" + value;
        case TermKind::Literal: break;
    }
    std::string out = "\"" + escape_literal(value) + "\"";
    if (!language.empty())
        out += "@" + language;
    else if (!datatype.empty())
        out += "^^<" + datatype + ">";
    return out;
}

std::string Triple::to_ntriples() const {
    return subject.to_ntriples() + " " + predicate.to_ntriples() + " " + object.to_ntriples() + " .";
}

}  // namespace graphtale::rdf
