#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "graphtale/rdf/graph.hpp"

namespace graphtale::rdf {

struct SyntaxError : std::runtime_error {
    SyntaxError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line;
    std::size_t column;
    std::string message;
};

struct UnknownPrefix : std::runtime_error {
    UnknownPrefix(std::string prefix, std::size_t line, std::size_t column);
    std::string prefix;
    std::size_t line;
    std::size_t column;
};

// Raised on Turtle constructs outside the supported subset (blank-node
// property lists, collections, @base). Failing loudly beats mis-parsing.
struct UnsupportedSyntax : std::runtime_error {
    UnsupportedSyntax(std::size_t line, std::size_t column, const std::string& construct);
    std::size_t line;
    std::size_t column;
    std::string construct;
};

// Parses the supported Turtle subset: @prefix, prefixed names, absolute
// IRIs, the 'a' keyword, string/typed/language/numeric/boolean literals,
// predicate lists (';'), object lists (','), labelled blank nodes, comments.
Graph parse_turtle(std::string_view document);

Graph parse_turtle_file(const std::string& path);

}  // namespace graphtale::rdf
