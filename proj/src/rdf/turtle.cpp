#include "graphtale/rdf/turtle.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace graphtale::rdf {

namespace {
std::string at(std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}
}  // namespace

SyntaxError::SyntaxError(std::size_t line_, std::size_t column_, const std::string& message_)
    : std::runtime_error("turtle syntax error at " + at(line_, column_) + ": " + message_),
      line(line_),
      column(column_),
      message(message_) {}

UnknownPrefix::UnknownPrefix(std::string prefix_, std::size_t line_, std::size_t column_)
    : std::runtime_error("unknown prefix '" + prefix_ + ":' at " + at(line_, column_)),
      prefix(std::move(prefix_)),
      line(line_),
      column(column_) {}

UnsupportedSyntax::UnsupportedSyntax(std::size_t line_, std::size_t column_,
                                     const std::string& construct_)
    : std::runtime_error("unsupported turtle construct at " + at(line_, column_) + ": " +
                         construct_),
      line(line_),
      column(column_),
      construct(construct_) {}

namespace {

bool is_pn_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Graph parse() {
        Graph g;
        for (;;) {
            skip_ws();
            if (at_end()) break;
            if (peek() == '@') {
                directive(g);
                continue;
            }
            statement(g);
        }
        g.freeze();
        return g;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;

    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw SyntaxError(line_, column_, message);
    }

    [[noreturn]] void unsupported(const std::string& construct) const {
        throw UnsupportedSyntax(line_, column_, construct);
    }

    void skip_ws() {
        while (!at_end()) {
            char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    void expect(char c, const std::string& what) {
        if (at_end() || peek() != c) fail("expected '" + std::string(1, c) + "' " + what);
        advance();
    }

    void directive(Graph& g) {
        int at_line = line_, at_col = column_;
        advance();  // '@'
        std::string word;
        while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) word += advance();
        if (word == "base")
            throw UnsupportedSyntax(at_line, at_col, "@base directive");
        if (word != "prefix") fail("unknown directive '@" + word + "'");
        skip_ws();
        std::string prefix;
        while (!at_end() && peek() != ':') {
            char c = peek();
            if (!is_pn_char(c)) fail("invalid character in prefix name");
            prefix += advance();
        }
        expect(':', "after prefix name");
        skip_ws();
        if (at_end() || peek() != '<') fail("expected IRI after @prefix");
        std::string base = iri_ref();
        skip_ws();
        expect('.', "after @prefix directive");
        g.add_prefix(prefix, base);
        prefixes_[prefix] = base;
    }

    std::string iri_ref() {
        expect('<', "to open IRI");
        std::string iri;
        while (!at_end() && peek() != '>') {
            char c = advance();
            if (c == '\n') fail("newline inside IRI");
            iri += c;
        }
        expect('>', "to close IRI");
        return iri;
    }

    Term prefixed_name() {
        int name_line = line_, name_col = column_;
        std::string prefix;
        while (!at_end() && peek() != ':') {
            if (!is_pn_char(peek())) fail("invalid character in prefixed name");
            prefix += advance();
        }
        expect(':', "in prefixed name");
        std::string local;
        while (!at_end() && is_pn_char(peek())) {
            // A '.' only belongs to the local name when followed by another
            // name character; otherwise it terminates the statement.
            if (peek() == '.' && !is_pn_char(peek(1))) break;
            local += advance();
        }
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end()) throw UnknownPrefix(prefix, name_line, name_col);
        return Term::iri(it->second + local);
    }

    Term string_literal() {
        if (peek() == '"' && peek(1) == '"' && peek(2) == '"')
            unsupported("triple-quoted string literal");
        expect('"', "to open string literal");
        std::string value;
        for (;;) {
            if (at_end()) fail("unterminated string literal");
            char c = advance();
            if (c == '"') break;
            if (c == '\n') fail("newline inside string literal");
            if (c == '\\') {
                if (at_end()) fail("dangling escape in string literal");
                char e = advance();
                switch (e) {
                    case 't': value += '\t'; break;
                    case 'n': value += '\n'; break;
                    case 'r': value += '\r'; break;
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case '\'': value += '\''; break;
                    default: fail(std::string("unsupported escape '\\") + e + "'");
                }
            } else {
                value += c;
            }
        }
        // Optional language tag or datatype.
        if (peek() == '@') {
            advance();
            std::string lang;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-'))
                lang += advance();
            if (lang.empty()) fail("empty language tag");
            return Term::lang_literal(value, lang);
        }
        if (peek() == '^' && peek(1) == '^') {
            advance();
            advance();
            Term dt = peek() == '<' ? Term::iri(iri_ref()) : prefixed_name();
            return Term::typed_literal(value, dt.value);
        }
        return Term::literal(value);
    }

    Term numeric_literal() {
        std::string lexeme;
        bool has_dot = false, has_exp = false;
        if (peek() == '+' || peek() == '-') lexeme += advance();
        while (!at_end()) {
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                lexeme += advance();
            } else if (c == '.' && !has_dot && !has_exp &&
                       std::isdigit(static_cast<unsigned char>(peek(1)))) {
                has_dot = true;
                lexeme += advance();
            } else if ((c == 'e' || c == 'E') && !has_exp) {
                has_exp = true;
                lexeme += advance();
                if (peek() == '+' || peek() == '-') lexeme += advance();
            } else {
                break;
            }
        }
        if (lexeme.empty() || lexeme == "+" || lexeme == "-") fail("malformed numeric literal");
        std::string_view dt = has_exp  ? iris::kXsdDouble
                            : has_dot ? iris::kXsdDecimal
                                      : iris::kXsdInteger;
        return Term::typed_literal(lexeme, std::string(dt));
    }

    Term term(bool subject_position) {
        char c = peek();
        if (c == '<') return Term::iri(iri_ref());
        if (c == '[') unsupported("anonymous blank node '[...]'");
        if (c == '(') unsupported("collection '(...)'");
        if (c == '_' && peek(1) == ':') {
            advance();
            advance();
            std::string label;
            while (!at_end() && is_pn_char(peek())) {
                if (peek() == '.' && !is_pn_char(peek(1))) break;
                label += advance();
            }
            if (label.empty()) fail("empty blank node label");
            return Term::blank(label);
        }
        if (subject_position) {
            if (c == '"') fail("literal in subject position");
            return prefixed_name();
        }
        if (c == '"') return string_literal();
        if (c == '\'') unsupported("single-quoted string literal");
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
            return numeric_literal();
        // Bare words: boolean literals, otherwise a prefixed name.
        if (match_keyword("true")) return Term::boolean(true);
        if (match_keyword("false")) return Term::boolean(false);
        return prefixed_name();
    }

    bool match_keyword(std::string_view word) {
        if (text_.compare(pos_, word.size(), word) != 0) return false;
        char after = peek(word.size());
        if (is_pn_char(after) || after == ':') return false;
        for (std::size_t i = 0; i < word.size(); ++i) advance();
        return true;
    }

    Term predicate() {
        if (match_keyword("a")) return Term::iri(std::string(iris::kRdfType));
        if (peek() == '<') return Term::iri(iri_ref());
        return prefixed_name();
    }

    void statement(Graph& g) {
        Term subject = term(/*subject_position=*/true);
        for (;;) {
            skip_ws();
            Term pred = predicate();
            for (;;) {
                skip_ws();
                Term object = term(/*subject_position=*/false);
                g.add(Triple{subject, pred, object});
                skip_ws();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                break;
            }
            if (peek() == ';') {
                advance();
                skip_ws();
                // A ';' may be directly followed by the statement terminator.
                if (peek() == '.') break;
                if (peek() == ';') fail("empty predicate-object list entry");
                continue;
            }
            break;
        }
        skip_ws();
        expect('.', "to end statement");
    }

    std::map<std::string, std::string> prefixes_;
};

}  // namespace

Graph parse_turtle(std::string_view text) { return Parser(text).parse(); }

Graph parse_turtle_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open Turtle file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    return parse_turtle(text);
}

}  // namespace graphtale::rdf
