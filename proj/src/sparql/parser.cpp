#include "graphtale/sparql/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace graphtale::sparql {

QuerySyntaxError::QuerySyntaxError(std::size_t position_, const std::string& message_)
    : std::runtime_error("query syntax error at offset " + std::to_string(position_) + ": " +
                         message_),
      position(position_),
      message(message_) {}

UnsupportedFeature::UnsupportedFeature(std::string feature_)
    : std::runtime_error("unsupported query feature: " + feature_), feature(std::move(feature_)) {}

MissingBinding::MissingBinding(std::string slot_)
    : std::runtime_error("missing binding for slot '" + slot_ + "'"), slot(std::move(slot_)) {}

UnknownSlot::UnknownSlot(std::string slot_)
    : std::runtime_error("binding for unknown slot '" + slot_ + "'"), slot(std::move(slot_)) {}

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return out;
}

const std::set<std::string>& unsupported_keywords() {
    static const std::set<std::string> kws = {
        "UNION",    "MINUS",  "GRAPH",  "SERVICE", "VALUES", "HAVING", "LIMIT",
        "OFFSET",   "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "EXISTS",
        "NOT",      "REGEX",  "COUNT", "SUM",     "AVG",    "MIN",    "MAX",
        "SAMPLE",   "UNDEF",  "REDUCED"};
    return kws;
}

struct Token {
    enum class Kind { Iri, PName, Var, Slot, String, Number, Ident, Punct, LangTag, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t pos = 0;
    bool num_dot = false, num_exp = false;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool local_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_ws();
            if (pos_ >= text_.size()) {
                out.push_back({Token::Kind::End, "", pos_});
                return out;
            }
            out.push_back(next_token());
        }
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    [[noreturn]] void fail(const std::string& msg) const { throw QuerySyntaxError(pos_, msg); }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    Token next_token() {
        std::size_t start = pos_;
        char c = peek();
        if (c == '<') {
            ++pos_;
            std::string iri;
            while (pos_ < text_.size() && text_[pos_] != '>') {
                if (text_[pos_] == '\n') fail("newline inside IRI");
                iri += text_[pos_++];
            }
            if (pos_ >= text_.size()) fail("unterminated IRI");
            ++pos_;
            return {Token::Kind::Iri, iri, start};
        }
        if (c == '?' || c == '$') {
            ++pos_;
            std::string name;
            while (ident_char(peek())) name += text_[pos_++];
            if (name.empty()) fail("empty variable name");
            return {Token::Kind::Var, name, start};
        }
        if (c == '{') {
            // `{name}` with no internal whitespace is a template parameter;
            // a bare '{' opens a group.
            std::size_t j = pos_ + 1;
            std::string name;
            while (j < text_.size() && ident_char(text_[j])) name += text_[j++];
            if (!name.empty() && j < text_.size() && text_[j] == '}') {
                pos_ = j + 1;
                return {Token::Kind::Slot, name, start};
            }
            ++pos_;
            return {Token::Kind::Punct, "{", start};
        }
        if (c == '"') {
            if (peek(1) == '"' && peek(2) == '"') throw UnsupportedFeature("long string literal");
            ++pos_;
            std::string value;
            for (;;) {
                if (pos_ >= text_.size()) fail("unterminated string literal");
                char d = text_[pos_++];
                if (d == '"') break;
                if (d == '\\') {
                    if (pos_ >= text_.size()) fail("dangling escape");
                    char e = text_[pos_++];
                    switch (e) {
                        case 't': value += '\t'; break;
                        case 'n': value += '\n'; break;
                        case 'r': value += '\r'; break;
                        case '"': value += '"'; break;
                        case '\\': value += '\\'; break;
                        case '\'': value += '\''; break;
                        default: fail("unsupported escape");
                    }
                } else {
                    value += d;
                }
            }
            return {Token::Kind::String, value, start};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '+' || c == '-') && std::isdigit(static_cast<unsigned char>(peek(1)))) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            Token t{Token::Kind::Number, "", start};
            if (c == '+' || c == '-') t.text += text_[pos_++];
            while (pos_ < text_.size()) {
                char d = peek();
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    t.text += text_[pos_++];
                } else if (d == '.' && !t.num_dot && !t.num_exp &&
                           std::isdigit(static_cast<unsigned char>(peek(1)))) {
                    t.num_dot = true;
                    t.text += text_[pos_++];
                } else if ((d == 'e' || d == 'E') && !t.num_exp) {
                    t.num_exp = true;
                    t.text += text_[pos_++];
                    if (peek() == '+' || peek() == '-') t.text += text_[pos_++];
                } else {
                    break;
                }
            }
            return t;
        }
        if (c == '@') {
            ++pos_;
            std::string tag;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')
                tag += text_[pos_++];
            if (tag.empty()) fail("empty language tag");
            return {Token::Kind::LangTag, tag, start};
        }
        if (ident_start(c)) {
            std::string word;
            while (ident_char(peek())) word += text_[pos_++];
            if (peek() == ':') {
                ++pos_;
                std::string local;
                while (pos_ < text_.size()) {
                    char d = peek();
                    if (local_char(d)) {
                        local += text_[pos_++];
                    } else if (d == '.' && local_char(peek(1))) {
                        local += text_[pos_++];
                    } else {
                        break;
                    }
                }
                return {Token::Kind::PName, word + ":" + local, start};
            }
            return {Token::Kind::Ident, word, start};
        }
        if (c == ':') {  // empty prefix
            ++pos_;
            std::string local;
            while (local_char(peek())) local += text_[pos_++];
            return {Token::Kind::PName, ":" + local, start};
        }
        if (c == '!' && peek(1) == '=') {
            pos_ += 2;
            return {Token::Kind::Punct, "!=", start};
        }
        if (c == '&' && peek(1) == '&') {
            pos_ += 2;
            return {Token::Kind::Punct, "&&", start};
        }
        if (c == '|' && peek(1) == '|') {
            pos_ += 2;
            return {Token::Kind::Punct, "||", start};
        }
        if (c == '^' && peek(1) == '^') {
            pos_ += 2;
            return {Token::Kind::Punct, "^^", start};
        }
        if (std::string("}();,.=!|/^*+").find(c) != std::string::npos) {
            ++pos_;
            return {Token::Kind::Punct, std::string(1, c), start};
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

    QueryPlan parse() {
        prologue();
        select_clause();
        if (is_keyword("WHERE")) advance();
        plan_.where = group();
        solution_modifiers();
        if (!at(Token::Kind::End)) fail("trailing content after query");
        validate();
        return plan_;
    }

private:
    std::vector<Token> tokens_;
    std::size_t idx_ = 0;
    QueryPlan plan_;

    const Token& cur() const { return tokens_[idx_]; }
    const Token& ahead(std::size_t n = 1) const {
        return tokens_[std::min(idx_ + n, tokens_.size() - 1)];
    }
    void advance() {
        if (idx_ + 1 < tokens_.size()) ++idx_;
    }
    bool at(Token::Kind k) const { return cur().kind == k; }
    bool at_punct(const std::string& p) const {
        return cur().kind == Token::Kind::Punct && cur().text == p;
    }
    bool is_keyword(const std::string& kw) const {
        return cur().kind == Token::Kind::Ident && upper(cur().text) == kw;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw QuerySyntaxError(cur().pos, msg);
    }

    void check_unsupported_keyword() const {
        if (cur().kind == Token::Kind::Ident && unsupported_keywords().count(upper(cur().text)))
            throw UnsupportedFeature(upper(cur().text));
    }

    void expect_punct(const std::string& p, const std::string& what) {
        if (!at_punct(p)) fail("expected '" + p + "' " + what);
        advance();
    }

    void prologue() {
        while (is_keyword("PREFIX")) {
            advance();
            if (!at(Token::Kind::PName)) fail("expected prefix name after PREFIX");
            std::string pname = cur().text;
            auto colon = pname.find(':');
            std::string prefix = pname.substr(0, colon);
            if (pname.size() != colon + 1) fail("prefix declaration must end with ':'");
            advance();
            if (!at(Token::Kind::Iri)) fail("expected IRI in prefix declaration");
            plan_.prefixes[prefix] = cur().text;
            advance();
        }
        if (cur().kind == Token::Kind::Ident) check_unsupported_keyword();
    }

    rdf::Term expand_pname(const std::string& pname, std::size_t pos) const {
        auto colon = pname.find(':');
        std::string prefix = pname.substr(0, colon);
        auto it = plan_.prefixes.find(prefix);
        if (it == plan_.prefixes.end())
            throw QuerySyntaxError(pos, "unknown prefix '" + prefix + ":'");
        return rdf::Term::iri(it->second + pname.substr(colon + 1));
    }

    void select_clause() {
        if (!is_keyword("SELECT")) {
            check_unsupported_keyword();
            fail("expected SELECT");
        }
        advance();
        if (is_keyword("DISTINCT")) {
            plan_.distinct = true;
            advance();
        }
        if (at_punct("*")) throw UnsupportedFeature("SELECT *");
        bool any = false;
        for (;;) {
            if (at(Token::Kind::Var)) {
                plan_.select_vars.push_back(cur().text);
                advance();
                any = true;
            } else if (at_punct("(")) {
                advance();
                aggregate_expr();
                any = true;
            } else {
                break;
            }
        }
        if (!any) fail("SELECT projects no variables");
    }

    void aggregate_expr() {
        if (cur().kind == Token::Kind::Ident && upper(cur().text) != "GROUP_CONCAT")
            check_unsupported_keyword();
        if (!is_keyword("GROUP_CONCAT")) fail("expected GROUP_CONCAT aggregate");
        advance();
        expect_punct("(", "after GROUP_CONCAT");
        Aggregate agg;
        agg.separator = " ";  // SPARQL default
        if (is_keyword("DISTINCT")) {
            agg.distinct = true;
            advance();
        }
        if (!at(Token::Kind::Var)) fail("expected variable in GROUP_CONCAT");
        agg.source_var = cur().text;
        advance();
        if (at_punct(";")) {
            advance();
            if (!is_keyword("SEPARATOR")) fail("expected separator=");
            advance();
            expect_punct("=", "after separator");
            if (!at(Token::Kind::String)) fail("separator must be a string");
            agg.separator = cur().text;
            advance();
        }
        expect_punct(")", "to close GROUP_CONCAT");
        if (!is_keyword("AS")) fail("expected AS after aggregate");
        advance();
        if (!at(Token::Kind::Var)) fail("expected output variable after AS");
        agg.as_var = cur().text;
        plan_.select_vars.push_back(agg.as_var);
        plan_.aggregates.push_back(agg);
        advance();
        expect_punct(")", "to close aggregate projection");
    }

    GroupBlock group() {
        GroupBlock block;
        expect_punct("{", "to open group");
        while (!at_punct("}")) {
            if (at(Token::Kind::End)) fail("unterminated group");
            check_unsupported_keyword();
            if (is_keyword("SELECT")) throw UnsupportedFeature("subquery");
            if (is_keyword("BIND")) {
                block.elements.push_back(bind_element());
            } else if (is_keyword("FILTER")) {
                block.elements.push_back(filter_element());
            } else if (is_keyword("OPTIONAL")) {
                advance();
                Element el;
                el.kind = Element::Kind::Optional;
                el.optional = group().elements;
                block.elements.push_back(std::move(el));
            } else if (at_punct("{")) {
                throw UnsupportedFeature("nested group");
            } else {
                triples_block(block);
            }
        }
        advance();  // '}'
        return block;
    }

    Element bind_element() {
        advance();  // BIND
        expect_punct("(", "after BIND");
        Element el;
        el.kind = Element::Kind::Bind;
        el.bind_value = value_term("BIND expression");
        if (el.bind_value.kind == PatternTerm::Kind::Var)
            throw UnsupportedFeature("BIND of a variable expression");
        if (!is_keyword("AS")) fail("expected AS in BIND");
        advance();
        if (!at(Token::Kind::Var)) fail("expected variable after AS");
        el.bind_var = cur().text;
        advance();
        expect_punct(")", "to close BIND");
        return el;
    }

    Element filter_element() {
        advance();  // FILTER
        expect_punct("(", "after FILTER");
        Element el;
        el.kind = Element::Kind::Filter;
        el.filter = filter_expr();
        expect_punct(")", "to close FILTER");
        return el;
    }

    FilterExpr filter_expr() {
        FilterExpr left = comparison();
        if (at_punct("||")) throw UnsupportedFeature("logical or");
        while (at_punct("&&")) {
            advance();
            FilterExpr right = comparison();
            FilterExpr conj;
            conj.op = FilterExpr::Op::And;
            conj.args = {std::move(left), std::move(right)};
            left = std::move(conj);
        }
        return left;
    }

    FilterExpr comparison() {
        FilterExpr left = primary();
        if (at_punct("=") || at_punct("!=")) {
            FilterExpr cmp;
            cmp.op = at_punct("=") ? FilterExpr::Op::Eq : FilterExpr::Op::Ne;
            advance();
            cmp.args = {std::move(left), primary()};
            return cmp;
        }
        return left;
    }

    FilterExpr primary() {
        if (at_punct("(")) {
            advance();
            FilterExpr inner = filter_expr();
            expect_punct(")", "to close parenthesized expression");
            return inner;
        }
        if (at_punct("!")) throw UnsupportedFeature("negation");
        FilterExpr atom;
        atom.op = FilterExpr::Op::Atom;
        atom.atom = value_term("filter atom");
        return atom;
    }

    // A term usable in BIND / FILTER: variable, IRI, literal or slot.
    PatternTerm value_term(const std::string& where) {
        if (at(Token::Kind::Var)) {
            PatternTerm t = PatternTerm::var(cur().text);
            advance();
            return t;
        }
        if (at(Token::Kind::Slot)) {
            PatternTerm t = PatternTerm::slot(cur().text);
            advance();
            return t;
        }
        if (at(Token::Kind::Iri)) {
            PatternTerm t = PatternTerm::fixed(rdf::Term::iri(cur().text));
            advance();
            return t;
        }
        if (at(Token::Kind::PName)) {
            PatternTerm t = PatternTerm::fixed(expand_pname(cur().text, cur().pos));
            advance();
            return t;
        }
        if (at(Token::Kind::String)) return PatternTerm::fixed(literal_term());
        if (at(Token::Kind::Number)) {
            const Token& t = cur();
            std::string_view dt = t.num_exp  ? rdf::iris::kXsdDouble
                                : t.num_dot ? rdf::iris::kXsdDecimal
                                            : rdf::iris::kXsdInteger;
            PatternTerm out = PatternTerm::fixed(rdf::Term::typed_literal(t.text, std::string(dt)));
            advance();
            return out;
        }
        if (is_keyword("TRUE")) {
            advance();
            return PatternTerm::fixed(rdf::Term::boolean(true));
        }
        if (is_keyword("FALSE")) {
            advance();
            return PatternTerm::fixed(rdf::Term::boolean(false));
        }
        check_unsupported_keyword();
        fail("expected term in " + where);
    }

    rdf::Term literal_term() {
        std::string value = cur().text;
        advance();
        if (at(Token::Kind::LangTag)) {
            std::string lang = cur().text;
            advance();
            return rdf::Term::lang_literal(value, lang);
        }
        if (at_punct("^^")) {
            advance();
            if (at(Token::Kind::Iri)) {
                rdf::Term dt = rdf::Term::iri(cur().text);
                advance();
                return rdf::Term::typed_literal(value, dt.value);
            }
            if (at(Token::Kind::PName)) {
                rdf::Term dt = expand_pname(cur().text, cur().pos);
                advance();
                return rdf::Term::typed_literal(value, dt.value);
            }
            fail("expected datatype IRI after ^^");
        }
        return rdf::Term::literal(value);
    }

    PatternTerm subject_or_object() { return value_term("triple pattern"); }

    PatternTerm verb() {
        if (at_punct("^")) throw UnsupportedFeature("property path");
        PatternTerm v;
        if (cur().kind == Token::Kind::Ident && cur().text == "a") {
            advance();
            v = PatternTerm::fixed(rdf::Term::iri(std::string(rdf::iris::kRdfType)));
        } else {
            v = value_term("predicate position");
        }
        for (const char* p : {"/", "|", "*", "+", "^"})
            if (at_punct(p)) throw UnsupportedFeature("property path");
        return v;
    }

    void triples_block(GroupBlock& block) {
        PatternTerm subject = subject_or_object();
        for (;;) {
            PatternTerm pred = verb();
            for (;;) {
                PatternTerm object = subject_or_object();
                Element el;
                el.kind = Element::Kind::Pattern;
                el.pattern = TriplePattern{subject, pred, object};
                block.elements.push_back(std::move(el));
                if (at_punct(",")) {
                    advance();
                    continue;
                }
                break;
            }
            if (at_punct(";")) {
                advance();
                if (at_punct(".") || at_punct("}")) break;  // trailing ';'
                continue;
            }
            break;
        }
        if (at_punct(".")) {
            advance();
            return;
        }
        if (at_punct("}") || is_keyword("BIND") || is_keyword("FILTER") || is_keyword("OPTIONAL"))
            return;
        check_unsupported_keyword();
        fail("expected '.' after triple pattern");
    }

    void solution_modifiers() {
        if (is_keyword("GROUP")) {
            advance();
            if (!is_keyword("BY")) fail("expected BY after GROUP");
            advance();
            while (at(Token::Kind::Var)) {
                plan_.group_by.push_back(cur().text);
                advance();
            }
            if (plan_.group_by.empty()) fail("GROUP BY lists no variables");
        }
        if (cur().kind == Token::Kind::Ident && upper(cur().text) == "HAVING")
            throw UnsupportedFeature("HAVING");
        if (is_keyword("ORDER")) {
            advance();
            if (!is_keyword("BY")) fail("expected BY after ORDER");
            advance();
            for (;;) {
                if (at(Token::Kind::Var)) {
                    plan_.order_by.push_back({cur().text, true});
                    advance();
                } else if (is_keyword("ASC") || is_keyword("DESC")) {
                    bool asc = is_keyword("ASC");
                    advance();
                    expect_punct("(", "after ASC/DESC");
                    if (!at(Token::Kind::Var)) fail("expected variable in ORDER BY key");
                    plan_.order_by.push_back({cur().text, asc});
                    advance();
                    expect_punct(")", "to close ORDER BY key");
                } else {
                    break;
                }
            }
            if (plan_.order_by.empty()) fail("ORDER BY lists no keys");
        }
        if (cur().kind == Token::Kind::Ident) check_unsupported_keyword();
    }

    // --- static validation -------------------------------------------------

    static void collect_vars(const std::vector<Element>& elements, std::set<std::string>& vars) {
        for (const auto& el : elements) {
            switch (el.kind) {
                case Element::Kind::Pattern:
                    for (const auto* t : {&el.pattern.subject, &el.pattern.predicate,
                                          &el.pattern.object})
                        if (t->kind == PatternTerm::Kind::Var) vars.insert(t->name);
                    break;
                case Element::Kind::Bind: vars.insert(el.bind_var); break;
                case Element::Kind::Filter: break;
                case Element::Kind::Optional: collect_vars(el.optional, vars); break;
            }
        }
    }

    static void collect_slots(const FilterExpr& e, std::vector<std::string>& slots) {
        if (e.op == FilterExpr::Op::Atom) {
            if (e.atom.kind == PatternTerm::Kind::Slot) slots.push_back(e.atom.name);
            return;
        }
        for (const auto& a : e.args) collect_slots(a, slots);
    }

    static void collect_slots(const std::vector<Element>& elements,
                              std::vector<std::string>& slots) {
        for (const auto& el : elements) {
            switch (el.kind) {
                case Element::Kind::Pattern:
                    for (const auto* t : {&el.pattern.subject, &el.pattern.predicate,
                                          &el.pattern.object})
                        if (t->kind == PatternTerm::Kind::Slot) slots.push_back(t->name);
                    break;
                case Element::Kind::Bind:
                    if (el.bind_value.kind == PatternTerm::Kind::Slot)
                        slots.push_back(el.bind_value.name);
                    break;
                case Element::Kind::Filter: collect_slots(el.filter, slots); break;
                case Element::Kind::Optional: collect_slots(el.optional, slots); break;
            }
        }
    }

    void validate() const {
        std::set<std::string> pattern_vars;
        collect_vars(plan_.where.elements, pattern_vars);

        std::set<std::string> aggregate_outputs;
        for (const auto& agg : plan_.aggregates) {
            aggregate_outputs.insert(agg.as_var);
            if (!pattern_vars.count(agg.source_var))
                throw QuerySyntaxError(0, "aggregated variable ?" + agg.source_var +
                                              " appears in no pattern");
        }
        for (const auto& v : plan_.select_vars)
            if (!pattern_vars.count(v) && !aggregate_outputs.count(v))
                throw QuerySyntaxError(0, "selected variable ?" + v + " appears in no pattern");
        if (!plan_.group_by.empty()) {
            std::set<std::string> grouped(plan_.group_by.begin(), plan_.group_by.end());
            for (const auto& v : plan_.select_vars)
                if (!aggregate_outputs.count(v) && !grouped.count(v))
                    throw QuerySyntaxError(0, "selected variable ?" + v +
                                                  " is neither grouped nor aggregated");
        }

        std::vector<std::string> slots;
        collect_slots(plan_.where.elements, slots);
        std::set<std::string> seen;
        for (const auto& s : slots)
            if (!seen.insert(s).second)
                throw QuerySyntaxError(0, "duplicate parameter slot {" + s + "}");
    }
};

void replace_slots(FilterExpr& e, const std::map<std::string, std::string>& bindings) {
    if (e.op == FilterExpr::Op::Atom) {
        if (e.atom.kind == PatternTerm::Kind::Slot) {
            auto it = bindings.find(e.atom.name);
            if (it == bindings.end()) throw MissingBinding(e.atom.name);
            e.atom = PatternTerm::fixed(rdf::Term::iri(it->second));
        }
        return;
    }
    for (auto& a : e.args) replace_slots(a, bindings);
}

void replace_slots(std::vector<Element>& elements,
                   const std::map<std::string, std::string>& bindings) {
    auto sub = [&](PatternTerm& t) {
        if (t.kind != PatternTerm::Kind::Slot) return;
        auto it = bindings.find(t.name);
        if (it == bindings.end()) throw MissingBinding(t.name);
        t = PatternTerm::fixed(rdf::Term::iri(it->second));
    };
    for (auto& el : elements) {
        switch (el.kind) {
            case Element::Kind::Pattern:
                sub(el.pattern.subject);
                sub(el.pattern.predicate);
                sub(el.pattern.object);
                break;
            case Element::Kind::Bind: sub(el.bind_value); break;
            case Element::Kind::Filter: replace_slots(el.filter, bindings); break;
            case Element::Kind::Optional: replace_slots(el.optional, bindings); break;
        }
    }
}

void collect_plan_slots(const std::vector<Element>& elements, std::vector<std::string>& out);

void collect_plan_slots(const FilterExpr& e, std::vector<std::string>& out) {
    if (e.op == FilterExpr::Op::Atom) {
        if (e.atom.kind == PatternTerm::Kind::Slot) out.push_back(e.atom.name);
        return;
    }
    for (const auto& a : e.args) collect_plan_slots(a, out);
}

void collect_plan_slots(const std::vector<Element>& elements, std::vector<std::string>& out) {
    for (const auto& el : elements) {
        switch (el.kind) {
            case Element::Kind::Pattern:
                for (const auto* t :
                     {&el.pattern.subject, &el.pattern.predicate, &el.pattern.object})
                    if (t->kind == PatternTerm::Kind::Slot) out.push_back(t->name);
                break;
            case Element::Kind::Bind:
                if (el.bind_value.kind == PatternTerm::Kind::Slot)
                    out.push_back(el.bind_value.name);
                break;
            case Element::Kind::Filter: collect_plan_slots(el.filter, out); break;
            case Element::Kind::Optional: collect_plan_slots(el.optional, out); break;
        }
    }
}

}  // namespace

std::vector<std::string> QueryPlan::slot_names() const {
    std::vector<std::string> out;
    collect_plan_slots(where.elements, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<rdf::Term> ResultTable::cell(std::size_t row, const std::string& column) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == column) return rows.at(row).at(c);
    return std::nullopt;
}

QueryPlan parse_query(std::string_view text) { return Parser(text).parse(); }

QueryPlan bind_parameters(const QueryPlan& plan,
                          const std::map<std::string, std::string>& bindings) {
    auto slots = plan.slot_names();
    for (const auto& [name, iri] : bindings)
        if (std::find(slots.begin(), slots.end(), name) == slots.end()) throw UnknownSlot(name);
    QueryPlan bound = plan;
    replace_slots(bound.where.elements, bindings);
    return bound;
}

}  // namespace graphtale::sparql
