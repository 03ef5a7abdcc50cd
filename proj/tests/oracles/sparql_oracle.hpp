// Reference SPARQL evaluator used only by tests. Deliberately different
// machinery from the library engine: per-pattern full scans over the triple
// list, quadratic compatibility joins of materialized mapping lists, no
// indexes. Agreement between the two implementations is the correctness
// check.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "graphtale/rdf/graph.hpp"
#include "graphtale/sparql/ast.hpp"

namespace oracle {

using graphtale::rdf::Graph;
using graphtale::rdf::Term;
using graphtale::rdf::Triple;
namespace sq = graphtale::sparql;

using Mapping = std::map<std::string, Term>;

inline bool compatible(const Mapping& a, const Mapping& b) {
    for (const auto& [k, v] : b) {
        auto it = a.find(k);
        if (it != a.end() && it->second != v) return false;
    }
    return true;
}

inline Mapping merged(const Mapping& a, const Mapping& b) {
    Mapping m = a;
    m.insert(b.begin(), b.end());
    return m;
}

// All mappings unifying one pattern against one triple.
inline std::optional<Mapping> unify(const sq::TriplePattern& p, const Triple& t) {
    Mapping m;
    auto pos = [&](const sq::PatternTerm& pt, const Term& value) {
        if (pt.kind == sq::PatternTerm::Kind::Fixed) return pt.term == value;
        auto it = m.find(pt.name);
        if (it != m.end()) return it->second == value;
        m.emplace(pt.name, value);
        return true;
    };
    if (!pos(p.subject, t.subject)) return std::nullopt;
    if (!pos(p.predicate, t.predicate)) return std::nullopt;
    if (!pos(p.object, t.object)) return std::nullopt;
    return m;
}

enum class OTri { True, False, Error };

inline std::optional<Term> atom_value(const sq::PatternTerm& a, const Mapping& m) {
    if (a.kind == sq::PatternTerm::Kind::Fixed) return a.term;
    auto it = m.find(a.name);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

inline OTri eval_filter(const sq::FilterExpr& e, const Mapping& m) {
    using Op = sq::FilterExpr::Op;
    switch (e.op) {
        case Op::Atom: {
            auto v = atom_value(e.atom, m);
            if (!v) return OTri::Error;
            if (v->is_literal() && v->datatype == graphtale::rdf::iris::kXsdBoolean)
                return v->value == "true" ? OTri::True : OTri::False;
            return OTri::Error;
        }
        case Op::Eq:
        case Op::Ne: {
            if (e.args[0].op != Op::Atom || e.args[1].op != Op::Atom) {
                OTri l = eval_filter(e.args[0], m);
                OTri r = eval_filter(e.args[1], m);
                if (l == OTri::Error || r == OTri::Error) return OTri::Error;
                bool eq = l == r;
                return (e.op == Op::Eq) == eq ? OTri::True : OTri::False;
            }
            auto a = atom_value(e.args[0].atom, m);
            auto b = atom_value(e.args[1].atom, m);
            if (!a || !b) return OTri::Error;
            if (a->kind != b->kind) return OTri::Error;
            bool eq = *a == *b;
            return (e.op == Op::Eq) == eq ? OTri::True : OTri::False;
        }
        case Op::And: {
            OTri acc = OTri::True;
            for (const auto& arg : e.args) {
                OTri v = eval_filter(arg, m);
                if (v == OTri::False) return OTri::False;
                if (v == OTri::Error) acc = OTri::Error;
            }
            return acc;
        }
    }
    return OTri::Error;
}

inline std::vector<Mapping> eval_block(const std::vector<sq::Element>& elements, const Graph& g,
                                       std::vector<Mapping> mappings) {
    std::vector<const sq::FilterExpr*> filters;
    for (const auto& el : elements) {
        switch (el.kind) {
            case sq::Element::Kind::Pattern: {
                std::vector<Mapping> plist;
                for (const auto& t : g.triples())
                    if (auto m = unify(el.pattern, t)) plist.push_back(*m);
                std::vector<Mapping> next;
                for (const auto& a : mappings)
                    for (const auto& b : plist)
                        if (compatible(a, b)) next.push_back(merged(a, b));
                mappings = std::move(next);
                break;
            }
            case sq::Element::Kind::Bind: {
                std::vector<Mapping> next;
                for (const auto& m : mappings) {
                    auto v = atom_value(el.bind_value, m);
                    if (!v) continue;
                    auto it = m.find(el.bind_var);
                    if (it != m.end()) {
                        if (it->second == *v) next.push_back(m);
                        continue;
                    }
                    Mapping ext = m;
                    ext.emplace(el.bind_var, *v);
                    next.push_back(std::move(ext));
                }
                mappings = std::move(next);
                break;
            }
            case sq::Element::Kind::Filter: filters.push_back(&el.filter); break;
            case sq::Element::Kind::Optional: {
                std::vector<Mapping> next;
                for (const auto& m : mappings) {
                    auto child = eval_block(el.optional, g, {m});
                    if (child.empty())
                        next.push_back(m);
                    else
                        next.insert(next.end(), child.begin(), child.end());
                }
                mappings = std::move(next);
                break;
            }
        }
    }
    std::vector<Mapping> kept;
    for (const auto& m : mappings) {
        bool ok = true;
        for (const auto* f : filters)
            if (eval_filter(*f, m) != OTri::True) ok = false;
        if (ok) kept.push_back(m);
    }
    return kept;
}

inline bool numeric(const Term& t) {
    namespace iris = graphtale::rdf::iris;
    return t.is_literal() && (t.datatype == iris::kXsdInteger || t.datatype == iris::kXsdDecimal ||
                              t.datatype == iris::kXsdDouble);
}

inline int term_cmp(const Term& a, const Term& b) {
    if (numeric(a) && numeric(b)) {
        long double x = std::stold(a.value), y = std::stold(b.value);
        if (x < y) return -1;
        if (x > y) return 1;
    }
    if (a.value != b.value) return a.value < b.value ? -1 : 1;
    if (a.datatype != b.datatype) return a.datatype < b.datatype ? -1 : 1;
    if (a.language != b.language) return a.language < b.language ? -1 : 1;
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    return 0;
}

inline sq::ResultTable evaluate(const sq::QueryPlan& plan, const Graph& g) {
    auto mappings = eval_block(plan.where.elements, g, {Mapping{}});

    struct Row {
        std::map<std::string, std::optional<Term>> vars;
    };
    std::vector<Row> rows;
    if (!plan.group_by.empty() || !plan.aggregates.empty()) {
        using Key = std::vector<std::optional<Term>>;
        std::map<Key, std::vector<Mapping>> groups;
        std::vector<Key> order;
        for (const auto& m : mappings) {
            Key key;
            for (const auto& v : plan.group_by) {
                auto it = m.find(v);
                key.push_back(it == m.end() ? std::nullopt : std::optional<Term>(it->second));
            }
            if (!groups.count(key)) order.push_back(key);
            groups[key].push_back(m);
        }
        for (const auto& key : order) {
            Row row;
            for (std::size_t i = 0; i < plan.group_by.size(); ++i)
                row.vars[plan.group_by[i]] = key[i];
            for (const auto& agg : plan.aggregates) {
                std::vector<std::string> values;
                for (const auto& m : groups[key]) {
                    auto it = m.find(agg.source_var);
                    if (it != m.end()) values.push_back(it->second.value);
                }
                std::sort(values.begin(), values.end());
                if (agg.distinct)
                    values.erase(std::unique(values.begin(), values.end()), values.end());
                std::string joined;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    if (i) joined += agg.separator;
                    joined += values[i];
                }
                row.vars[agg.as_var] = Term::literal(joined);
            }
            rows.push_back(std::move(row));
        }
    } else {
        for (const auto& m : mappings) {
            Row row;
            for (const auto& [k, v] : m) row.vars[k] = v;
            rows.push_back(std::move(row));
        }
    }

    if (!plan.order_by.empty()) {
        std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
            for (const auto& key : plan.order_by) {
                auto ia = a.vars.find(key.var), ib = b.vars.find(key.var);
                std::optional<Term> va = ia == a.vars.end() ? std::nullopt : ia->second;
                std::optional<Term> vb = ib == b.vars.end() ? std::nullopt : ib->second;
                if (!va && !vb) continue;
                if (!va) return false;
                if (!vb) return true;
                int c = term_cmp(*va, *vb);
                if (c != 0) return key.ascending ? c < 0 : c > 0;
            }
            return false;
        });
    }

    sq::ResultTable table;
    table.columns = plan.select_vars;
    std::set<sq::ResultTable::Row> seen;
    for (const auto& row : rows) {
        sq::ResultTable::Row projected;
        for (const auto& v : plan.select_vars) {
            auto it = row.vars.find(v);
            projected.push_back(it == row.vars.end() ? std::nullopt : it->second);
        }
        if (plan.distinct && !seen.insert(projected).second) continue;
        table.rows.push_back(std::move(projected));
    }
    return table;
}

}  // namespace oracle
