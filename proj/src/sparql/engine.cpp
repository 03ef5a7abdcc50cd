#include "graphtale/sparql/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

namespace graphtale::sparql {

namespace {

using rdf::Term;
using rdf::Triple;

using Bindings = std::map<std::string, Term>;

struct Solution {
    Bindings vars;
    std::vector<Triple> trace;
};

enum class TriBool { True, False, Error };

bool is_numeric_literal(const Term& t) {
    return t.is_literal() &&
           (t.datatype == rdf::iris::kXsdInteger || t.datatype == rdf::iris::kXsdDecimal ||
            t.datatype == rdf::iris::kXsdDouble);
}

// Deterministic total order used by ORDER BY: numeric literals compare
// numerically, everything else by lexical form then datatype/language/kind.
int compare_terms(const Term& a, const Term& b) {
    if (is_numeric_literal(a) && is_numeric_literal(b)) {
        long double x = std::strtold(a.value.c_str(), nullptr);
        long double y = std::strtold(b.value.c_str(), nullptr);
        if (x < y) return -1;
        if (x > y) return 1;
    }
    if (auto c = a.value.compare(b.value); c != 0) return c < 0 ? -1 : 1;
    if (auto c = a.datatype.compare(b.datatype); c != 0) return c < 0 ? -1 : 1;
    if (auto c = a.language.compare(b.language); c != 0) return c < 0 ? -1 : 1;
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    return 0;
}

void append_unique(std::vector<Triple>& dst, const std::vector<Triple>& src) {
    for (const auto& t : src)
        if (std::find(dst.begin(), dst.end(), t) == dst.end()) dst.push_back(t);
}

class Evaluator {
public:
    Evaluator(const rdf::Graph& g, std::vector<std::string>& notes) : g_(g), notes_(notes) {}

    std::vector<Solution> eval_block(const std::vector<Element>& elements, const Solution& seed) {
        std::vector<Solution> results{seed};
        std::vector<const FilterExpr*> filters;
        for (const auto& el : elements) {
            switch (el.kind) {
                case Element::Kind::Pattern: results = apply_pattern(el.pattern, results); break;
                case Element::Kind::Bind: results = apply_bind(el, results); break;
                case Element::Kind::Filter: filters.push_back(&el.filter); break;
                case Element::Kind::Optional: {
                    std::vector<Solution> next;
                    for (const auto& sol : results) {
                        auto extended = eval_block(el.optional, sol);
                        if (extended.empty())
                            next.push_back(sol);
                        else
                            next.insert(next.end(), extended.begin(), extended.end());
                    }
                    results = std::move(next);
                    break;
                }
            }
        }
        // FILTER scope is its whole group: apply once the group is complete.
        for (const auto* f : filters) {
            std::vector<Solution> kept;
            for (auto& sol : results)
                if (eval_filter(*f, sol.vars) == TriBool::True) kept.push_back(std::move(sol));
            results = std::move(kept);
        }
        return results;
    }

private:
    const rdf::Graph& g_;
    std::vector<std::string>& notes_;

    static Term resolve_fixed(const PatternTerm& t, const Bindings& vars, bool* bound) {
        switch (t.kind) {
            case PatternTerm::Kind::Fixed: *bound = true; return t.term;
            case PatternTerm::Kind::Slot: throw MissingBinding(t.name);
            case PatternTerm::Kind::Var: {
                auto it = vars.find(t.name);
                if (it == vars.end()) {
                    *bound = false;
                    return {};
                }
                *bound = true;
                return it->second;
            }
        }
        *bound = false;
        return {};
    }

    std::vector<Solution> apply_pattern(const TriplePattern& p, std::vector<Solution>& in) {
        std::vector<Solution> out;
        for (const auto& sol : in) {
            bool sb, pb, ob;
            Term s = resolve_fixed(p.subject, sol.vars, &sb);
            Term pr = resolve_fixed(p.predicate, sol.vars, &pb);
            Term o = resolve_fixed(p.object, sol.vars, &ob);
            auto matches =
                g_.match(sb ? rdf::TermPattern(s) : std::nullopt,
                         pb ? rdf::TermPattern(pr) : std::nullopt,
                         ob ? rdf::TermPattern(o) : std::nullopt);
            for (const auto& t : matches) {
                Bindings next = sol.vars;
                if (extend(p.subject, t.subject, next) && extend(p.predicate, t.predicate, next) &&
                    extend(p.object, t.object, next)) {
                    Solution ext{std::move(next), sol.trace};
                    ext.trace.push_back(t);
                    out.push_back(std::move(ext));
                }
            }
        }
        return out;
    }

    static bool extend(const PatternTerm& pattern, const Term& value, Bindings& vars) {
        if (pattern.kind != PatternTerm::Kind::Var) return true;
        auto [it, inserted] = vars.emplace(pattern.name, value);
        return inserted || it->second == value;
    }

    std::vector<Solution> apply_bind(const Element& el, std::vector<Solution>& in) {
        std::vector<Solution> out;
        for (const auto& sol : in) {
            bool bound;
            Term value = resolve_fixed(el.bind_value, sol.vars, &bound);
            if (!bound) continue;  // BIND of an unbound expression yields nothing to join
            auto it = sol.vars.find(el.bind_var);
            if (it != sol.vars.end()) {
                if (it->second == value) out.push_back(sol);
                continue;  // conflicting rebind drops the solution
            }
            Solution ext = sol;
            ext.vars.emplace(el.bind_var, value);
            out.push_back(std::move(ext));
        }
        return out;
    }

    struct Value {
        bool bound = false;
        Term term;
    };

    Value eval_atom(const PatternTerm& t, const Bindings& vars) {
        switch (t.kind) {
            case PatternTerm::Kind::Fixed: return {true, t.term};
            case PatternTerm::Kind::Slot: throw MissingBinding(t.name);
            case PatternTerm::Kind::Var: {
                auto it = vars.find(t.name);
                if (it == vars.end()) return {};
                return {true, it->second};
            }
        }
        return {};
    }

    TriBool to_condition(const Value& v) {
        if (!v.bound) {
            notes_.push_back("filter: unbound variable in condition");
            return TriBool::Error;
        }
        if (v.term.is_literal() && v.term.datatype == rdf::iris::kXsdBoolean)
            return v.term.value == "true" ? TriBool::True : TriBool::False;
        notes_.push_back("filter: type mismatch, non-boolean term used as condition");
        return TriBool::Error;
    }

    TriBool eval_filter(const FilterExpr& e, const Bindings& vars) {
        switch (e.op) {
            case FilterExpr::Op::Atom: return to_condition(eval_atom(e.atom, vars));
            case FilterExpr::Op::Eq:
            case FilterExpr::Op::Ne: {
                if (e.args[0].op != FilterExpr::Op::Atom || e.args[1].op != FilterExpr::Op::Atom) {
                    // Parenthesized boolean sub-expressions compared for equality.
                    TriBool l = eval_filter(e.args[0], vars);
                    TriBool r = eval_filter(e.args[1], vars);
                    if (l == TriBool::Error || r == TriBool::Error) return TriBool::Error;
                    bool eq = l == r;
                    return (e.op == FilterExpr::Op::Eq) == eq ? TriBool::True : TriBool::False;
                }
                Value a = eval_atom(e.args[0].atom, vars);
                Value b = eval_atom(e.args[1].atom, vars);
                if (!a.bound || !b.bound) {
                    notes_.push_back("filter: unbound variable in comparison");
                    return TriBool::Error;
                }
                if (a.term.kind != b.term.kind) {
                    notes_.push_back("filter: type mismatch comparing different term kinds");
                    return TriBool::Error;
                }
                bool eq = a.term == b.term;
                return (e.op == FilterExpr::Op::Eq) == eq ? TriBool::True : TriBool::False;
            }
            case FilterExpr::Op::And: {
                // SPARQL logical-and error propagation: False dominates Error.
                TriBool acc = TriBool::True;
                for (const auto& arg : e.args) {
                    TriBool v = eval_filter(arg, vars);
                    if (v == TriBool::False) return TriBool::False;
                    if (v == TriBool::Error) acc = TriBool::Error;
                }
                return acc;
            }
        }
        return TriBool::Error;
    }
};

struct OutRow {
    std::map<std::string, std::optional<Term>> vars;
    std::vector<Triple> trace;
};

std::string concat_value(const Term& t) { return t.value; }

std::optional<Term> aggregate_value(const Aggregate& agg, const std::vector<Solution>& group) {
    std::vector<std::string> values;
    for (const auto& sol : group) {
        auto it = sol.vars.find(agg.source_var);
        if (it != sol.vars.end()) values.push_back(concat_value(it->second));
    }
    // Lexicographic order before joining: SPARQL leaves GROUP_CONCAT order
    // undefined, we pin it for determinism.
    std::sort(values.begin(), values.end());
    if (agg.distinct) values.erase(std::unique(values.begin(), values.end()), values.end());
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) joined += agg.separator;
        joined += values[i];
    }
    return Term::literal(joined);
}

}  // namespace

TracedResult execute_traced(const QueryPlan& plan, const rdf::Graph& graph) {
    TracedResult result;
    result.table.columns = plan.select_vars;

    Evaluator ev(graph, result.table.notes);
    auto solutions = ev.eval_block(plan.where.elements, Solution{});

    std::vector<OutRow> rows;
    if (!plan.group_by.empty() || !plan.aggregates.empty()) {
        using Key = std::vector<std::optional<Term>>;
        std::map<Key, std::size_t> group_of;
        std::vector<std::vector<Solution>> groups;
        std::vector<Key> group_keys;
        for (auto& sol : solutions) {
            Key key;
            for (const auto& v : plan.group_by) {
                auto it = sol.vars.find(v);
                key.push_back(it == sol.vars.end() ? std::nullopt
                                                   : std::optional<Term>(it->second));
            }
            auto [it, inserted] = group_of.emplace(key, groups.size());
            if (inserted) {
                groups.emplace_back();
                group_keys.push_back(key);
            }
            groups[it->second].push_back(std::move(sol));
        }
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            OutRow row;
            for (std::size_t ki = 0; ki < plan.group_by.size(); ++ki)
                row.vars[plan.group_by[ki]] = group_keys[gi][ki];
            for (const auto& agg : plan.aggregates)
                row.vars[agg.as_var] = aggregate_value(agg, groups[gi]);
            for (const auto& sol : groups[gi]) append_unique(row.trace, sol.trace);
            rows.push_back(std::move(row));
        }
    } else {
        for (auto& sol : solutions) {
            OutRow row;
            for (auto& [name, term] : sol.vars) row.vars[name] = term;
            row.trace = std::move(sol.trace);
            rows.push_back(std::move(row));
        }
    }

    if (!plan.order_by.empty()) {
        auto cell = [](const OutRow& r, const std::string& v) -> const std::optional<Term>* {
            auto it = r.vars.find(v);
            static const std::optional<Term> kUnbound;
            return it == r.vars.end() ? &kUnbound : &it->second;
        };
        std::stable_sort(rows.begin(), rows.end(), [&](const OutRow& a, const OutRow& b) {
            for (const auto& key : plan.order_by) {
                const auto& va = *cell(a, key.var);
                const auto& vb = *cell(b, key.var);
                if (!va && !vb) continue;
                if (!va) return false;  // unbound sorts last
                if (!vb) return true;
                int c = compare_terms(*va, *vb);
                if (c != 0) return key.ascending ? c < 0 : c > 0;
            }
            return false;
        });
    }

    // Projection, then DISTINCT keeping first occurrences (trace union on merge).
    std::map<ResultTable::Row, std::size_t> seen;
    for (auto& row : rows) {
        ResultTable::Row projected;
        for (const auto& v : plan.select_vars) {
            auto it = row.vars.find(v);
            projected.push_back(it == row.vars.end() ? std::nullopt : it->second);
        }
        if (plan.distinct) {
            auto [it, inserted] = seen.emplace(projected, result.table.rows.size());
            if (!inserted) {
                append_unique(result.row_triples[it->second], row.trace);
                continue;
            }
        }
        result.table.rows.push_back(std::move(projected));
        result.row_triples.push_back(std::move(row.trace));
    }
    return result;
}

ResultTable execute(const QueryPlan& plan, const rdf::Graph& graph) {
    return execute_traced(plan, graph).table;
}

}  // namespace graphtale::sparql
