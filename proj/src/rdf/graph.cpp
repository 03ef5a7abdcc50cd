#include "graphtale/rdf/graph.hpp"

#include <algorithm>
#include <set>

namespace graphtale::rdf {

namespace {
const Term& rdf_type_term() {
    static const Term t = Term::iri(std::string(iris::kRdfType));
    return t;
}
}  // namespace

std::uint32_t Graph::intern(const Term& t) {
    auto it = ids_.find(t);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(terms_.size());
    terms_.push_back(t);
    ids_.emplace(t, id);
    return id;
}

std::optional<std::uint32_t> Graph::find_id(const Term& t) const {
    auto it = ids_.find(t);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

void Graph::add(Triple t) {
    frozen_ = false;
    IdTriple id{intern(t.subject), intern(t.predicate), intern(t.object)};
    spo_.push_back(id);
}

void Graph::add_prefix(const std::string& prefix, const std::string& base) {
    prefixes_[prefix] = base;
}

void Graph::freeze() { ensure_frozen(); }

void Graph::ensure_frozen() const {
    if (frozen_) return;
    auto spo_key = [](const IdTriple& t) { return std::tuple(t.s, t.p, t.o); };
    std::sort(spo_.begin(), spo_.end(), [&](const IdTriple& a, const IdTriple& b) {
        return spo_key(a) < spo_key(b);
    });
    spo_.erase(std::unique(spo_.begin(), spo_.end()), spo_.end());
    pos_ = spo_;
    std::sort(pos_.begin(), pos_.end(), [](const IdTriple& a, const IdTriple& b) {
        return std::tuple(a.p, a.o, a.s) < std::tuple(b.p, b.o, b.s);
    });
    osp_ = spo_;
    std::sort(osp_.begin(), osp_.end(), [](const IdTriple& a, const IdTriple& b) {
        return std::tuple(a.o, a.s, a.p) < std::tuple(b.o, b.s, b.p);
    });
    frozen_ = true;
}

Triple Graph::materialize(const IdTriple& t) const {
    return Triple{terms_[t.s], terms_[t.p], terms_[t.o]};
}

std::vector<Triple> Graph::match(const TermPattern& s, const TermPattern& p,
                                 const TermPattern& o) const {
    std::vector<Triple> out;
    ensure_frozen();

    std::optional<std::uint32_t> sid, pid, oid;
    if (s) {
        sid = find_id(*s);
        if (!sid) return out;
    }
    if (p) {
        pid = find_id(*p);
        if (!pid) return out;
    }
    if (o) {
        oid = find_id(*o);
        if (!oid) return out;
    }

    // Pick the index with the longest bound prefix; its order is the
    // result order.
    enum class Index { Spo, Pos, Osp } index;
    if (sid)
        index = Index::Spo;  // covers S, SP, SPO
    else if (pid)
        index = Index::Pos;  // covers P, PO
    else if (oid)
        index = Index::Osp;  // covers O (and O+S is handled by Spo above)
    else
        index = Index::Spo;  // full scan

    if (sid && oid && !pid) index = Index::Osp;  // OS prefix beats S alone

    const std::vector<IdTriple>* table = nullptr;
    switch (index) {
        case Index::Spo: table = &spo_; break;
        case Index::Pos: table = &pos_; break;
        case Index::Osp: table = &osp_; break;
    }

    auto emit = [&](const IdTriple& t) {
        if (sid && t.s != *sid) return;
        if (pid && t.p != *pid) return;
        if (oid && t.o != *oid) return;
        out.push_back(materialize(t));
    };

    // Binary-search the bound prefix range, then filter the remainder.
    auto scan_range = [&](auto key_of, auto prefix) {
        auto lo = std::partition_point(table->begin(), table->end(), [&](const IdTriple& t) {
            return key_of(t) < prefix;
        });
        for (auto it = lo; it != table->end() && key_of(*it) == prefix; ++it) emit(*it);
    };

    switch (index) {
        case Index::Spo:
            if (sid)
                scan_range([](const IdTriple& t) { return t.s; }, *sid);
            else
                for (const auto& t : *table) emit(t);
            break;
        case Index::Pos:
            scan_range([](const IdTriple& t) { return t.p; }, *pid);
            break;
        case Index::Osp:
            scan_range([](const IdTriple& t) { return t.o; }, *oid);
            break;
    }
    return out;
}

bool Graph::contains(const Triple& t) const {
    auto res = match(t.subject, t.predicate, t.object);
    return !res.empty();
}

bool Graph::mentions(const Term& t) const {
    ensure_frozen();
    auto id = find_id(t);
    if (!id) return false;
    auto in_sorted = [&](const std::vector<IdTriple>& table, auto key_of) {
        auto lo = std::partition_point(table.begin(), table.end(), [&](const IdTriple& x) {
            return key_of(x) < *id;
        });
        return lo != table.end() && key_of(*lo) == *id;
    };
    return in_sorted(spo_, [](const IdTriple& x) { return x.s; }) ||
           in_sorted(osp_, [](const IdTriple& x) { return x.o; });
}

std::vector<Triple> Graph::triples() const {
    ensure_frozen();
    std::vector<Triple> out;
    out.reserve(spo_.size());
    for (const auto& t : spo_) out.push_back(materialize(t));
    return out;
}

std::vector<Term> Graph::terms() const {
    ensure_frozen();
    std::set<Term> seen;
    for (const auto& t : spo_) {
        seen.insert(terms_[t.s]);
        seen.insert(terms_[t.p]);
        seen.insert(terms_[t.o]);
    }
    return std::vector<Term>(seen.begin(), seen.end());
}

std::vector<Term> Graph::subjects_of_type(const Term& class_iri) const {
    std::set<Term> subjects;
    for (const auto& t : match(std::nullopt, rdf_type_term(), class_iri))
        subjects.insert(t.subject);
    return std::vector<Term>(subjects.begin(), subjects.end());
}

std::optional<std::string> Graph::label(const Term& t) const {
    std::optional<std::string> best;
    for (const auto& triple : match(t, Term::iri(std::string(iris::kSchemaName)), std::nullopt)) {
        if (!triple.object.is_literal()) continue;
        if (!best || triple.object.value < *best) best = triple.object.value;
    }
    return best;
}

std::string Graph::display_name(const Term& t) const {
    if (auto l = label(t)) return *l;
    return t.local_name();
}

GraphProfile Graph::profile() const {
    GraphProfile p;
    p.total_triples = size();
    std::set<std::uint32_t> classes, predicates, typed, dual;
    std::map<std::uint32_t, std::set<std::uint32_t>> types_by_subject;
    ensure_frozen();
    auto type_id = find_id(rdf_type_term());
    for (const auto& t : spo_) {
        if (type_id && t.p == *type_id) {
            classes.insert(t.o);
            typed.insert(t.s);
            types_by_subject[t.s].insert(t.o);
        } else {
            predicates.insert(t.p);
        }
    }
    for (const auto& [s, types] : types_by_subject)
        if (types.size() >= 2) dual.insert(s);
    p.distinct_classes = classes.size();
    p.distinct_predicates_excl_type = predicates.size();
    p.typed_subjects = typed.size();
    p.dual_typed_subjects = dual.size();
    return p;
}

std::string Graph::to_turtle() const {
    std::string out;
    for (const auto& [prefix, base] : prefixes_)
        out += "@prefix " + prefix + ": <" + base + "> .\n";
    if (!prefixes_.empty()) out += "\n";
    for (const auto& t : triples()) out += t.to_ntriples() + "\n";
    return out;
}

}  // namespace graphtale::rdf
