#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tempora/syntax.hpp"
#include "tempora/time.hpp"

namespace tempora {

enum class Marker { TimeDependent, Initial, Terminal, Bidirectional };

inline Marker parse_marker(const std::string& name) {
    if (name == "TimeDependent") return Marker::TimeDependent;
    if (name == "Initial") return Marker::Initial;
    if (name == "Terminal") return Marker::Terminal;
    if (name == "Bidirectional") return Marker::Bidirectional;
    throw DataError("unknown marker '" + name + "'");
}

struct Predicate {
    std::string name;
    int arity = 2;
    bool time_dependent = false;
};

/// A temporally qualified ground sentence. Point-shaped time inputs are
/// normalized to one-day intervals before they reach here.
struct Assertion {
    std::string id;
    Fluent fluent;
    std::string microtheory;
    TimeInterval time;
};

/// Members of collections reaching this one exist over a bounded lifespan;
/// the hull of their qualifying assertions is the existence interval.
inline constexpr const char* kExistenceCollection = "BiologicalLivingObject";

/// Ontology (collections, predicates, hierarchy links, temporal-semantic
/// markers) plus temporally qualified assertions. Single writer while
/// loading; afterwards an immutable snapshot, safe for concurrent readers.
class KbStore {
public:
    // --- declarations -------------------------------------------------

    void declare_collection(const std::string& name) { collections_.insert(name); }

    void declare_predicate(const std::string& name, int arity, bool time_dependent) {
        if (arity < 1) throw DataError("predicate arity must be at least 1: " + name);
        auto it = predicates_.find(name);
        if (it != predicates_.end()) {
            if (it->second.arity != arity)
                throw DataError("predicate " + name + " redeclared with arity " +
                                std::to_string(arity) + " (was " +
                                std::to_string(it->second.arity) + ")");
            it->second.time_dependent = it->second.time_dependent || time_dependent;
            return;
        }
        predicates_[name] = Predicate{name, arity, time_dependent};
    }

    void set_marker(const std::string& collection, Marker m) {
        declare_collection(collection);
        auto& ms = markers_[collection];
        if ((m == Marker::Initial && ms.count(Marker::Terminal)) ||
            (m == Marker::Terminal && ms.count(Marker::Initial)))
            throw DataError("collection " + collection + " cannot be both Initial and Terminal");
        ms.insert(m);
    }

    void add_genls(const std::string& sub, const std::string& super) {
        declare_collection(sub);
        declare_collection(super);
        add_edge(genls_up_, sub, super, "genls");
    }

    void add_genl_preds(const std::string& sub, const std::string& super) {
        if (!predicates_.count(sub)) declare_predicate(sub, 2, true);
        if (!predicates_.count(super)) declare_predicate(super, predicates_.at(sub).arity, true);
        add_edge(preds_up_, sub, super, "genlPreds");
    }

    void add_disjoint(const std::string& a, const std::string& b) {
        declare_collection(a);
        declare_collection(b);
        disjoint_.emplace_back(a, b);
    }

    /// followingStageTypes(earlier, later): a life as `earlier` ends before
    /// a life as `later` begins. Implies incompatibility plus ordering.
    void add_following_stage(const std::string& earlier, const std::string& later) {
        declare_collection(earlier);
        declare_collection(later);
        stages_.emplace_back(earlier, later);
    }

    std::string add_assertion(const Fluent& f, const std::string& microtheory,
                              const TimeInterval& time) {
        if (f.kind == FluentKind::Isa) {
            declare_collection(f.collection);
            entities_.insert(f.entity);
        } else {
            auto it = predicates_.find(f.predicate);
            if (it == predicates_.end())
                declare_predicate(f.predicate, static_cast<int>(f.args.size()), true);
            else if (it->second.arity != static_cast<int>(f.args.size()))
                throw DataError("arity mismatch: " + f.predicate + " declared with arity " +
                                std::to_string(it->second.arity) + ", used with " +
                                std::to_string(f.args.size()));
            for (const auto& a : f.args) entities_.insert(a);
        }
        std::string id = "a" + std::to_string(assertions_.size() + 1);
        assertions_.push_back(Assertion{id, f, microtheory, time});
        const std::size_t idx = assertions_.size() - 1;
        if (f.kind == FluentKind::Isa)
            isa_by_entity_[f.entity].push_back(idx);
        else
            rel_by_args_[arg_key(f.args)].push_back(idx);
        return id;
    }

    // --- ontology queries ----------------------------------------------

    /// Reflexive-transitive superset closure over genls.
    std::set<std::string> genls_closure(const std::string& c) const {
        if (!collections_.count(c)) throw DataError("unknown collection '" + c + "'");
        return closure(genls_up_, c);
    }

    /// Reflexive-transitive generalization closure over genlPreds.
    std::set<std::string> genl_preds_closure(const std::string& p) const {
        if (!predicates_.count(p)) throw DataError("unknown predicate '" + p + "'");
        return closure(preds_up_, p);
    }

    /// Superset nodes of `c` grouped by genls distance; level 0 is {c}.
    std::vector<std::vector<std::string>> genls_levels(const std::string& c) const {
        std::vector<std::vector<std::string>> levels{{c}};
        std::set<std::string> seen{c};
        while (true) {
            std::set<std::string> next;
            for (const auto& node : levels.back())
                if (auto it = genls_up_.find(node); it != genls_up_.end())
                    for (const auto& super : it->second)
                        if (!seen.count(super)) next.insert(super);
            if (next.empty()) break;
            seen.insert(next.begin(), next.end());
            levels.emplace_back(next.begin(), next.end());
        }
        return levels;
    }

    const std::set<Marker>* markers_of(const std::string& collection) const {
        auto it = markers_.find(collection);
        return it == markers_.end() ? nullptr : &it->second;
    }

    bool has_collection(const std::string& c) const { return collections_.count(c) > 0; }
    bool has_predicate(const std::string& p) const { return predicates_.count(p) > 0; }
    bool has_entity(const std::string& e) const { return entities_.count(e) > 0; }

    const Predicate* predicate(const std::string& p) const {
        auto it = predicates_.find(p);
        return it == predicates_.end() ? nullptr : &it->second;
    }

    // --- assertion queries ----------------------------------------------

    /// True iff a stored assertion entails `f` (same subject; stored
    /// collection/predicate at or below f's in the hierarchy) over an
    /// interval that subsumes `at`.
    bool holds_known(const Fluent& f, const TimeInterval& at) const {
        for (const Assertion* a : assertions_entailing(f))
            if (subsumes(a->time, at)) return true;
        return false;
    }

    /// Overlap variant: some entailing assertion intersects `span`.
    /// Covariate presence per period uses this permissive reading.
    bool known_overlapping(const Fluent& f, const TimeInterval& span) const {
        for (const Assertion* a : assertions_entailing(f))
            if (intersect(a->time, span)) return true;
        return false;
    }

    /// Every stored assertion whose fluent entails `f`.
    std::vector<const Assertion*> assertions_entailing(const Fluent& f) const {
        std::vector<const Assertion*> out;
        if (f.kind == FluentKind::Isa) {
            auto it = isa_by_entity_.find(f.entity);
            if (it == isa_by_entity_.end()) return out;
            for (std::size_t idx : it->second) {
                const Assertion& a = assertions_[idx];
                if (closure(genls_up_, a.fluent.collection).count(f.collection))
                    out.push_back(&a);
            }
        } else {
            auto it = rel_by_args_.find(arg_key(f.args));
            if (it == rel_by_args_.end()) return out;
            for (std::size_t idx : it->second) {
                const Assertion& a = assertions_[idx];
                if (closure(preds_up_, a.fluent.predicate).count(f.predicate))
                    out.push_back(&a);
            }
        }
        return out;
    }

    std::vector<const Assertion*> isa_assertions_about(const std::string& entity) const {
        std::vector<const Assertion*> out;
        auto it = isa_by_entity_.find(entity);
        if (it == isa_by_entity_.end()) return out;
        for (std::size_t idx : it->second) out.push_back(&assertions_[idx]);
        return out;
    }

    const std::vector<Assertion>& assertions() const { return assertions_; }

    /// Two Isa fluents about the same entity clash when their collections
    /// (or any genls ancestors) are disjointWith-linked, or stage-linked in
    /// either direction. Relation fluents never clash here.
    bool incompatible(const Fluent& p, const Fluent& q) const {
        if (p.kind != FluentKind::Isa || q.kind != FluentKind::Isa) return false;
        if (p.entity != q.entity) return false;
        const auto cp = closure(genls_up_, p.collection);
        const auto cq = closure(genls_up_, q.collection);
        for (const auto& [a, b] : disjoint_)
            if ((cp.count(a) && cq.count(b)) || (cp.count(b) && cq.count(a))) return true;
        for (const auto& [a, b] : stages_)
            if ((cp.count(a) && cq.count(b)) || (cp.count(b) && cq.count(a))) return true;
        return false;
    }

    /// True iff a stage link orders `earlier_col` (or an ancestor) before
    /// `later_col` (or an ancestor). Consumed by constraint truncation.
    bool stage_precedes(const std::string& earlier_col, const std::string& later_col) const {
        const auto ce = closure(genls_up_, earlier_col);
        const auto cl = closure(genls_up_, later_col);
        for (const auto& [a, b] : stages_)
            if (ce.count(a) && cl.count(b)) return true;
        return false;
    }

    /// Lifespan: the hull of assertions placing the entity in a collection
    /// that reaches BiologicalLivingObject. Absent means unbounded existence.
    std::optional<TimeInterval> existence_interval(const std::string& entity) const {
        std::optional<TimeInterval> out;
        for (const Assertion* a : isa_assertions_about(entity)) {
            if (!closure(genls_up_, a->fluent.collection).count(kExistenceCollection)) continue;
            out = out ? hull(*out, a->time) : a->time;
        }
        return out;
    }

private:
    using Edges = std::map<std::string, std::vector<std::string>>;

    static std::string arg_key(const std::vector<std::string>& args) {
        std::string key;
        for (const auto& a : args) {
            key += a;
            key += '\x1f';
        }
        return key;
    }

    void add_edge(Edges& up, const std::string& sub, const std::string& super,
                  const char* what) {
        if (sub == super || closure(up, super).count(sub))
            throw DataError(std::string(what) + " cycle: adding " + sub + " -> " + super);
        up[sub].push_back(super);
    }

    static std::set<std::string> closure(const Edges& up, const std::string& start) {
        std::set<std::string> seen{start};
        std::vector<std::string> stack{start};
        while (!stack.empty()) {
            std::string node = std::move(stack.back());
            stack.pop_back();
            auto it = up.find(node);
            if (it == up.end()) continue;
            for (const auto& super : it->second)
                if (seen.insert(super).second) stack.push_back(super);
        }
        return seen;
    }

    std::set<std::string> collections_;
    std::map<std::string, Predicate> predicates_;
    std::map<std::string, std::set<Marker>> markers_;
    Edges genls_up_;
    Edges preds_up_;
    std::vector<std::pair<std::string, std::string>> disjoint_;
    std::vector<std::pair<std::string, std::string>> stages_;
    std::vector<Assertion> assertions_;
    std::set<std::string> entities_;
    std::map<std::string, std::vector<std::size_t>> isa_by_entity_;
    std::map<std::string, std::vector<std::size_t>> rel_by_args_;
};

} // namespace tempora
