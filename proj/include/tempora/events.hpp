#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempora/kb.hpp"
#include "tempora/syntax.hpp"
#include "tempora/time.hpp"

namespace tempora {

/// A typed occurrence at a time point with named role players.
struct Event {
    std::string id;
    std::string type;  // collection name; rules match through genls
    TimePoint time;
    std::map<std::string, std::string> roles;

    const std::string* role(const std::string& name) const {
        auto it = roles.find(name);
        return it == roles.end() ? nullptr : &it->second;
    }
};

/// An event of this type opens a risk period in which its role player
/// could enter (or leave) the named state.
struct RiskPeriodRule {
    std::string event_type;
    std::string role;
    std::string state;
};

enum class EffectKind { Initiates, Terminates };

/// Type-level effect: every matching event starts/ends an interval for
/// (isa <role player> <collection>).
struct TypeEffectRule {
    EffectKind kind;
    std::string event_type;
    std::string role;
    std::string collection;
};

/// Instance-level effect: one named event starts/ends an interval for one
/// ground fluent.
struct InstanceEffect {
    EffectKind kind;
    std::string event_id;
    Fluent fluent;
};

/// Event timeline plus the rules that derive initiations, terminations and
/// risk-period starts. Immutable after load; reads are safe concurrently.
class EventStore {
public:
    void add_event(Event e) {
        if (by_id_.count(e.id)) throw DataError("duplicate event id " + e.id);
        by_id_[e.id] = events_.size();
        events_.push_back(std::move(e));
    }

    void add_risk_rule(RiskPeriodRule r) { risk_rules_.push_back(std::move(r)); }
    void add_type_rule(TypeEffectRule r) { type_rules_.push_back(std::move(r)); }

    void add_instance_effect(InstanceEffect e) {
        if (!by_id_.count(e.event_id))
            throw DataError("effect references unknown event " + e.event_id);
        instance_effects_.push_back(std::move(e));
    }

    const std::vector<Event>& events() const { return events_; }
    const Event* event(const std::string& id) const {
        auto it = by_id_.find(id);
        return it == by_id_.end() ? nullptr : &events_[it->second];
    }
    bool has_role_player(const std::string& entity) const {
        for (const Event& e : events_)
            for (const auto& [role, player] : e.roles)
                if (player == entity) return true;
        return false;
    }

    /// Risk-period starting points for `f`: the time of every event whose
    /// type (through genls) and role binding match a rule producing `f`.
    /// Ascending, duplicate times collapsed.
    std::vector<TimePoint> risk_starts(const Fluent& f, const KbStore& kb) const {
        std::vector<TimePoint> out;
        if (f.kind != FluentKind::Isa) return out;
        for (const RiskPeriodRule& r : risk_rules_) {
            if (r.state != f.collection) continue;
            for (const Event& e : events_) {
                if (!type_matches(e.type, r.event_type, kb)) continue;
                const std::string* player = e.role(r.role);
                if (player && *player == f.entity) out.push_back(e.time);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Latest risk-period start at or before `not_after`.
    std::optional<TimePoint> last_risk_start(const Fluent& f, const KbStore& kb,
                                             TimePoint not_after) const {
        std::optional<TimePoint> out;
        for (TimePoint t : risk_starts(f, kb))
            if (t <= not_after) out = t;
        return out;
    }

    /// Events starting an interval for `f`, time-ascending (id breaks ties).
    std::vector<const Event*> initiators(const Fluent& f, const KbStore& kb) const {
        return effects_of(f, kb, EffectKind::Initiates);
    }

    /// Events ending an interval for `f`, time-ascending.
    std::vector<const Event*> terminators(const Fluent& f, const KbStore& kb) const {
        return effects_of(f, kb, EffectKind::Terminates);
    }

    /// Latest initiator strictly before `t`.
    const Event* latest_initiator_before(const Fluent& f, const KbStore& kb, TimePoint t) const {
        const Event* best = nullptr;
        for (const Event* e : initiators(f, kb))
            if (e->time < t) best = e;
        return best;
    }

    /// Earliest terminator strictly after `t`.
    const Event* earliest_terminator_after(const Fluent& f, const KbStore& kb, TimePoint t) const {
        for (const Event* e : terminators(f, kb))
            if (e->time > t) return e;
        return nullptr;
    }

    /// Tightest initiator/terminator pair around `t`: the latest initiator
    /// before and the earliest terminator after. Absent if either side is
    /// missing, or a terminator falls in [T1, t) and breaks the interval
    /// (a terminator sharing the initiator's time point wins over it).
    std::optional<std::pair<const Event*, const Event*>> select_bracketing(
        const Fluent& f, const KbStore& kb, TimePoint t) const {
        const Event* e1 = latest_initiator_before(f, kb, t);
        const Event* e2 = earliest_terminator_after(f, kb, t);
        if (!e1 || !e2) return std::nullopt;
        for (const Event* term : terminators(f, kb))
            if (term->time >= e1->time && term->time < t) return std::nullopt;
        return std::make_pair(e1, e2);
    }

private:
    static bool type_matches(const std::string& event_type, const std::string& rule_type,
                             const KbStore& kb) {
        if (event_type == rule_type) return true;
        if (!kb.has_collection(event_type)) return false;
        return kb.genls_closure(event_type).count(rule_type) > 0;
    }

    std::vector<const Event*> effects_of(const Fluent& f, const KbStore& kb,
                                         EffectKind kind) const {
        std::vector<const Event*> out;
        for (const InstanceEffect& eff : instance_effects_) {
            if (eff.kind != kind || !(eff.fluent == f)) continue;
            out.push_back(&events_[by_id_.at(eff.event_id)]);
        }
        if (f.kind == FluentKind::Isa) {
            for (const TypeEffectRule& r : type_rules_) {
                if (r.kind != kind || r.collection != f.collection) continue;
                for (const Event& e : events_) {
                    if (!type_matches(e.type, r.event_type, kb)) continue;
                    const std::string* player = e.role(r.role);
                    if (player && *player == f.entity) out.push_back(&e);
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const Event* a, const Event* b) {
            if (a->time != b->time) return a->time < b->time;
            return a->id < b->id;
        });
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::vector<Event> events_;
    std::map<std::string, std::size_t> by_id_;
    std::vector<RiskPeriodRule> risk_rules_;
    std::vector<TypeEffectRule> type_rules_;
    std::vector<InstanceEffect> instance_effects_;
};

} // namespace tempora
