#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tempora/events.hpp"
#include "tempora/hazard.hpp"
#include "tempora/kb.hpp"

namespace tempora {

/// Everything a query runs against: ontology + assertions, event timeline,
/// hazard registry. Loaded once, then read-only.
struct World {
    KbStore kb;
    EventStore events;
    HazardRegistry hazards;
};

enum class ProjectionSource {
    EventBracket,      // initiator/terminator pair around the query
    HazardSubsumed,    // hazard interval preferred inside the event bracket
    ForwardFromEvent,  // hazard extension forward from the closest initiator
    BackwardFromEvent, // hazard extension backward from the closest terminator
    HazardOnly,        // hazard extension from a stored anchor assertion
    FixedDuration,     // fixed-term default rule
    Marker,            // Initial/Terminal/Bidirectional collection semantics
};

inline const char* to_string(ProjectionSource s) {
    switch (s) {
        case ProjectionSource::EventBracket: return "event-bracket";
        case ProjectionSource::HazardSubsumed: return "hazard-subsumed";
        case ProjectionSource::ForwardFromEvent: return "forward-from-event";
        case ProjectionSource::BackwardFromEvent: return "backward-from-event";
        case ProjectionSource::HazardOnly: return "hazard-only";
        case ProjectionSource::FixedDuration: return "fixed-duration";
        case ProjectionSource::Marker: return "marker";
    }
    return "?";
}

struct ProjectionResult {
    std::optional<TimeInterval> interval;  // always subsumes the query when present
    ProjectionSource source = ProjectionSource::HazardOnly;
    bool truncated = false;
};

enum class Mode { M1, M2 };
enum class Verdict { True, Unknown };

inline const char* to_string(Mode m) { return m == Mode::M1 ? "m1" : "m2"; }
inline const char* to_string(Verdict v) { return v == Verdict::True ? "True" : "Unknown"; }

inline Mode parse_mode(const std::string& s) {
    if (s == "m1" || s == "M1") return Mode::M1;
    if (s == "m2" || s == "M2") return Mode::M2;
    throw DataError("unknown mode '" + s + "' (expected m1 or m2)");
}

namespace detail {

inline void trace_line(std::vector<std::string>* trace, std::string line) {
    if (trace) trace->push_back(std::move(line));
}

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DataError("threshold alpha must lie strictly in (0,1), got " +
                        std::to_string(alpha));
}

inline void check_symbols(const World& world, const Fluent& f) {
    if (f.kind == FluentKind::Isa) {
        if (!world.kb.has_collection(f.collection))
            throw DataError("unknown collection '" + f.collection + "'");
        if (!world.kb.has_entity(f.entity) && !world.events.has_role_player(f.entity))
            throw DataError("unknown entity '" + f.entity + "'");
    } else {
        if (!world.kb.has_predicate(f.predicate))
            throw DataError("unknown predicate '" + f.predicate + "'");
        const Predicate* p = world.kb.predicate(f.predicate);
        if (p && p->arity != static_cast<int>(f.args.size()))
            throw DataError("arity mismatch for " + f.predicate);
    }
}

/// Known-true anchor: the latest-starting evidence not after `limit`,
/// drawn from entailing assertions and initiating events alike.
inline std::optional<TimeInterval> find_anchor(const World& world, const Fluent& f,
                                               TimePoint limit) {
    std::optional<TimeInterval> best;
    const auto consider = [&](const TimeInterval& candidate) {
        if (candidate.start > limit) return;
        if (!best || candidate.start > best->start ||
            (candidate.start == best->start && candidate.end > best->end))
            best = candidate;
    };
    for (const Assertion* a : world.kb.assertions_entailing(f)) consider(a->time);
    for (const Event* e : world.events.initiators(f, world.kb)) consider(day_interval(e->time));
    return best;
}

/// Hull of everything the store knows to be true, for marker projection.
inline std::optional<TimeInterval> known_hull(const World& world, const Fluent& f) {
    std::optional<TimeInterval> out;
    for (const Assertion* a : world.kb.assertions_entailing(f))
        out = out ? hull(*out, a->time) : a->time;
    return out;
}

/// Hazard-likely region for a fluent anchored at one known-true interval:
/// forward survival extension from the last risk start (or the anchor
/// start), reaching back to the anchor start. Known terminating events keep
/// the region event-consistent: the earliest terminator past the anchor
/// caps it, the latest terminator before the anchor floors it. Absent when
/// the hazard and the events leave no consistent region.
inline std::optional<TimeInterval> hazard_region(const World& world, const Fluent& f,
                                                 const HazardSpec& spec,
                                                 const TimeInterval& anchor, TimePoint not_after,
                                                 double alpha, std::int64_t horizon) {
    std::optional<TimePoint> risk = world.events.last_risk_start(f, world.kb, not_after);
    const TimePoint origin = risk ? *risk : anchor.start;
    const CovariateTrajectory traj =
        build_trajectory(spec, world.kb, f.subject(), origin, false, horizon);
    const TimeInterval fwd = forward_interval(spec, origin, traj, alpha, horizon);
    TimePoint lo = std::min(origin, anchor.start);
    TimePoint hi = fwd.end;
    for (const Event* t : world.events.terminators(f, world.kb)) {
        if (t->time > anchor.end) hi = std::min(hi, t->time);
        if (t->time < anchor.start) lo = std::max(lo, t->time.plus_days(1));
    }
    if (lo > hi) return std::nullopt;
    return TimeInterval{lo, hi};
}

struct Pieces {
    std::vector<TimeInterval> parts;

    explicit Pieces(TimeInterval whole) : parts{whole} {}

    void subtract(const TimeInterval& cut) {
        std::vector<TimeInterval> next;
        for (const TimeInterval& p : parts) {
            if (!intersect(p, cut)) {
                next.push_back(p);
                continue;
            }
            if (p.start < cut.start) next.push_back(TimeInterval{p.start, cut.start.plus_days(-1)});
            if (cut.end < p.end) next.push_back(TimeInterval{cut.end.plus_days(1), p.end});
        }
        parts = std::move(next);
    }

    void cap_end(TimePoint latest) {
        std::vector<TimeInterval> next;
        for (const TimeInterval& p : parts) {
            if (p.start > latest) continue;
            next.push_back(TimeInterval{p.start, std::min(p.end, latest)});
        }
        parts = std::move(next);
    }

    std::optional<TimeInterval> covering(const TimeInterval& query) const {
        for (const TimeInterval& p : parts)
            if (subsumes(p, query)) return p;
        return std::nullopt;
    }
};

} // namespace detail

/// Removes from `interval` every stretch where a fluent incompatible with
/// `f` is known true or is itself hazard-likely above `alpha`; a stage
/// ordering additionally caps the interval the day before the successor
/// stage's earliest evidence. Returns the maximal surviving piece containing
/// the query, or absent when the query itself is contradicted.
inline std::optional<TimeInterval> truncate_by_constraints(
    const World& world, const TimeInterval& interval, const Fluent& f,
    const TimeInterval& query, double alpha,
    std::int64_t horizon = kDefaultHorizonPeriods) {
    if (f.kind != FluentKind::Isa) return interval;

    detail::Pieces pieces{interval};
    std::set<std::string> seen;
    for (const Assertion* a : world.kb.isa_assertions_about(f.entity)) {
        const std::string& col = a->fluent.collection;
        if (col == f.collection || !seen.insert(col).second) continue;
        const Fluent q = Fluent::isa(f.entity, col);
        if (!world.kb.incompatible(f, q)) continue;

        std::optional<ResolvedHazard> rq = resolve_hazard(q, world.hazards, world.kb);
        std::optional<TimePoint> earliest_evidence;
        for (const Assertion* qa : world.kb.assertions_entailing(q)) {
            pieces.subtract(qa->time);
            if (!earliest_evidence || qa->time.start < *earliest_evidence)
                earliest_evidence = qa->time.start;
            if (rq) {
                try {
                    auto region = detail::hazard_region(world, q, *rq->spec, qa->time,
                                                        qa->time.start, alpha, horizon);
                    if (region) pieces.subtract(*region);
                } catch (const UnboundedIntervalError&) {
                    // no finite likely region; only known evidence truncates
                }
            }
        }
        if (earliest_evidence && world.kb.stage_precedes(f.collection, col))
            pieces.cap_end(earliest_evidence->plus_days(-1));
    }
    return pieces.covering(query);
}

/// Extrapolates where fluent `f` holds around the query interval: marker and
/// fixed-duration defaults first, then the event bracket around the query
/// (preferring a hazard interval the bracket subsumes), then hazard
/// extensions anchored on the closest initiator/terminator, and finally a
/// hazard-only interval around the last stored anchor, truncated by
/// incompatibility constraints. A present interval always subsumes the
/// query; absent means the engine cannot commit.
inline ProjectionResult temporally_project(const World& world, const Fluent& f,
                                           const TimeInterval& query, double alpha,
                                           std::vector<std::string>* trace = nullptr,
                                           std::int64_t horizon = kDefaultHorizonPeriods) {
    detail::check_alpha(alpha);
    detail::check_symbols(world, f);
    ProjectionResult result;

    // Markers and fixed-duration defaults encode near-deterministic
    // knowledge; they short-circuit when they already cover the query.
    if (auto hull = detail::known_hull(world, f)) {
        if (auto mi = marker_interval(f, *hull, world.kb)) {
            detail::trace_line(trace, "marker: known " + hull->to_string() + " projects to " +
                                          mi->to_string());
            if (subsumes(*mi, query)) {
                result.interval = *mi;
                result.source = ProjectionSource::Marker;
                return result;
            }
        }
    }
    if (auto fd = fixed_duration_interval(f, world.hazards, query.start)) {
        bool contradicted = false;
        for (const Event* t : world.events.terminators(f, world.kb))
            if (fd->contains(t->time)) contradicted = true;
        detail::trace_line(trace, std::string("fixed-duration: ") + fd->to_string() +
                                      (contradicted ? " overridden by terminator" : ""));
        if (!contradicted && subsumes(*fd, query)) {
            result.interval = *fd;
            result.source = ProjectionSource::FixedDuration;
            return result;
        }
    }

    const auto initiators = world.events.initiators(f, world.kb);
    const auto terminators = world.events.terminators(f, world.kb);
    const std::optional<ResolvedHazard> resolved = resolve_hazard(f, world.hazards, world.kb);

    // A terminator inside the query span (before its closing day) means the
    // fluent is known to stop there; no single interval can cover the query.
    for (const Event* t : terminators)
        if (t->time >= query.start && t->time < query.end) {
            detail::trace_line(trace, "terminator " + t->id + " inside the query span");
            return result;
        }

    // Step 1: bracket the query between the tightest initiator/terminator
    // pair; prefer the hazard interval when the bracket subsumes it.
    if (auto bracket = world.events.select_bracketing(f, world.kb, query.start)) {
        const auto& [e1, e2] = *bracket;
        if (e2->time > query.end) {
            const TimeInterval event_interval{e1->time, e2->time};
            detail::trace_line(trace, "step 1: bracket [" + e1->id + " " + e2->id + "] = " +
                                          event_interval.to_string());
            if (resolved) {
                const HazardSpec& spec = *resolved->spec;
                std::optional<TimePoint> risk =
                    world.events.last_risk_start(f, world.kb, query.start);
                const TimePoint origin = risk ? *risk : e1->time;
                const CovariateTrajectory traj =
                    build_trajectory(spec, world.kb, f.subject(), origin, false, horizon);
                try {
                    const TimeInterval hz = forward_interval(spec, origin, traj, alpha, horizon);
                    detail::trace_line(trace, "step 1: hazard interval " + hz.to_string());
                    if (subsumes(event_interval, hz) && subsumes(hz, query)) {
                        detail::trace_line(trace, "step 1: bracket subsumes hazard -> hazard");
                        result.interval = hz;
                        result.source = ProjectionSource::HazardSubsumed;
                        return result;
                    }
                    detail::trace_line(trace, "step 1: keeping event bracket");
                } catch (const UnboundedIntervalError&) {
                    detail::trace_line(trace, "step 1: hazard unbounded; keeping event bracket");
                }
            }
            result.interval = event_interval;
            result.source = ProjectionSource::EventBracket;
            return result;
        }
        detail::trace_line(trace, "step 1: terminator " + e2->id + " precedes query end");
    }

    // Step 2: only initiating events known; extend forward from the closest.
    if (!initiators.empty() && terminators.empty() && resolved) {
        if (const Event* e1 = world.events.latest_initiator_before(f, world.kb, query.start)) {
            const HazardSpec& spec = *resolved->spec;
            const CovariateTrajectory traj =
                build_trajectory(spec, world.kb, f.subject(), e1->time, false, horizon);
            try {
                const TimeInterval fwd = forward_interval(spec, e1->time, traj, alpha, horizon);
                detail::trace_line(trace, "step 2: forward from " + e1->id + " = " +
                                              fwd.to_string());
                if (subsumes(fwd, query)) {
                    result.interval = fwd;
                    result.source = ProjectionSource::ForwardFromEvent;
                    return result;
                }
            } catch (const UnboundedIntervalError&) {
                detail::trace_line(trace, "step 2: hazard unbounded");
            }
        }
    }

    // Step 3: only terminating events known; extend backward from the closest.
    if (initiators.empty() && !terminators.empty() && resolved) {
        if (const Event* e2 = world.events.earliest_terminator_after(f, world.kb, query.start)) {
            const HazardSpec& spec = *resolved->spec;
            const CovariateTrajectory traj =
                build_trajectory(spec, world.kb, f.subject(), e2->time, true, horizon);
            try {
                const TimeInterval bwd = backward_interval(spec, e2->time, traj, alpha, horizon);
                detail::trace_line(trace, "step 3: backward from " + e2->id + " = " +
                                              bwd.to_string());
                if (subsumes(bwd, query)) {
                    result.interval = bwd;
                    result.source = ProjectionSource::BackwardFromEvent;
                    return result;
                }
            } catch (const UnboundedIntervalError&) {
                detail::trace_line(trace, "step 3: hazard unbounded");
            }
        }
    }

    // Step 4: hazard-only interval around the last known-true anchor,
    // then step 5: constraint truncation.
    result.source = ProjectionSource::HazardOnly;
    if (!resolved) {
        detail::trace_line(trace, "step 4: no hazard spec resolves");
        return result;
    }
    const std::optional<TimeInterval> anchor = detail::find_anchor(world, f, query.start);
    if (!anchor) {
        detail::trace_line(trace, "step 4: no known-true anchor at or before the query");
        return result;
    }
    const std::optional<TimeInterval> region =
        detail::hazard_region(world, f, *resolved->spec, *anchor, query.start, alpha, horizon);
    if (!region) {
        detail::trace_line(trace, "step 4: known terminators leave no consistent region");
        return result;
    }
    detail::trace_line(trace, "step 4: hazard interval " + region->to_string() + " from anchor " +
                                  anchor->to_string());
    const std::optional<TimeInterval> kept =
        truncate_by_constraints(world, *region, f, query, alpha, horizon);
    if (!kept) {
        detail::trace_line(trace, "step 5: query contradicted by incompatible evidence");
        result.truncated = true;
        return result;
    }
    result.truncated = *kept != *region;
    if (result.truncated)
        detail::trace_line(trace, "step 5: truncated to " + kept->to_string());
    if (subsumes(*kept, query)) {
        result.interval = *kept;
        return result;
    }
    detail::trace_line(trace, "step 4/5: interval does not cover the query");
    return result;
}

/// Survival-based likelihood that `f` still holds at `t`, anchored at the
/// last known-true time with no intervening terminator.
inline double prob_holds(const World& world, const Fluent& f, TimePoint t,
                         std::int64_t horizon = kDefaultHorizonPeriods) {
    detail::check_symbols(world, f);
    const std::optional<ResolvedHazard> resolved = resolve_hazard(f, world.hazards, world.kb);
    if (!resolved) throw DataError("no hazard spec resolves for " + f.to_string());

    std::optional<TimePoint> t0;
    for (const Assertion* a : world.kb.assertions_entailing(f)) {
        if (a->time.start > t) continue;
        const TimePoint known = std::min(a->time.end, t);
        if (!t0 || known > *t0) t0 = known;
    }
    for (const Event* e : world.events.initiators(f, world.kb))
        if (e->time <= t && (!t0 || e->time > *t0)) t0 = e->time;
    if (!t0) throw DataError("no known-true anchor at or before " + t.to_string() + " for " +
                             f.to_string());
    for (const Event* e : world.events.terminators(f, world.kb))
        if (e->time > *t0 && e->time <= t)
            throw DataError("terminating event " + e->id + " intervenes before " + t.to_string());

    const std::optional<TimePoint> risk = world.events.last_risk_start(f, world.kb, t);
    const TimePoint origin = risk ? *risk : *t0;
    if (t <= origin) return 1.0;
    const HazardSpec& spec = *resolved->spec;
    const PeriodScheme scheme{origin, spec.period_days};
    const std::int64_t j = scheme.period_index(t);
    const CovariateTrajectory traj =
        build_trajectory(spec, world.kb, f.subject(), origin, false, std::max(j, horizon));
    return survival(spec, j, traj);
}

/// Answers "was `f` true throughout `query`?". M1 is lookup plus hierarchy
/// and temporal subsumption; M2 additionally accepts a projected interval
/// covering the query. Projection is never applied recursively.
inline Verdict answer(const World& world, const Fluent& f, const TimeInterval& query, Mode mode,
                      double alpha, std::int64_t horizon = kDefaultHorizonPeriods) {
    if (world.kb.holds_known(f, query)) return Verdict::True;
    if (mode == Mode::M1) return Verdict::Unknown;
    detail::check_alpha(alpha);
    try {
        const ProjectionResult pr = temporally_project(world, f, query, alpha, nullptr, horizon);
        if (pr.interval && subsumes(*pr.interval, query)) return Verdict::True;
    } catch (const UnboundedIntervalError&) {
        // a degenerate hazard cannot certify anything
    }
    return Verdict::Unknown;
}

} // namespace tempora
