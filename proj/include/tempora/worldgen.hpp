#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tempora/loader.hpp"
#include "tempora/syntax.hpp"
#include "tempora/time.hpp"

namespace tempora {

/// Synthetic-world dials. The seed fully determines every output byte.
struct WorldConfig {
    std::uint64_t seed = 42;
    int n_individuals = 1200;
    /// Fraction of each true span exposed as one assertion window
    /// (minimum one day); 1.0 exposes full spans.
    double observation_density = 0.3;
    /// Probability that an event (with its instance effects) is emitted.
    double event_density = 0.4;
    int queries_per_set = 240;
    int career_entry_age = 20;  // years; cricketer-analog careers start here
    int retirement_age = 45;    // survival-curve checkpoint for the career spec
};

/// Exact true interval sets, kept apart from the partial observations.
struct GroundTruth {
    std::map<std::string, std::vector<TimeInterval>> spans;  // fluent text -> intervals
    std::map<std::string, TimeInterval> existence;           // individual -> lifespan

    bool true_at(const std::string& fluent_text, TimePoint t) const {
        auto it = spans.find(fluent_text);
        if (it == spans.end()) return false;
        for (const TimeInterval& s : it->second)
            if (s.contains(t)) return true;
        return false;
    }
};

struct GeneratedWorld {
    std::string kb_text;
    std::string events_text;
    std::string hazards_text;
    std::string queries_text;
    std::string answers_csv;
    std::string truth_csv;
    GroundTruth truth;
};

namespace detail {

/// Deterministic draws layered over the engine stream; the standard
/// distributions stay out so outputs cannot shift between library builds.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return uniform() < p; }
};

} // namespace detail

/// Draws the period of the terminating event from a per-period hazard table
/// (last value extends), period by period. Returns 0 when no event occurs
/// within `max_periods` (censored).
inline std::int64_t sample_event_period(const std::vector<double>& h, detail::Rng& rng,
                                        std::int64_t max_periods) {
    for (std::int64_t j = 1; j <= max_periods; ++j) {
        const std::size_t idx = static_cast<std::size_t>(j) <= h.size()
                                    ? static_cast<std::size_t>(j) - 1
                                    : h.size() - 1;
        if (rng.uniform() < h[idx]) return j;
    }
    return 0;
}

namespace detail {

// True hazard tables; the shipped hazard file carries the same values, so
// the engine extrapolates with the distributions the world was drawn from.
inline const std::vector<double>& mortality_table() {
    static const std::vector<double> t = [] {
        std::vector<double> v(39, 0.004);
        v.insert(v.end(), 20, 0.01);
        v.insert(v.end(), 15, 0.04);
        v.insert(v.end(), 15, 0.12);
        v.push_back(0.5);
        return v;
    }();
    return t;
}
inline const std::vector<double>& cricketer_table() {
    static const std::vector<double> t = [] {
        std::vector<double> v(10, 0.02);
        v.insert(v.end(), 5, 0.08);
        v.insert(v.end(), 5, 0.25);
        v.push_back(0.5);
        return v;
    }();
    return t;
}
inline const std::vector<double>& actor_table() {
    static const std::vector<double> t = [] {
        std::vector<double> v(10, 0.05);
        v.insert(v.end(), 10, 0.10);
        v.push_back(0.2);
        return v;
    }();
    return t;
}
inline const std::vector<double>& divorce_table() {
    static const std::vector<double> t = [] {
        std::vector<double> v(3, 0.02);
        v.insert(v.end(), 7, 0.035);
        v.push_back(0.02);
        return v;
    }();
    return t;
}
inline const std::vector<double>& remarriage_table() {
    static const std::vector<double> t = [] {
        std::vector<double> v(5, 0.08);
        v.push_back(0.04);
        return v;
    }();
    return t;
}
inline const std::vector<double>& automobile_table() {
    static const std::vector<double> t{0.08};
    return t;
}
inline const std::vector<double>& gadget_table() {
    static const std::vector<double> t{0.35};
    return t;
}

inline std::string table_text(const std::vector<double>& h) {
    std::string out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) out += ' ';
        out += format_number(h[i]);
    }
    return out;
}

struct Emitter {
    GeneratedWorld out;
    Rng rng;
    const WorldConfig& cfg;

    Emitter(const WorldConfig& c) : rng(c.seed), cfg(c) {}

    void truth_span(const Fluent& f, const TimeInterval& span) {
        out.truth.spans[f.to_string()].push_back(span);
    }

    /// Exposes one window of a true span as an assertion, sized by the
    /// observation density.
    void observe(const Fluent& f, const TimeInterval& span) {
        const std::int64_t len = span.length_days();
        std::int64_t window = static_cast<std::int64_t>(cfg.observation_density * len + 0.5);
        window = std::max<std::int64_t>(1, std::min(window, len));
        const std::int64_t offset = rng.range(0, len - window);
        const TimePoint a = span.start.plus_days(offset);
        const TimePoint b = a.plus_days(window - 1);
        out.kb_text += "(assert :mt PeopleDataMt :time (interval " + a.to_string() + " " +
                       b.to_string() + ") " + f.to_string() + ")\n";
    }

    void truth_and_observe(const Fluent& f, const TimeInterval& span) {
        truth_span(f, span);
        observe(f, span);
    }

    int event_counter = 0;
    /// Emits the event (and returns true) with probability event_density.
    bool event(const std::string& type, const std::string& role, const std::string& player,
               TimePoint t, double density, const std::string& instance_effects = "") {
        if (!rng.chance(density)) return false;
        const std::string id = "ev" + std::to_string(++event_counter);
        out.events_text += "(event :id " + id + " :type " + type + " :time " + t.to_string() +
                           " :roles ((" + role + " " + player + ")))\n";
        if (!instance_effects.empty()) {
            // placeholder %ID% lets callers attach instance-level effects
            std::string effects = instance_effects;
            std::size_t pos;
            while ((pos = effects.find("%ID%")) != std::string::npos) effects.replace(pos, 4, id);
            out.events_text += effects;
        }
        return true;
    }
};

} // namespace detail

/// Samples `per_set` queries for each themed set: positive and negative
/// times alternate (so the mix stays within one of 50/50), every query time
/// lies inside the individual's existence, and lifespan-decidable times
/// (outside existence) never occur by construction.
inline std::pair<std::string, std::string> sample_queries(const GroundTruth& truth, int per_set,
                                                          std::uint64_t seed) {
    detail::Rng rng(seed);

    std::vector<std::string> people;
    for (const auto& [person, span] : truth.existence) {
        (void)span;
        people.push_back(person);
    }
    if (people.empty()) throw DataError("ground truth has no individuals");

    // family of candidate fluents per person per set, read off the truth keys
    std::map<std::string, std::vector<Fluent>> by_subject;
    for (const auto& [text, spans] : truth.spans) {
        (void)spans;
        const Fluent f = Fluent::parse_text(text);
        by_subject[f.subject()].push_back(f);
    }

    const auto spans_of = [&](const Fluent& f) {
        std::vector<TimeInterval> out;
        const auto exact = truth.spans.find(f.to_string());
        if (exact != truth.spans.end()) out = exact->second;
        // derived families: the career parent covers both career types, and
        // the owns->possesses generalization shares the owns spans
        if (f.kind == FluentKind::Isa && f.collection == "CareerActive") {
            for (const char* sub : {"CricketerAnalog", "ActorAnalog"}) {
                const auto it = truth.spans.find(Fluent::isa(f.entity, sub).to_string());
                if (it != truth.spans.end())
                    out.insert(out.end(), it->second.begin(), it->second.end());
            }
        }
        if (f.kind == FluentKind::Rel && f.predicate == "possesses") {
            const auto it = truth.spans.find(Fluent::rel("owns", f.args).to_string());
            if (it != truth.spans.end())
                out.insert(out.end(), it->second.begin(), it->second.end());
        }
        return out;
    };

    const auto pick_fluent = [&](const std::string& set, const std::string& person)
        -> std::optional<Fluent> {
        std::vector<Fluent> candidates;
        for (const Fluent& f : by_subject[person]) {
            const std::string& c = f.collection;
            if (set == "careers" && f.kind == FluentKind::Isa &&
                (c == "CricketerAnalog" || c == "ActorAnalog" || c == "RetiredAnalog"))
                candidates.push_back(f);
            if (set == "marriages" && f.kind == FluentKind::Isa &&
                (c == "Married" || c == "DivorcedAnalog"))
                candidates.push_back(f);
            if (set == "markers" && f.kind == FluentKind::Isa &&
                (c == "NeverSchooledAnalog" || c == "GraduateAnalog" || c == "FemaleAnalog"))
                candidates.push_back(f);
            if (set == "possessions" && f.kind == FluentKind::Rel) candidates.push_back(f);
            if (set == "offices" && f.kind == FluentKind::Isa && c == "OfficeHolderAnalog")
                candidates.push_back(f);
        }
        if (candidates.empty()) return std::nullopt;
        Fluent f = candidates[static_cast<std::size_t>(
            rng.range(0, static_cast<std::int64_t>(candidates.size()) - 1))];
        // sometimes lift to the generalized form
        if (set == "careers" && f.kind == FluentKind::Isa && f.collection != "RetiredAnalog" &&
            rng.chance(0.3))
            f = Fluent::isa(f.entity, "CareerActive");
        if (set == "possessions" && f.predicate == "owns" && rng.chance(0.3))
            f = Fluent::rel("possesses", f.args);
        return f;
    };

    std::string queries, answers = "id,truth\n";
    for (const std::string set : {"careers", "marriages", "markers", "possessions", "offices"}) {
        int emitted = 0;
        int want_positive = 1;  // alternate, starting positive
        int guard = 0;
        while (emitted < per_set && ++guard < per_set * 4000) {
            const std::string& person = people[static_cast<std::size_t>(
                rng.range(0, static_cast<std::int64_t>(people.size()) - 1))];
            const auto f = pick_fluent(set, person);
            if (!f) continue;
            const TimeInterval life = truth.existence.at(person);
            const auto spans = spans_of(*f);

            std::optional<TimePoint> t;
            if (want_positive) {
                if (spans.empty()) continue;
                const TimeInterval& s = spans[static_cast<std::size_t>(
                    rng.range(0, static_cast<std::int64_t>(spans.size()) - 1))];
                t = s.start.plus_days(rng.range(0, s.length_days() - 1));
            } else {
                // inside the lifespan, outside every true span, clear of
                // span boundaries by a day
                for (int attempt = 0; attempt < 40 && !t; ++attempt) {
                    const TimePoint cand = life.start.plus_days(rng.range(0, life.length_days() - 1));
                    bool clear = true;
                    for (const TimeInterval& s : spans)
                        if (cand.day >= s.start.day - 1 && cand.day <= s.end.day + 1) clear = false;
                    if (clear) t = cand;
                }
                if (!t) continue;
            }
            const bool key = want_positive != 0;
            const std::string id = "q_" + set + "_" + std::to_string(++emitted);
            queries += "(query :id " + id + " :set " + set + " :mode m2 :alpha 0.5 :time " +
                       t->to_string() + " " + f->to_string() + ")\n";
            answers += id + "," + (key ? "True" : "False") + "\n";
            want_positive = 1 - want_positive;
        }
        if (emitted < per_set)
            throw DataError("could not fill query set " + set + " (" + std::to_string(emitted) +
                            " of " + std::to_string(per_set) + ")");
    }
    return {std::move(queries), std::move(answers)};
}

/// Builds a complete synthetic world: ontology, sampled lifecourses, the
/// hazard file carrying the true tables, density-limited observations and
/// events, themed query sets with their answer key, and the exact truth.
inline GeneratedWorld generate(const WorldConfig& cfg) {
    detail::Emitter em(cfg);
    GeneratedWorld& out = em.out;

    out.kb_text =
        "; synthetic world, seed " + std::to_string(cfg.seed) + "\n" +
        "(genls Person BiologicalLivingObject)\n"
        "(genls CricketerAnalog CareerActive)\n"
        "(genls ActorAnalog CareerActive)\n"
        "(marker FemaleAnalog Bidirectional)\n"
        "(marker NeverSchooledAnalog Initial)\n"
        "(marker GraduateAnalog Terminal)\n"
        "(marker RetiredAnalog Terminal)\n"
        "(marker CareerActive TimeDependent)\n"
        "(marker Married TimeDependent)\n"
        "(marker DivorcedAnalog TimeDependent)\n"
        "(marker OfficeHolderAnalog TimeDependent)\n"
        "(followingStageTypes CareerActive RetiredAnalog)\n"
        "(disjointWith Married DivorcedAnalog)\n"
        "(disjointWith NeverSchooledAnalog GraduateAnalog)\n"
        "(predicate owns 2 time-dependent)\n"
        "(predicate possesses 2 time-dependent)\n"
        "(genlPreds owns possesses)\n";

    out.events_text =
        "; lifecycle rules\n"
        "(risk-rule WeddingEvent spouse Married)\n"
        "(initiates-rule WeddingEvent spouse Married)\n"
        "(terminates-rule DivorceEvent spouse Married)\n"
        "(initiates-rule DivorceEvent spouse DivorcedAnalog)\n"
        "(terminates-rule WeddingEvent spouse DivorcedAnalog)\n"
        "(risk-rule CricketerStartEvent performer CricketerAnalog)\n"
        "(initiates-rule CricketerStartEvent performer CricketerAnalog)\n"
        "(terminates-rule CricketerEndEvent performer CricketerAnalog)\n"
        "(initiates-rule CricketerEndEvent performer RetiredAnalog)\n"
        "(risk-rule ActorStartEvent performer ActorAnalog)\n"
        "(initiates-rule ActorStartEvent performer ActorAnalog)\n"
        "(terminates-rule ActorEndEvent performer ActorAnalog)\n"
        "(initiates-rule ActorEndEvent performer RetiredAnalog)\n"
        "(initiates-rule GraduationEvent graduate GraduateAnalog)\n"
        "(initiates-rule OfficeStartEvent holder OfficeHolderAnalog)\n"
        "(terminates-rule OfficeEndEvent holder OfficeHolderAnalog)\n";

    out.hazards_text =
        "; true tables, one period = one year\n"
        "(hazard :for (isa ?x CricketerAnalog) :period 365 :h (" +
        detail::table_text(detail::cricketer_table()) + "))\n" +
        "(hazard :for (isa ?x CareerActive) :period 365 :h (" +
        detail::table_text(detail::actor_table()) + "))\n" +
        "(hazard :for (isa ?x Married) :period 365 :h (" +
        detail::table_text(detail::divorce_table()) + "))\n" +
        "(hazard :for (isa ?x DivorcedAnalog) :period 365 :h (" +
        detail::table_text(detail::remarriage_table()) + "))\n" +
        "(hazard :for (rel owns 2 AutomobileAnalog) :period 365 :h (" +
        detail::table_text(detail::automobile_table()) + "))\n" +
        "(hazard :for (rel owns) :period 365 :h (" +
        detail::table_text(detail::gadget_table()) + "))\n";

    detail::Rng& rng = em.rng;
    int object_counter = 0;

    for (int i = 0; i < cfg.n_individuals; ++i) {
        const std::string p = "p" + std::to_string(1000 + i);

        // lifespan: birth by calendar, death drawn from the mortality table
        const TimePoint birth =
            TimePoint::from_ymd(static_cast<int>(rng.range(1900, 1980)), 1, 1)
                .plus_days(rng.range(0, 364));
        std::int64_t death_period = sample_event_period(detail::mortality_table(), rng, 100);
        if (death_period == 0) death_period = 100;
        const TimePoint death =
            birth.plus_days((death_period - 1) * 365 + rng.range(1, 364));
        const TimeInterval life{birth, death};
        out.truth.existence[p] = life;
        out.kb_text += "(assert :mt PeopleDataMt :time (interval " + birth.to_string() + " " +
                       death.to_string() + ") (isa " + p + " Person))\n";

        if (rng.chance(0.5)) em.truth_and_observe(Fluent::isa(p, "FemaleAnalog"), life);

        // schooling starts around age six; never-schooled until then
        {
            const TimePoint school = birth.plus_days(6 * 365 + rng.range(0, 364));
            const TimePoint end = std::min(school.plus_days(-1), death);
            if (birth <= end)
                em.truth_and_observe(Fluent::isa(p, "NeverSchooledAnalog"),
                                     TimeInterval{birth, end});
        }

        if (rng.chance(0.6)) {
            const TimePoint grad = birth.plus_days(rng.range(21, 25) * 365 + rng.range(0, 364));
            if (grad < death) {
                em.truth_and_observe(Fluent::isa(p, "GraduateAnalog"), TimeInterval{grad, death});
                em.event("GraduationEvent", "graduate", p, grad, cfg.event_density);
            }
        }

        if (rng.chance(0.7)) {
            const bool cricketer = rng.chance(0.5);
            const auto& table = cricketer ? detail::cricketer_table() : detail::actor_table();
            const char* state = cricketer ? "CricketerAnalog" : "ActorAnalog";
            const char* start_type = cricketer ? "CricketerStartEvent" : "ActorStartEvent";
            const char* end_type = cricketer ? "CricketerEndEvent" : "ActorEndEvent";
            const TimePoint entry = birth.plus_days(
                rng.range(cfg.career_entry_age - 2, cfg.career_entry_age + 5) * 365 +
                rng.range(0, 364));
            if (entry < death) {
                const std::int64_t end_period = sample_event_period(table, rng, 60);
                TimePoint end = end_period == 0
                                    ? death
                                    : entry.plus_days((end_period - 1) * 365 + rng.range(1, 364));
                em.event(start_type, "performer", p, entry, cfg.event_density);
                if (end >= death) {
                    em.truth_and_observe(Fluent::isa(p, state), TimeInterval{entry, death});
                } else {
                    em.truth_and_observe(Fluent::isa(p, state), TimeInterval{entry, end});
                    em.truth_and_observe(Fluent::isa(p, "RetiredAnalog"),
                                         TimeInterval{end, death});
                    em.event(end_type, "performer", p, end, cfg.event_density);
                }
            }
        }

        if (rng.chance(0.7)) {
            TimePoint wed = birth.plus_days(rng.range(20, 40) * 365 + rng.range(0, 364));
            for (int marriage = 0; marriage < 2 && wed < death; ++marriage) {
                em.event("WeddingEvent", "spouse", p, wed, cfg.event_density);
                const std::int64_t div_period =
                    sample_event_period(detail::divorce_table(), rng, 80);
                TimePoint div = div_period == 0
                                    ? death
                                    : wed.plus_days((div_period - 1) * 365 + rng.range(1, 364));
                if (div >= death) {
                    em.truth_and_observe(Fluent::isa(p, "Married"), TimeInterval{wed, death});
                    break;
                }
                em.truth_and_observe(Fluent::isa(p, "Married"), TimeInterval{wed, div});
                em.event("DivorceEvent", "spouse", p, div, cfg.event_density);
                TimePoint div_end = death;
                std::optional<TimePoint> rewed;
                if (marriage == 0 && rng.chance(0.4)) {
                    const TimePoint w2 = div.plus_days(rng.range(2, 8) * 365 + rng.range(0, 364));
                    if (w2 < death) {
                        rewed = w2;
                        div_end = w2.plus_days(-1);
                    }
                }
                if (div < div_end)
                    em.truth_and_observe(Fluent::isa(p, "DivorcedAnalog"),
                                         TimeInterval{div.plus_days(1), div_end});
                if (!rewed) break;
                wed = *rewed;
            }
        }

        const auto own_objects = [&](const char* object_type, const std::vector<double>& table) {
            const std::int64_t n = rng.range(0, 2);
            for (std::int64_t k = 0; k < n; ++k) {
                const std::string obj = "obj" + std::to_string(++object_counter);
                out.kb_text += "(assert :mt PeopleDataMt :time (interval 1900-01-01 2100-01-01) "
                               "(isa " + obj + " " + object_type + "))\n";
                const TimePoint acquire =
                    birth.plus_days(rng.range(18, 60) * 365 + rng.range(0, 364));
                if (acquire >= death) continue;
                const std::int64_t until = sample_event_period(table, rng, 60);
                const TimePoint dispose =
                    until == 0 ? death
                               : std::min(death, acquire.plus_days((until - 1) * 365 +
                                                                   rng.range(1, 364)));
                const Fluent owns = Fluent::rel("owns", {p, obj});
                em.truth_and_observe(owns, TimeInterval{acquire, dispose});
                em.event("AcquisitionEvent", "owner", p, acquire, cfg.event_density,
                         "(initiates %ID% " + owns.to_string() + ")\n");
                if (dispose < death)
                    em.event("DisposalEvent", "owner", p, dispose, cfg.event_density,
                             "(terminates %ID% " + owns.to_string() + ")\n");
            }
        };
        own_objects("AutomobileAnalog", detail::automobile_table());
        own_objects("GadgetAnalog", detail::gadget_table());

        if (rng.chance(0.12)) {
            const TimePoint start = birth.plus_days(rng.range(35, 60) * 365 + rng.range(0, 364));
            if (start < death.plus_days(-365)) {
                const TimePoint full_term = start.plus_days(1460);
                TimePoint end = std::min(full_term, death);
                const bool resigned = rng.chance(0.2);
                if (resigned) end = std::min(start.plus_days(rng.range(200, 1200)), death);
                em.truth_and_observe(Fluent::isa(p, "OfficeHolderAnalog"),
                                     TimeInterval{start, end});
                out.hazards_text += "(persists-for (isa " + p + " OfficeHolderAnalog) " +
                                    start.to_string() + " 1460)\n";
                em.event("OfficeStartEvent", "holder", p, start, cfg.event_density);
                if (end < full_term)  // the default is overridden; usually observed
                    em.event("OfficeEndEvent", "holder", p, end, 0.9);
            }
        }
    }

    // truth dump: one row per true span
    out.truth_csv = "fluent,start,end\n";
    for (const auto& [text, spans] : out.truth.spans)
        for (const TimeInterval& s : spans)
            out.truth_csv += text + "," + s.start.to_string() + "," + s.end.to_string() + "\n";

    auto [queries, answers] = sample_queries(out.truth, cfg.queries_per_set, cfg.seed + 1);
    out.queries_text = std::move(queries);
    out.answers_csv = std::move(answers);
    return out;
}

} // namespace tempora
