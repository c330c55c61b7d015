#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tempora/events.hpp"

using namespace tempora;

namespace {
Event ev(std::string id, std::string type, TimePoint t,
         std::map<std::string, std::string> roles = {}) {
    Event e;
    e.id = std::move(id);
    e.type = std::move(type);
    e.time = t;
    e.roles = std::move(roles);
    return e;
}
TimePoint y(int year) { return TimePoint::from_ymd(year, 1, 1); }
} // namespace

TEST_CASE("risk starts come from matching rules", "[events]") {
    KbStore kb;
    EventStore store;
    store.add_risk_rule(RiskPeriodRule{"WeddingEvent", "groom", "Divorced"});
    kb.declare_collection("WeddingEvent");
    store.add_event(ev("W1", "WeddingEvent", TimePoint::from_ymd(1988, 7, 1),
                       {{"groom", "Fred"}, {"bride", "Mary"}}));

    const Fluent divorced = Fluent::isa("Fred", "Divorced");
    CHECK(store.risk_starts(divorced, kb) ==
          std::vector<TimePoint>{TimePoint::from_ymd(1988, 7, 1)});

    // one starting point per wedding
    store.add_event(ev("W2", "WeddingEvent", TimePoint::from_ymd(1995, 5, 2),
                       {{"groom", "Fred"}, {"bride", "Sue"}}));
    CHECK(store.risk_starts(divorced, kb).size() == 2);

    CHECK(store.risk_starts(Fluent::isa("Mary", "Divorced"), kb).empty());
    CHECK(store.risk_starts(Fluent::rel("owns", {"Fred", "X"}), kb).empty());

    CHECK(store.last_risk_start(divorced, kb, TimePoint::from_ymd(1992, 1, 1)) ==
          TimePoint::from_ymd(1988, 7, 1));
    CHECK(store.last_risk_start(divorced, kb, TimePoint::from_ymd(1996, 1, 1)) ==
          TimePoint::from_ymd(1995, 5, 2));
    CHECK_FALSE(store.last_risk_start(divorced, kb, TimePoint::from_ymd(1980, 1, 1)).has_value());
}

TEST_CASE("risk starts are sorted and duplicate-free", "[events]") {
    KbStore kb;
    EventStore store;
    kb.declare_collection("WeddingEvent");
    store.add_risk_rule(RiskPeriodRule{"WeddingEvent", "groom", "Divorced"});
    store.add_risk_rule(RiskPeriodRule{"WeddingEvent", "groom", "Divorced"});  // duplicate rule
    store.add_event(ev("W1", "WeddingEvent", y(1990), {{"groom", "Fred"}}));
    store.add_event(ev("W0", "WeddingEvent", y(1985), {{"groom", "Fred"}}));
    const auto starts = store.risk_starts(Fluent::isa("Fred", "Divorced"), kb);
    REQUIRE(starts.size() == 2);
    CHECK(starts[0] < starts[1]);
}

TEST_CASE("initiators and terminators via instance and type rules", "[events]") {
    KbStore kb;
    EventStore store;
    kb.declare_collection("HiringEvent");
    kb.declare_collection("FiringEvent");
    store.add_event(ev("H1", "HiringEvent", y(1990), {{"employee", "Fred"}}));
    store.add_event(ev("F1", "FiringEvent", y(1995), {{"employee", "Fred"}}));
    store.add_event(ev("H2", "HiringEvent", y(1992), {{"employee", "Mary"}}));

    const Fluent employed = Fluent::isa("Fred", "MicrosoftEmployee");
    store.add_instance_effect(InstanceEffect{EffectKind::Initiates, "H1", employed});
    store.add_type_rule(
        TypeEffectRule{EffectKind::Terminates, "FiringEvent", "employee", "MicrosoftEmployee"});

    REQUIRE(store.initiators(employed, kb).size() == 1);
    CHECK(store.initiators(employed, kb)[0]->id == "H1");
    REQUIRE(store.terminators(employed, kb).size() == 1);
    CHECK(store.terminators(employed, kb)[0]->id == "F1");
    CHECK(store.initiators(Fluent::isa("Mary", "MicrosoftEmployee"), kb).empty());

    CHECK_THROWS_AS(
        store.add_instance_effect(InstanceEffect{EffectKind::Initiates, "nope", employed}),
        DataError);
    CHECK_THROWS_AS(store.add_event(ev("H1", "HiringEvent", y(1999))), DataError);
}

TEST_CASE("type rules match event subtypes through genls", "[events]") {
    KbStore kb;
    kb.add_genls("RoyalWeddingEvent", "WeddingEvent");
    EventStore store;
    store.add_type_rule(
        TypeEffectRule{EffectKind::Initiates, "WeddingEvent", "groom", "Married"});
    store.add_risk_rule(RiskPeriodRule{"WeddingEvent", "groom", "Married"});
    store.add_event(ev("RW", "RoyalWeddingEvent", y(1981), {{"groom", "Charles"}}));
    CHECK(store.initiators(Fluent::isa("Charles", "Married"), kb).size() == 1);
    CHECK(store.risk_starts(Fluent::isa("Charles", "Married"), kb).size() == 1);
}

TEST_CASE("closest-event selection", "[events]") {
    KbStore kb;
    EventStore store;
    kb.declare_collection("E");
    const Fluent f = Fluent::isa("Fred", "S");
    int n = 0;
    const auto add = [&](EffectKind kind, int year) {
        const std::string id = "e" + std::to_string(++n);
        store.add_event(ev(id, "E", y(year)));
        store.add_instance_effect(InstanceEffect{kind, id, f});
        return id;
    };
    add(EffectKind::Initiates, 1980);
    add(EffectKind::Initiates, 1990);
    add(EffectKind::Terminates, 2000);
    add(EffectKind::Terminates, 2010);

    const Event* e1 = store.latest_initiator_before(f, kb, y(1995));
    REQUIRE(e1 != nullptr);
    CHECK(e1->time == y(1990));
    CHECK(store.latest_initiator_before(f, kb, y(1979)) == nullptr);
    CHECK(store.latest_initiator_before(f, kb, y(1981))->time == y(1980));

    const Event* e2 = store.earliest_terminator_after(f, kb, y(1995));
    REQUIRE(e2 != nullptr);
    CHECK(e2->time == y(2000));
    CHECK(store.earliest_terminator_after(f, kb, y(2011)) == nullptr);
    // a terminator exactly at the reference point is excluded
    CHECK(store.earliest_terminator_after(f, kb, y(2000))->time == y(2010));

    const auto bracket = store.select_bracketing(f, kb, y(1995));
    REQUIRE(bracket.has_value());
    CHECK(bracket->first->time == y(1990));
    CHECK(bracket->second->time == y(2000));
}

TEST_CASE("bracketing needs a closing terminator and an unbroken interval", "[events]") {
    KbStore kb;
    EventStore store;
    kb.declare_collection("E");
    const Fluent f = Fluent::isa("Fred", "S");
    int n = 0;
    const auto add = [&](EffectKind kind, int year) {
        const std::string id = "e" + std::to_string(++n);
        store.add_event(ev(id, "E", y(year)));
        store.add_instance_effect(InstanceEffect{kind, id, f});
    };

    add(EffectKind::Initiates, 1980);
    add(EffectKind::Terminates, 1985);
    CHECK_FALSE(store.select_bracketing(f, kb, y(1990)).has_value());

    add(EffectKind::Initiates, 1987);
    CHECK_FALSE(store.select_bracketing(f, kb, y(1990)).has_value());

    // terminator between the chosen initiator and the query breaks the bracket
    KbStore kb2;
    EventStore s2;
    kb2.declare_collection("E");
    int m = 0;
    const auto add2 = [&](EffectKind kind, int year) {
        const std::string id = "x" + std::to_string(++m);
        s2.add_event(ev(id, "E", y(year)));
        s2.add_instance_effect(InstanceEffect{kind, id, f});
    };
    add2(EffectKind::Initiates, 1980);
    add2(EffectKind::Terminates, 1983);
    add2(EffectKind::Terminates, 2000);
    CHECK_FALSE(s2.select_bracketing(f, kb2, y(1990)).has_value());

    // simultaneous initiator and terminator: the terminator wins
    KbStore kb3;
    EventStore s3;
    kb3.declare_collection("E");
    int p = 0;
    const auto add3 = [&](EffectKind kind, int year) {
        const std::string id = "z" + std::to_string(++p);
        s3.add_event(ev(id, "E", y(year)));
        s3.add_instance_effect(InstanceEffect{kind, id, f});
    };
    add3(EffectKind::Initiates, 1980);
    add3(EffectKind::Terminates, 1980);
    add3(EffectKind::Terminates, 2000);
    CHECK_FALSE(s3.select_bracketing(f, kb3, y(1990)).has_value());
}

namespace {
struct TimelineEvent {
    bool initiates;
    std::int64_t day;
};

// Exhaustive reference for the closest-event conditions: scan every
// initiator/terminator pair and apply the selection conditions literally.
struct BruteForce {
    std::vector<TimelineEvent> events;

    std::optional<std::int64_t> latest_initiator_before(std::int64_t t) const {
        std::optional<std::int64_t> best;
        for (const auto& e : events)
            if (e.initiates && e.day < t && (!best || e.day > *best)) best = e.day;
        return best;
    }
    std::optional<std::int64_t> earliest_terminator_after(std::int64_t t) const {
        std::optional<std::int64_t> best;
        for (const auto& e : events)
            if (!e.initiates && e.day > t && (!best || e.day < *best)) best = e.day;
        return best;
    }
    std::optional<std::pair<std::int64_t, std::int64_t>> bracket(std::int64_t t) const {
        for (const auto& i : events) {
            if (!i.initiates || i.day >= t) continue;
            for (const auto& e : events) {
                if (e.initiates || e.day <= t) continue;
                bool ok = true;
                for (const auto& other : events) {
                    if (other.initiates && other.day > i.day && other.day < t) ok = false;
                    if (!other.initiates && other.day > t && other.day < e.day) ok = false;
                    if (!other.initiates && other.day >= i.day && other.day < t) ok = false;
                }
                if (ok) return std::make_pair(i.day, e.day);
            }
        }
        return std::nullopt;
    }
};
} // namespace

TEST_CASE("selection matches exhaustive search on random timelines", "[events]") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> n_events(0, 12);
    std::uniform_int_distribution<std::int64_t> day(0, 40);
    std::uniform_int_distribution<int> coin(0, 1);
    const Fluent f = Fluent::isa("Fred", "S");

    for (int trial = 0; trial < 500; ++trial) {
        KbStore kb;
        kb.declare_collection("E");
        EventStore store;
        BruteForce brute;
        const int n = n_events(rng);
        for (int i = 0; i < n; ++i) {
            const TimelineEvent te{coin(rng) == 1, day(rng)};
            brute.events.push_back(te);
            const std::string id = "e" + std::to_string(i);
            store.add_event(ev(id, "E", TimePoint{te.day}));
            store.add_instance_effect(InstanceEffect{
                te.initiates ? EffectKind::Initiates : EffectKind::Terminates, id, f});
        }
        const TimePoint t{day(rng)};

        const Event* latest = store.latest_initiator_before(f, kb, t);
        const auto brute_latest = brute.latest_initiator_before(t.day);
        CHECK((latest != nullptr) == brute_latest.has_value());
        if (latest && brute_latest) CHECK(latest->time.day == *brute_latest);

        const Event* earliest = store.earliest_terminator_after(f, kb, t);
        const auto brute_earliest = brute.earliest_terminator_after(t.day);
        CHECK((earliest != nullptr) == brute_earliest.has_value());
        if (earliest && brute_earliest) CHECK(earliest->time.day == *brute_earliest);

        const auto got = store.select_bracketing(f, kb, t);
        const auto want = brute.bracket(t.day);
        CHECK(got.has_value() == want.has_value());
        if (got && want) {
            CHECK(got->first->time.day == want->first);
            CHECK(got->second->time.day == want->second);
        }
    }
}
