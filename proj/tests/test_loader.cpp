#include <catch2/catch_amalgamated.hpp>

#include "tempora/loader.hpp"

using namespace tempora;

TEST_CASE("kb files load every statement form", "[loader]") {
    World w;
    load_kb_text(w,
                 "; ontology\n"
                 "(genls Cricketer Athlete)\n"
                 "(genlPreds owns possesses)\n"
                 "(disjointWith HumanInfant Professor)\n"
                 "(followingStageTypes Professor RetiredPerson)\n"
                 "(marker NeverSchooled Initial)\n"
                 "(predicate owns 2 time-dependent)\n"
                 "(assert :mt PeopleDataMt :time (interval 1972 1977) (isa TonyGreig Cricketer))\n"
                 "(assert :mt PeopleDataMt :time 1930-05-02 (rel owns Einstein Car-780))\n");
    CHECK(w.kb.holds_known(Fluent::isa("TonyGreig", "Athlete"), year_interval(1973)));
    CHECK(w.kb.holds_known(Fluent::rel("possesses", {"Einstein", "Car-780"}),
                           day_interval(TimePoint::parse("1930-05-02"))));
    CHECK(w.kb.markers_of("NeverSchooled")->count(Marker::Initial) == 1);
    CHECK(w.kb.incompatible(Fluent::isa("X", "Professor"), Fluent::isa("X", "RetiredPerson")));

    CHECK_THROWS_AS(load_kb_text(w, "(frobnicate A B)\n"), ParseError);
    CHECK_THROWS_AS(load_kb_text(w, "(assert :mt M (isa A B))\n"), ParseError);
    CHECK_THROWS_AS(load_kb_text(w, "(genls OnlyOne)\n"), ParseError);
}

TEST_CASE("event files load events, rules, and instance effects", "[loader]") {
    World w;
    load_events_text(
        w,
        "(event :id W1 :type WeddingEvent :time 1988-07-01 :roles ((groom Fred) (bride Mary)))\n"
        "(risk-rule WeddingEvent groom Divorced)\n"
        "(initiates-rule WeddingEvent groom Married)\n"
        "(terminates-rule DivorceEvent groom Married)\n"
        "(event :id D1 :type DivorceEvent :time 1998-03-04 :roles ((groom Fred)))\n"
        "(initiates W1 (isa Mary Married))\n"
        "(terminates D1 (isa Mary Married))\n");
    CHECK(w.events.events().size() == 2);
    CHECK(w.events.initiators(Fluent::isa("Fred", "Married"), w.kb).size() == 1);
    CHECK(w.events.terminators(Fluent::isa("Mary", "Married"), w.kb).size() == 1);
    CHECK(w.events.risk_starts(Fluent::isa("Fred", "Divorced"), w.kb).size() == 1);

    CHECK_THROWS_AS(load_events_text(w, "(event :id X :type T)\n"), ParseError);
    CHECK_THROWS_AS(load_events_text(w, "(initiates NOPE (isa A B))\n"), DataError);
}

TEST_CASE("hazard files load specs and fixed-duration rules", "[loader]") {
    World w;
    load_hazards_text(
        w,
        "(hazard :for (isa ?x Cricketer) :period 365 :h (0.01 0.02 0.3))\n"
        "(hazard :for (rel owns 2 Automobile) :period 1year :alpha (-4.6 -4.6)\n"
        "        :cov (((isa ?x (FrequentPerformerFn Smoking)) 0.3)))\n"
        "(persists-for (isa Clinton UnitedStatesPresident) 1993-01-21 1460)\n");
    REQUIRE(w.hazards.specs.size() == 2);
    CHECK(w.hazards.specs[0].baseline == BaselineKind::Table);
    CHECK(w.hazards.specs[0].values.size() == 3);
    CHECK(w.hazards.specs[1].baseline == BaselineKind::Logistic);
    CHECK(w.hazards.specs[1].period_days == 365);
    REQUIRE(w.hazards.specs[1].covariates.size() == 1);
    CHECK(w.hazards.specs[1].covariates[0].pattern.collection ==
          "(FrequentPerformerFn Smoking)");
    CHECK(w.hazards.specs[1].covariates[0].beta == 0.3);
    REQUIRE(w.hazards.fixed_rules.size() == 1);
    CHECK(w.hazards.fixed_rules[0].duration_days == 1460);

    CHECK_THROWS_AS(load_hazards_text(w, "(hazard :for (isa ?x C))\n"), ParseError);
    CHECK_THROWS_AS(load_hazards_text(w, "(hazard :for (isa ?x C) :h (0.1) :alpha (0))\n"),
                    ParseError);
    CHECK_THROWS_AS(load_hazards_text(w, "(hazard :for (isa ?x C) :h (1.7))\n"), DataError);
}

TEST_CASE("hazard specs round-trip through their file form", "[loader]") {
    World w;
    const std::string text =
        "(hazard :for (rel owns 2 Automobile) :period 365 :alpha (-4.6 -2.3) "
        ":cov (((isa ?x Smoker) 0.3) ((isa ?x Runner) -0.25)))";
    load_hazards_text(w, text);
    const std::string rendered = to_file_form(w.hazards.specs[0]);
    World v;
    load_hazards_text(v, rendered);
    CHECK(v.hazards.specs[0].pattern == w.hazards.specs[0].pattern);
    CHECK(v.hazards.specs[0].values == w.hazards.specs[0].values);
    CHECK(v.hazards.specs[0].covariates.size() == 2);
    CHECK(v.hazards.specs[0].covariates[1].beta == -0.25);

    const FixedDurationRule rule{Fluent::isa("A", "B"), TimePoint::parse("1993-01-21"), 1460};
    World u;
    load_hazards_text(u, to_file_form(rule));
    CHECK(u.hazards.fixed_rules[0].start == rule.start);
}

TEST_CASE("query files parse ids, sets, modes, and times", "[loader]") {
    const auto qs = parse_queries_text(
        "(query :mode m2 :alpha 0.5 :time (year 1992) (isa Fred Married))\n"
        "(query :id q7 :set careers :mode m1 :time 1973-06-15 (isa TonyGreig Cricketer))\n");
    REQUIRE(qs.size() == 2);
    CHECK(qs[0].id == "q1");
    CHECK(qs[0].set == "all");
    CHECK(qs[0].mode == Mode::M2);
    CHECK(qs[0].alpha == 0.5);
    CHECK(qs[0].time == year_interval(1992));
    CHECK(qs[1].id == "q7");
    CHECK(qs[1].set == "careers");
    CHECK(qs[1].mode == Mode::M1);
    CHECK_FALSE(qs[1].alpha.has_value());
    CHECK(qs[1].fluent == Fluent::isa("TonyGreig", "Cricketer"));

    CHECK_THROWS_AS(parse_queries_text("(ask :time 1992 (isa A B))\n"), ParseError);
    CHECK_THROWS_AS(parse_queries_text("(query (isa A B))\n"), ParseError);
}
