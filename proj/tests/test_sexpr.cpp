#include <catch2/catch_amalgamated.hpp>

#include "tempora/sexpr.hpp"
#include "tempora/syntax.hpp"

using namespace tempora;

TEST_CASE("reader handles nesting, comments, and line numbers", "[sexpr]") {
    const auto forms = parse_sexprs("; a comment\n(genls Cat Mammal)\n(a (b c) d) ; tail\n");
    REQUIRE(forms.size() == 2);
    CHECK(forms[0].to_string() == "(genls Cat Mammal)");
    CHECK(forms[0].line == 2);
    CHECK(forms[1].items[1].is_list());
    CHECK(forms[1].line == 3);

    CHECK(parse_sexpr("(a (b c))").to_string() == "(a (b c))");
    CHECK_THROWS_AS(parse_sexpr("(a (b c)"), ParseError);
    CHECK_THROWS_AS(parse_sexpr(")"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(a) b"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("   "), ParseError);
}

TEST_CASE("keyword splitting", "[sexpr]") {
    const Sexpr form = parse_sexpr("(assert :mt PeopleDataMt :time 1990 (isa Fred Married))");
    const KeywordArgs kw = split_keywords(form, 1, "<t>");
    REQUIRE(kw.positional.size() == 1);
    CHECK(kw.find(":mt")->text == "PeopleDataMt");
    CHECK(kw.find(":time")->text == "1990");
    CHECK(kw.find(":missing") == nullptr);
    CHECK_THROWS_AS(split_keywords(parse_sexpr("(x :dangling)"), 1, "<t>"), ParseError);
}

TEST_CASE("fluent parse and print round-trip", "[sexpr]") {
    const Fluent isa = Fluent::parse_text("(isa Fred Married)");
    CHECK(isa.kind == FluentKind::Isa);
    CHECK(isa.entity == "Fred");
    CHECK(isa.collection == "Married");
    CHECK(isa.subject() == "Fred");
    CHECK(isa.to_string() == "(isa Fred Married)");

    const Fluent rel = Fluent::parse_text("(rel owns AlbertEinstein Car-780)");
    CHECK(rel.kind == FluentKind::Rel);
    CHECK(rel.predicate == "owns");
    CHECK(rel.args == std::vector<std::string>{"AlbertEinstein", "Car-780"});
    CHECK(rel.subject() == "AlbertEinstein");
    CHECK(rel.to_string() == "(rel owns AlbertEinstein Car-780)");

    // compound terms act as structured symbol names
    const Fluent smoker = Fluent::parse_text("(isa Fred (FrequentPerformerFn Smoking))");
    CHECK(smoker.collection == "(FrequentPerformerFn Smoking)");
    CHECK(Fluent::parse_text(smoker.to_string()) == smoker);

    CHECK_THROWS_AS(Fluent::parse_text("(isa Fred)"), ParseError);
    CHECK_THROWS_AS(Fluent::parse_text("(rel owns)"), ParseError);
    CHECK_THROWS_AS(Fluent::parse_text("(holds x y)"), ParseError);
    CHECK_THROWS_AS(Fluent::parse_text("atom"), ParseError);
}

TEST_CASE("pattern parse covers all three kinds", "[sexpr]") {
    const FluentPattern col = FluentPattern::parse_text("(isa ?x Cricketer)");
    CHECK(col.kind == PatternKind::Collection);
    CHECK(col.collection == "Cricketer");
    CHECK(col.to_string() == "(isa ?x Cricketer)");

    const FluentPattern arg = FluentPattern::parse_text("(rel owns 2 Automobile)");
    CHECK(arg.kind == PatternKind::RelArg);
    CHECK(arg.predicate == "owns");
    CHECK(arg.arg_pos == 2);
    CHECK(arg.collection == "Automobile");
    CHECK(FluentPattern::parse_text(arg.to_string()) == arg);

    const FluentPattern bare = FluentPattern::parse_text("(rel owns)");
    CHECK(bare.kind == PatternKind::Predicate);
    CHECK(bare.to_string() == "(rel owns)");

    CHECK_THROWS_AS(FluentPattern::parse_text("(isa Fred Cricketer)"), ParseError);
    CHECK_THROWS_AS(FluentPattern::parse_text("(rel owns 0 Automobile)"), ParseError);
    CHECK_THROWS_AS(FluentPattern::parse_text("(rel owns two Automobile)"), ParseError);
}

TEST_CASE("time forms", "[sexpr]") {
    CHECK(parse_time_form_text("1988-07-01") ==
          day_interval(TimePoint::from_ymd(1988, 7, 1)));
    CHECK(parse_time_form_text("1992") == year_interval(1992));
    CHECK(parse_time_form_text("(year 1990)") == year_interval(1990));
    CHECK(parse_time_form_text("(interval 1988-07-01 1990-06-30)") ==
          TimeInterval(TimePoint::from_ymd(1988, 7, 1), TimePoint::from_ymd(1990, 6, 30)));
    CHECK(parse_time_form_text("(interval 1988 1990)") ==
          TimeInterval(TimePoint::from_ymd(1988, 1, 1), TimePoint::from_ymd(1990, 12, 31)));
    CHECK_THROWS_AS(parse_time_form_text("(interval 1992 1990)"), ParseError);
    CHECK_THROWS_AS(parse_time_form_text("(span 1990)"), ParseError);
    CHECK_THROWS_AS(parse_time_form_text("soonish"), ParseError);
}
