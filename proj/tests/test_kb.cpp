#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "tempora/kb.hpp"

using namespace tempora;

namespace {
TimeInterval years(int from, int to) {
    return TimeInterval{TimePoint::from_ymd(from, 1, 1), TimePoint::from_ymd(to, 12, 31)};
}
} // namespace

TEST_CASE("hierarchy edges reject cycles", "[kb]") {
    KbStore kb;
    kb.add_genls("Cat", "Mammal");
    CHECK_THROWS_AS(kb.add_genls("Mammal", "Cat"), DataError);
    CHECK_THROWS_AS(kb.add_genls("Cat", "Cat"), DataError);
    kb.add_genls("Mammal", "Animal");
    CHECK_THROWS_AS(kb.add_genls("Animal", "Cat"), DataError);

    kb.add_genl_preds("owns", "possesses");
    CHECK_THROWS_AS(kb.add_genl_preds("possesses", "owns"), DataError);
}

TEST_CASE("assertions store and index", "[kb]") {
    KbStore kb;
    const std::string id = kb.add_assertion(Fluent::isa("TonyGreig", "Cricketer"),
                                            "PeopleDataMt", years(1972, 1977));
    CHECK(!id.empty());
    CHECK(kb.holds_known(Fluent::isa("TonyGreig", "Cricketer"), years(1973, 1973)));

    kb.declare_predicate("owns", 2, true);
    CHECK(!kb.add_assertion(Fluent::rel("owns", {"Einstein", "Car780"}), "PeopleDataMt",
                            years(1930, 1935))
               .empty());
    CHECK_THROWS_AS(kb.add_assertion(Fluent::rel("owns", {"Einstein"}), "PeopleDataMt",
                                     years(1930, 1935)),
                    DataError);
}

TEST_CASE("genls closure walks the superset graph", "[kb]") {
    KbStore kb;
    kb.add_genls("Cat", "Mammal");
    kb.add_genls("Mammal", "Animal");
    kb.declare_collection("X");
    CHECK(kb.genls_closure("Cat") == std::set<std::string>{"Cat", "Mammal", "Animal"});
    CHECK(kb.genls_closure("X") == std::set<std::string>{"X"});
    CHECK_THROWS_AS(kb.genls_closure("Unheard"), DataError);

    KbStore diamond;
    diamond.add_genls("A", "B");
    diamond.add_genls("A", "C");
    diamond.add_genls("B", "D");
    diamond.add_genls("C", "D");
    CHECK(diamond.genls_closure("A") == std::set<std::string>{"A", "B", "C", "D"});
}

TEST_CASE("genlPreds closure", "[kb]") {
    KbStore kb;
    kb.add_genl_preds("owns", "possesses");
    CHECK(kb.genl_preds_closure("owns") == std::set<std::string>{"owns", "possesses"});
    kb.declare_predicate("alone", 2, true);
    CHECK(kb.genl_preds_closure("alone") == std::set<std::string>{"alone"});
    kb.add_genl_preds("possesses", "relatesTo");
    CHECK(kb.genl_preds_closure("owns") ==
          std::set<std::string>{"owns", "possesses", "relatesTo"});
}

TEST_CASE("closures match brute-force reachability", "[kb]") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = trial == 4 ? 1000 : 50;
        KbStore kb;
        std::vector<std::vector<int>> adj(n);
        std::uniform_int_distribution<int> node(0, n - 1);
        const auto name = [](int i) { return "c" + std::to_string(i); };
        for (int i = 0; i < n; ++i) kb.declare_collection(name(i));
        for (int e = 0; e < 3 * n; ++e) {
            int a = node(rng), b = node(rng);
            if (a == b) continue;
            if (a > b) std::swap(a, b);  // edges point up-index: acyclic by construction
            kb.add_genls(name(a), name(b));
            adj[a].push_back(b);
        }
        for (int probe = 0; probe < 20; ++probe) {
            const int start = node(rng);
            // independent oracle: plain breadth-first reachability
            std::vector<bool> reach(n, false);
            std::vector<int> queue{start};
            reach[start] = true;
            for (std::size_t q = 0; q < queue.size(); ++q)
                for (int next : adj[queue[q]])
                    if (!reach[next]) {
                        reach[next] = true;
                        queue.push_back(next);
                    }
            std::set<std::string> expected;
            for (int i = 0; i < n; ++i)
                if (reach[i]) expected.insert(name(i));
            CHECK(kb.genls_closure(name(start)) == expected);
        }
    }
}

TEST_CASE("holds_known uses hierarchy and temporal subsumption", "[kb]") {
    KbStore kb;
    kb.add_assertion(Fluent::isa("JohnMcCarthy", "Professor"), "PeopleDataMt", years(1998, 1998));
    CHECK(kb.holds_known(Fluent::isa("JohnMcCarthy", "Professor"), years(1998, 1998)));
    CHECK_FALSE(kb.holds_known(Fluent::isa("JohnMcCarthy", "Professor"), years(2000, 2000)));

    kb.add_genls("Cat", "Mammal");
    kb.add_assertion(Fluent::isa("Tom", "Cat"), "PeopleDataMt", years(1990, 1995));
    CHECK(kb.holds_known(Fluent::isa("Tom", "Mammal"), years(1991, 1991)));
    CHECK_FALSE(kb.holds_known(Fluent::isa("Tom", "Mammal"), years(1989, 1991)));

    kb.add_genl_preds("owns", "possesses");
    kb.add_assertion(Fluent::rel("owns", {"E", "Car"}), "PeopleDataMt", years(1930, 1940));
    CHECK(kb.holds_known(Fluent::rel("possesses", {"E", "Car"}), years(1931, 1932)));
    CHECK_FALSE(kb.holds_known(Fluent::rel("owns", {"Car", "E"}), years(1931, 1932)));
}

TEST_CASE("holds_known is monotone under query shrinking", "[kb]") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> day(0, 400);
    std::uniform_int_distribution<int> pick(0, 3);
    const std::vector<std::string> cols{"A", "B", "C", "D"};
    KbStore kb;
    kb.add_genls("A", "B");
    kb.add_genls("C", "D");
    for (int i = 0; i < 40; ++i) {
        int a = day(rng), b = day(rng);
        if (a > b) std::swap(a, b);
        kb.add_assertion(Fluent::isa("e" + std::to_string(i % 5), cols[pick(rng)]), "Mt",
                         TimeInterval{TimePoint{a}, TimePoint{b}});
    }
    for (int i = 0; i < 500; ++i) {
        int a = day(rng), b = day(rng);
        if (a > b) std::swap(a, b);
        const TimeInterval outer{TimePoint{a}, TimePoint{b}};
        std::uniform_int_distribution<int> inner_start(a, b);
        const int s = inner_start(rng);
        std::uniform_int_distribution<int> inner_end(s, b);
        const TimeInterval inner{TimePoint{s}, TimePoint{inner_end(rng)}};
        const Fluent f = Fluent::isa("e" + std::to_string(i % 5), cols[pick(rng)]);
        if (kb.holds_known(f, outer)) CHECK(kb.holds_known(f, inner));
    }
}

TEST_CASE("incompatibility via disjointness and stage ordering", "[kb]") {
    KbStore kb;
    kb.add_disjoint("HumanInfant", "Professor");
    CHECK(kb.incompatible(Fluent::isa("X", "HumanInfant"), Fluent::isa("X", "Professor")));
    CHECK(kb.incompatible(Fluent::isa("X", "Professor"), Fluent::isa("X", "HumanInfant")));

    kb.add_following_stage("Professor", "RetiredPerson");
    CHECK(kb.incompatible(Fluent::isa("X", "Professor"), Fluent::isa("X", "RetiredPerson")));
    CHECK(kb.incompatible(Fluent::isa("X", "RetiredPerson"), Fluent::isa("X", "Professor")));

    kb.declare_collection("Cat");
    kb.declare_collection("Dog");
    kb.add_disjoint("Cat", "Dog");
    CHECK_FALSE(kb.incompatible(Fluent::isa("X", "Cat"), Fluent::isa("Y", "Dog")));
    CHECK(kb.incompatible(Fluent::isa("X", "Cat"), Fluent::isa("X", "Dog")));

    // ancestors carry the clash down
    kb.add_genls("Kitten", "Cat");
    kb.add_genls("Puppy", "Dog");
    CHECK(kb.incompatible(Fluent::isa("X", "Kitten"), Fluent::isa("X", "Puppy")));

    CHECK_FALSE(kb.incompatible(Fluent::rel("owns", {"X", "Y"}), Fluent::isa("X", "Cat")));

    CHECK(kb.stage_precedes("Professor", "RetiredPerson"));
    CHECK_FALSE(kb.stage_precedes("RetiredPerson", "Professor"));
}

TEST_CASE("incompatible is symmetric on random ontologies", "[kb]") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> node(0, 9);
    KbStore kb;
    const auto name = [](int i) { return "k" + std::to_string(i); };
    for (int i = 0; i < 10; ++i) kb.declare_collection(name(i));
    for (int e = 0; e < 8; ++e) {
        int a = node(rng), b = node(rng);
        if (a >= b) continue;
        try {
            kb.add_genls(name(a), name(b));
        } catch (const DataError&) {
        }
    }
    for (int e = 0; e < 5; ++e) kb.add_disjoint(name(node(rng)), name(node(rng)));
    for (int e = 0; e < 5; ++e) kb.add_following_stage(name(node(rng)), name(node(rng)));
    for (int i = 0; i < 300; ++i) {
        const Fluent p = Fluent::isa("e", name(node(rng)));
        const Fluent q = Fluent::isa("e", name(node(rng)));
        CHECK(kb.incompatible(p, q) == kb.incompatible(q, p));
    }
}

TEST_CASE("markers enforce Initial/Terminal exclusivity", "[kb]") {
    KbStore kb;
    kb.set_marker("NeverSchooled", Marker::Initial);
    CHECK_THROWS_AS(kb.set_marker("NeverSchooled", Marker::Terminal), DataError);
    kb.set_marker("NeverSchooled", Marker::TimeDependent);
    REQUIRE(kb.markers_of("NeverSchooled") != nullptr);
    CHECK(kb.markers_of("NeverSchooled")->count(Marker::Initial) == 1);
    CHECK(kb.markers_of("Unmarked") == nullptr);
}

TEST_CASE("existence interval comes from lifespan assertions", "[kb]") {
    KbStore kb;
    CHECK_FALSE(kb.existence_interval("Tom").has_value());
    kb.add_genls("Human", "BiologicalLivingObject");
    kb.add_assertion(Fluent::isa("Tom", "Human"), "Mt", years(1975, 2040));
    REQUIRE(kb.existence_interval("Tom").has_value());
    CHECK(*kb.existence_interval("Tom") == years(1975, 2040));
    // unrelated assertions do not count
    kb.add_assertion(Fluent::isa("Tom", "Professor"), "Mt", years(2000, 2010));
    CHECK(*kb.existence_interval("Tom") == years(1975, 2040));
}

TEST_CASE("predicate redeclaration must keep arity", "[kb]") {
    KbStore kb;
    kb.declare_predicate("owns", 2, true);
    CHECK_THROWS_AS(kb.declare_predicate("owns", 3, true), DataError);
    CHECK_THROWS_AS(kb.declare_predicate("bad", 0, false), DataError);
}
