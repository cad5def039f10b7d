#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "polcheck/error.hpp"
#include "polcheck/ontology.hpp"
#include "test_util.hpp"

using namespace polcheck;

namespace {

// Value hierarchy: V > V1 > V11, V > V2; plus flat literals.
const char* kHierarchy = R"(
class V
class V1 subclassOf V
class V2 subclassOf V
class V11 subclassOf V1
prop p range Entity, Literal
var x maps o.p range {V, V1, V2, V11}
var y maps o.p range {V, V1, V11}
var z maps o.p range {lo, hi}
)";

// Independent parent map for the oracle.
const std::map<std::string, std::string> kParent = {{"V1", "V"}, {"V2", "V"}, {"V11", "V1"}};

bool oracle_leq(std::string c, const std::string& a) {
    while (true) {
        if (c == a) return true;
        auto it = kParent.find(c);
        if (it == kParent.end()) return false;
        c = it->second;
    }
}

const std::map<std::string, std::vector<std::string>> kRanges = {
    {"x", {"V", "V1", "V2", "V11"}}, {"y", {"V", "V1", "V11"}}, {"z", {"lo", "hi"}}};

std::vector<std::map<std::string, std::string>> oracle_expand(const StateSpace& s) {
    std::vector<std::map<std::string, std::string>> out;
    for (const auto& part : s.parts) {
        for (const auto& x : kRanges.at("x"))
            for (const auto& y : kRanges.at("y"))
                for (const auto& z : kRanges.at("z")) {
                    std::map<std::string, std::string> st{{"x", x}, {"y", y}, {"z", z}};
                    bool ok = true;
                    for (const auto& [k, v] : part) ok = ok && st[k] == v;
                    if (ok && std::find(out.begin(), out.end(), st) == out.end()) out.push_back(st);
                }
    }
    return out;
}

bool oracle_space_refines(const StateSpace& abs, const StateSpace& con) {
    auto A = oracle_expand(abs);
    for (const auto& g2 : oracle_expand(con)) {
        bool found = false;
        for (const auto& g : A) {
            bool all = true;
            for (const auto& [k, v] : g2) all = all && oracle_leq(v, g.at(k));
            found = found || all;
        }
        if (!found) return false;
    }
    return true;
}

StateSpace random_space(std::mt19937& rng) {
    StateSpace s;
    int parts = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < parts; ++i) {
        Assignment a;
        for (const auto& [var, range] : kRanges)
            if (rng() % 2) a[var] = range[rng() % range.size()];
        s.parts.push_back(a);
    }
    return s;
}

}  // namespace

TEST(Ontology, SubclassClosure) {
    Ontology o = parse_ontology(kHierarchy);
    EXPECT_TRUE(o.is_subclass("V11", "V"));
    EXPECT_TRUE(o.is_subclass("V1", "V1"));
    EXPECT_FALSE(o.is_subclass("V2", "V1"));
    EXPECT_FALSE(o.is_subclass("V", "V1"));
    EXPECT_THROW(o.is_subclass("Nope", "V"), NameError);
    try {
        o.is_subclass("V", "Missing");
        FAIL();
    } catch (const NameError& e) {
        EXPECT_NE(std::string(e.what()).find("Missing"), std::string::npos);
    }
}

TEST(Ontology, IndividualsRefineTheirClasses) {
    Ontology o = parse_ontology(std::string(kHierarchy) + "individual i1 : V11\n");
    EXPECT_TRUE(o.is_subclass("i1", "V"));
    EXPECT_TRUE(o.is_subclass("i1", "i1"));
    EXPECT_FALSE(o.is_subclass("V11", "i1"));
}

TEST(Ontology, CycleRejectedWithPath) {
    try {
        parse_ontology("class A subclassOf B\nclass B subclassOf A\n");
        FAIL();
    } catch (const SchemaError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("A -> B -> A"), std::string::npos) << msg;
    }
}

TEST(Ontology, ParseErrorCarriesPosition) {
    try {
        parse_ontology("class A\nclass B subclassOf\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    try {
        parse_ontology("class A\n  var x maps o.p range {a b}\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 27);
    }
}

TEST(Ontology, StateRefinement) {
    Ontology o = parse_ontology(kHierarchy);
    State abs{{{"x", "V"}, {"y", "V1"}, {"z", "lo"}}};
    State con{{{"x", "V11"}, {"y", "V11"}, {"z", "lo"}}};
    EXPECT_TRUE(state_refines(abs, con, o));
    EXPECT_FALSE(state_refines(con, abs, o));
    EXPECT_THROW(state_refines(abs, State{{{"x", "V"}}}, o), StructureError);
}

TEST(Ontology, ExpandSpace) {
    Ontology o = parse_ontology(kHierarchy);
    EXPECT_EQ(expand_space(StateSpace::nothing(), o).size(), 0u);
    EXPECT_EQ(expand_space(StateSpace::everything(), o).size(), 24u);
    EXPECT_EQ(expand_space(parse_space("{x=V1, z=hi}"), o).size(), 3u);
    EXPECT_EQ(expand_space(parse_space("{x=V1} | {x=V1, z=hi}"), o).size(), 6u);
    EXPECT_THROW(expand_space(parse_space("{w=1}"), o), ExpansionError);
    EXPECT_THROW(expand_space(parse_space("{z=mid}"), o), ExpansionError);
}

TEST(Ontology, SpaceRefinesMatchesOracle) {
    Ontology o = parse_ontology(kHierarchy);
    std::mt19937 rng(7);
    int agree_true = 0;
    for (int i = 0; i < 600; ++i) {
        StateSpace a = random_space(rng), b = random_space(rng);
        bool expected = oracle_space_refines(a, b);
        ASSERT_EQ(space_refines(a, b, o), expected) << a.str() << " vs " << b.str();
        agree_true += expected;
    }
    EXPECT_GT(agree_true, 50);
}

TEST(Ontology, MeetAndJoinAreSetOperations) {
    Ontology o = parse_ontology(kHierarchy);
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        StateSpace a = random_space(rng), b = random_space(rng);
        auto ea = expand_space(a, o), eb = expand_space(b, o);
        std::set<State> inter, uni;
        std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(), std::inserter(inter, inter.end()));
        std::set_union(ea.begin(), ea.end(), eb.begin(), eb.end(), std::inserter(uni, uni.end()));
        ASSERT_EQ(expand_space(space_meet(a, b, o), o), inter);
        ASSERT_EQ(expand_space(space_join(a, b, o), o), uni);
    }
}

TEST(Ontology, NormalizeSpaceIsCanonical) {
    Ontology o = parse_ontology(kHierarchy);
    EXPECT_EQ(normalize_space(parse_space("{z=lo} | {z=hi}"), o), StateSpace::everything());
    EXPECT_EQ(normalize_space(parse_space("{x=V1, z=lo}"), o),
              normalize_space(parse_space("{x=V1, z=lo} | {x=V1, z=lo, y=V}"), o));
}

TEST(Ontology, TransformerMustReachFinalSpace) {
    std::string base = "var s maps $x.p range {off, on}\nprop p range Literal\n";
    EXPECT_NO_THROW(parse_ontology(base + "action Up(target:$x) init {s=off} final {s=on} set {s=on}\n"));
    EXPECT_THROW(parse_ontology(base + "action Up(target:$x) init any final {s=on} when {s=on} set {s=off}\n"),
                 SchemaError);
    EXPECT_THROW(parse_ontology(base + "action Up init {s=up} final any\n"), SchemaError);
}

TEST(Ontology, MonotoneTransformersAccepted) {
    // Every generated transformer over a hierarchical variable either loads and is monotone, or is
    // rejected at load.
    std::mt19937 rng(3);
    const std::vector<std::string> vals = {"V", "V1", "V2", "V11"};
    int loaded = 0, rejected = 0;
    for (int i = 0; i < 200; ++i) {
        std::string g = vals[rng() % 4], e1 = vals[rng() % 4], e2 = vals[rng() % 4];
        std::string text = std::string(kHierarchy) + "action A init any final any when {x=" + g + "} set {x=" + e1 +
                           "} set {x=" + e2 + "}\n";
        try {
            Ontology o = parse_ontology(text);
            ++loaded;
            const ActionClassDef& a = *o.action("A");
            auto states = o.universe();
            for (const auto& d1 : states)
                for (const auto& d2 : states)
                    if (state_refines(d1, d2, o))
                        ASSERT_TRUE(state_refines(apply_transformer(a, d1, o), apply_transformer(a, d2, o), o));
        } catch (const SchemaError&) {
            ++rejected;
        }
    }
    EXPECT_GT(loaded, 0);
    EXPECT_GT(rejected, 0);
}

TEST(Ontology, RestrictedSubclassMembers) {
    Ontology o = parse_ontology(R"(
class OS
class Windows subclassOf OS
class Linux subclassOf OS
class Computer subclassOf Object
prop os dom Computer range OS
)");
    DataSystem ds = parse_facts("obj pc1 : Computer {os=Windows}\nobj pc2 : Computer {os=Linux}\nobj pc3 : Computer\n", o);
    auto m = restricted_subclass_members("Computer", {{"os", "Windows"}}, ds, o);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].id, "pc1");
    EXPECT_EQ(restricted_subclass_members("Computer", {{"os", "OS"}}, ds, o).size(), 2u);
    std::vector<std::string> warnings;
    EXPECT_TRUE(restricted_subclass_members("Computer", {{"os", "Computer"}}, ds, o, &warnings).empty());
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(Ontology, FactsValidation) {
    Ontology o = parse_ontology("class Computer subclassOf Object\nclass OS\nprop os dom Computer range OS\nrel owns\n");
    EXPECT_THROW(parse_facts("obj pc1 : Computer {cpu=x}\n", o), SchemaError);
    EXPECT_THROW(parse_facts("obj pc1 : Computer {os=Computer}\n", o), SchemaError);
    EXPECT_THROW(parse_facts("obj pc1 : Laptop\n", o), SchemaError);
    EXPECT_THROW(parse_facts("likes(a, b)\n", o), SchemaError);
    EXPECT_THROW(parse_facts("owns(a, $x)\n", o), ParseError);
    DataSystem ds = parse_facts("obj pc1 : Computer {os=OS}\nowns(bob, pc1).\n", o);
    EXPECT_EQ(ds.base_atoms.size(), 1u);
}

TEST(Ontology, BaseFacts) {
    Ontology o = parse_ontology(testutil::read_file("samples/alice/alice.onto"));
    DataSystem ds = parse_facts(testutil::read_file("samples/alice/alice.facts"), o);
    auto facts = base_facts(ds, o);
    auto has = [&](const std::string& p, const std::string& a, const std::string& b) {
        return facts.count(Atom{p, {Term::constant(a), Term::constant(b)}}) > 0;
    };
    EXPECT_TRUE(has("type", "Alice", "Employee"));
    EXPECT_TRUE(has("type", "Alice", "Agent"));
    EXPECT_TRUE(has("type", "NB1", "Computer"));
    EXPECT_TRUE(has("owns", "Alice", "NB1"));
    EXPECT_TRUE(has("hasRole", "Alice", "Manager"));
    EXPECT_TRUE(has("isa", "Employee", "Entity"));
    EXPECT_FALSE(has("type", "NB1", "Agent"));
}
