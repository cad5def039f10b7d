#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "polcheck/error.hpp"
#include "polcheck/eval.hpp"
#include "polcheck/ontology.hpp"
#include "polcheck/refine.hpp"
#include "test_util.hpp"

using namespace polcheck;

namespace {

const char* kOnto = R"(
class Computer subclassOf Object
prop firewall dom Computer range Literal
prop antivirus dom Computer range Literal
prop owns dom Agent range Object
hie supervises
var fw maps $x.firewall range {no, yes}
var av maps $x.antivirus range {no, yes}
action Protect(target:$x)
action Pick(target:$x)
action Both(target:$x)
action Fw(target:$x) init any final {fw=yes} set {fw=yes}
action Av(target:$x) init any final {av=yes} set {av=yes}
action Off(target:$x) init {fw=no} final {fw=no}
action A(target:$x)
action B(target:$x)
action C(target:$x)
action D(target:$x)
)";

const char* kFacts = R"(
obj Bob : Agent {owns=PC1}
obj PC1 : Computer
)";

const char* kObligation = "hasObligation($s, %((target,$x)), true) :- owns($s, $x) & type($x, Computer).\n";

std::string obligation(const std::string& action) {
    std::string r = kObligation;
    r.replace(r.find('%'), 1, action);
    return r;
}

Ontology onto() { return parse_ontology(kOnto); }

RefinementResult refine(const std::string& policy, const std::string& patterns, const RefineOptions& opts = {}) {
    Ontology o = onto();
    return enumerate_refinements(parse_policy(policy), parse_patterns(patterns, &o), o, opts);
}

std::vector<std::string> rules_with_prefix(const Policy& p, const std::string& prefix) {
    std::vector<std::string> out;
    for (const auto& r : p.rules)
        if (r.id.rfind(prefix, 0) == 0) out.push_back(r.str());
    return out;
}

std::set<Atom> mustdo_of(const Policy& p, const DataSystem& ds, const Ontology& o) {
    Model m = evaluate(p, ds, o);
    auto v = decision_view(m).mustdo_atoms;
    return {v.begin(), v.end()};
}

// Order in which a branch obliges the actions when each obligation is carried out as soon as it
// arises. Stops when nothing new is obliged or when more than one action is obliged at once.
std::vector<std::string> chain_order(const Policy& p) {
    Ontology o = onto();
    std::set<Atom> facts = base_facts(parse_facts(kFacts, o), o);
    std::vector<std::string> out;
    std::set<Atom> done;
    for (int step = 1;; ++step) {
        std::vector<Term> fresh;
        for (const auto& m : decision_view(evaluate(p, facts)).mustdo_atoms)
            if (!done.count(m)) {
                fresh.push_back(m.args[1]);
                done.insert(m);
            }
        if (fresh.size() != 1) return out;
        out.push_back(fresh[0].name());
        facts.insert(Atom{"done", {Term::constant("Bob"), Term::constant("PC1"), fresh[0],
                                   Term::constant("t" + std::to_string(step))}});
    }
}

}  // namespace

TEST(Refine, AliceTwoBranches) {
    Ontology o = parse_ontology(testutil::read_file("samples/alice/alice.onto"));
    DataSystem ds = parse_facts(testutil::read_file("samples/alice/alice.facts"), o);
    Policy p = parse_policy(testutil::read_file("samples/alice/high.pol"), &o);
    PatternSet ps = parse_patterns(testutil::read_file("samples/alice/patterns.ref"), &o);
    auto res = enumerate_refinements(p, ps, o);
    ASSERT_EQ(res.branches.size(), 2u);
    EXPECT_EQ(res.branches[0].log_str(), "r1 Protect.1 /Protect.1 = 12\n");
    EXPECT_EQ(res.branches[1].log_str(), "r1 Protect.1 /Protect.1 = 21\n");

    EXPECT_EQ(rules_with_prefix(res.branches[0].policy, "r1_"),
              (std::vector<std::string>{
                  "@r1_1 derhasObligation($s, InstallFirewall((target,$x)), true) :- type($s, Employee) & "
                  "owns($s, $x) & type($x, Computer).",
                  "@r1_2 derhasObligation($s, InstallAntiVirus((target,$x)), true) :- done($s, $_o1, "
                  "InstallFirewall((target,$x)), $_t1) & hasObligation($s, Protect((target,$x)), true)."}));

    Atom av = parse_atom_text("mustdo(Alice, InstallAntiVirus((target,NB1)), true)");
    EXPECT_TRUE(mustdo_of(res.branches[0].policy, ds, o).empty());
    EXPECT_EQ(mustdo_of(res.branches[1].policy, ds, o), std::set<Atom>{av});
    // The authored mustdo rule is kept; no second default is installed.
    EXPECT_EQ(res.branches[1].policy.find("default_mustdo"), nullptr);
    for (const auto& b : res.branches) {
        EXPECT_TRUE(check_stratification(b.policy).empty());
        EXPECT_TRUE(check_safety(b.policy).empty());
    }
}

TEST(Refine, SequenceEmitsChainedPair) {
    auto res = refine(obligation("Protect"), "refine Protect(target:$x) := Fw(target:$x) ; Av(target:$x) type=basic-seq\n");
    ASSERT_EQ(res.branches.size(), 1u);
    EXPECT_TRUE(res.branches[0].choice_log.empty());
    EXPECT_EQ(rules_with_prefix(res.branches[0].policy, "r1_"),
              (std::vector<std::string>{
                  "@r1_1 derhasObligation($s, Fw((target,$x)), firewall($x, yes)) :- owns($s, $x) & type($x, Computer).",
                  "@r1_2 derhasObligation($s, Av((target,$x)), true) :- done($s, $_o1, Fw((target,$x)), $_t1) & "
                  "hasObligation($s, Protect((target,$x)), true)."}));
    EXPECT_TRUE(res.warnings.empty());
}

TEST(Refine, SequenceWithUnconstrainedMeetIsTrue) {
    auto res = refine(obligation("Protect"), "refine Protect(target:$x) := A(target:$x) ; B(target:$x) type=basic-seq\n");
    ASSERT_EQ(res.branches.size(), 1u);
    EXPECT_EQ(res.branches[0].policy.find("r1_1")->head.args[2].as_formula(), Formula::truth());
}

TEST(Refine, UnsatisfiableMeetWarns) {
    auto res = refine(obligation("Protect"), "refine Protect(target:$x) := Fw(target:$x) ; Off(target:$x) type=basic-seq\n");
    ASSERT_EQ(res.branches.size(), 1u);
    EXPECT_EQ(res.branches[0].policy.find("r1_1")->head.args[2].as_formula(), Formula::falsity());
    ASSERT_EQ(res.warnings.size(), 1u);
    EXPECT_NE(res.warnings[0].find("r1"), std::string::npos);
}

TEST(Refine, CompileSpace) {
    Ontology o = onto();
    std::vector<Term> ctx{parse_atom_text("x(Fw((target,PC1)))").args[0]};
    EXPECT_EQ(compile_space(StateSpace::everything(), ctx, o), Formula::truth());
    EXPECT_EQ(compile_space(StateSpace::nothing(), ctx, o), Formula::falsity());
    EXPECT_EQ(compile_space(parse_space("{fw=yes, av=no}"), ctx, o).str(), "antivirus(PC1, no) & firewall(PC1, yes)");
    EXPECT_EQ(compile_space(parse_space("{fw=yes} | {av=yes}"), ctx, o).str(),
              "firewall(PC1, yes) | antivirus(PC1, yes)");
    // Without a binding for the parameter the object stays an anonymous variable.
    EXPECT_EQ(compile_space(parse_space("{fw=yes}"), {}, o).str(), "firewall($_x, yes)");
}

TEST(Refine, NoPatternsSingleBranch) {
    std::string text = obligation("Protect") + "hasDispensation($s, A((target,$x))) :- owns($s, $x).\n";
    Policy p = parse_policy(text);
    auto res = refine(text, "");
    ASSERT_EQ(res.branches.size(), 1u);
    EXPECT_TRUE(res.branches[0].choice_log.empty());
    const Policy& b = res.branches[0].policy;
    EXPECT_EQ(b.rules[0], p.rules[0]);
    EXPECT_EQ(b.rules[1].str(),
              "@r1_lift derhasObligation($s, Protect((target,$x)), true) :- owns($s, $x) & type($x, Computer).");
    EXPECT_EQ(b.rules[2], p.rules[1]);
}

TEST(Refine, PatternMatchingNoRuleLeavesPolicy) {
    auto with = refine(obligation("Protect"), "refine Pick(target:$x) := A(target:$x) \\/ B(target:$x) type=basic-flex-choice\n");
    auto without = refine(obligation("Protect"), "");
    ASSERT_EQ(with.branches.size(), 1u);
    EXPECT_EQ(with.branches[0].policy, without.branches[0].policy);
}

TEST(Refine, ChoiceSplitsWithDoneGuards) {
    Policy p = parse_policy(obligation("Pick"));
    auto res = refine(obligation("Pick"), "refine Pick(target:$x) := A(target:$x) \\/ B(target:$x) type=basic-flex-choice\n");
    ASSERT_EQ(res.branches.size(), 2u);
    EXPECT_EQ(res.branches[0].log_str(), "r1 Pick.1 /Pick.1 = 1\n");
    EXPECT_EQ(res.branches[1].log_str(), "r1 Pick.1 /Pick.1 = 2\n");
    EXPECT_EQ(rules_with_prefix(res.branches[0].policy, "r1_"),
              (std::vector<std::string>{"@r1_1 derhasObligation($s, A((target,$x)), true) :- owns($s, $x) & "
                                        "type($x, Computer) & !done($s, $_o1, B((target,$x)), $_t1)."}));
    // The refined body is the original body plus negative done guards only.
    for (const auto& b : res.branches)
        for (const auto& r : b.policy.rules) {
            if (r.id.rfind("r1_", 0) != 0) continue;
            ASSERT_GE(r.body.size(), p.rules[0].body.size());
            EXPECT_TRUE(std::equal(p.rules[0].body.begin(), p.rules[0].body.end(), r.body.begin()));
            for (std::size_t i = p.rules[0].body.size(); i < r.body.size(); ++i) {
                EXPECT_FALSE(r.body[i].positive);
                EXPECT_EQ(r.body[i].atom.predicate, "done");
            }
        }
}

TEST(Refine, ChoiceDecisionsAreExclusive) {
    Ontology o = onto();
    DataSystem ds = parse_facts(kFacts, o);
    auto res = refine(obligation("Pick"), "refine Pick(target:$x) := A(target:$x) \\/ B(target:$x) type=basic-flex-choice\n");
    ASSERT_EQ(res.branches.size(), 2u);
    EXPECT_EQ(mustdo_of(res.branches[0].policy, ds, o),
              std::set<Atom>{parse_atom_text("mustdo(Bob, A((target,PC1)), true)")});
    EXPECT_EQ(mustdo_of(res.branches[1].policy, ds, o),
              std::set<Atom>{parse_atom_text("mustdo(Bob, B((target,PC1)), true)")});
    // Once B is done, the first branch no longer obliges A.
    Policy p = res.branches[0].policy;
    std::set<Atom> facts = base_facts(ds, o);
    facts.insert(parse_atom_text("done(Bob, PC1, B((target,PC1)), t1)"));
    EXPECT_TRUE(decision_view(evaluate(p, facts)).mustdo_atoms.empty());
}

TEST(Refine, TwoChoiceApplicationsFourBranches) {
    std::string text = obligation("Pick") + "hasObligation($s, Pick((target,$x)), true) :- supervises($s, $x).\n";
    auto res = refine(text, "refine Pick(target:$x) := A(target:$x) \\/ B(target:$x) type=basic-flex-choice\n");
    ASSERT_EQ(res.branches.size(), 4u);
    std::set<std::vector<ChoiceEntry>> logs;
    for (const auto& b : res.branches) logs.insert(b.choice_log);
    EXPECT_EQ(logs.size(), 4u);
    EXPECT_EQ(res.branches[3].log_str(), "r1 Pick.1 /Pick.1 = 2\nr2 Pick.1 /Pick.1 = 2\n");
}

TEST(Refine, ConjunctionCoversBothOrders) {
    auto res = refine(obligation("Both"), "refine Both(target:$x) := A(target:$x) /\\ B(target:$x) type=basic-flex-conj\n");
    ASSERT_EQ(res.branches.size(), 2u);
    std::set<std::vector<std::string>> orders;
    for (const auto& b : res.branches) orders.insert(chain_order(b.policy));
    std::set<std::vector<std::string>> expected;
    for (const auto& t : traces(parse_patterns("refine Both(target:$x) := A(target:$x) /\\ B(target:$x)\n")
                                    .patterns()[0].body)) {
        std::vector<std::string> names;
        for (const auto& a : t) names.push_back(a.name());
        expected.insert(names);
    }
    EXPECT_EQ(orders, expected);
}

TEST(Refine, ConjunctionOfIdenticalOperands) {
    auto res = refine(obligation("Both"), "refine Both(target:$x) := A(target:$x) /\\ A(target:$x) type=basic-flex-conj\n");
    ASSERT_EQ(res.branches.size(), 2u);
    EXPECT_EQ(res.branches[0].policy, res.branches[1].policy);
}

// Orders produced by refining a binary conjunction tree: each conjunction puts one operand's
// sequence before the other's.
std::set<std::vector<std::string>> binary_orders(const Composition& c) {
    if (c.is_atomic()) return {{c.action.name()}};
    auto l = binary_orders(c.left()), r = binary_orders(c.right());
    std::set<std::vector<std::string>> out;
    for (const auto& x : l)
        for (const auto& y : r) {
            std::vector<std::string> xy = x, yx = y;
            xy.insert(xy.end(), y.begin(), y.end());
            yx.insert(yx.end(), x.begin(), x.end());
            out.insert(xy);
            if (c.op == Operator::Conjunction) out.insert(yx);
        }
    return out;
}

TEST(Refine, NestedConjunctionFourBranches) {
    std::string pat = "refine Both(target:$x) := (A(target:$x) /\\ B(target:$x)) /\\ C(target:$x)\n";
    auto res = refine(obligation("Both"), pat);
    ASSERT_EQ(res.branches.size(), 4u);
    std::set<std::vector<std::string>> orders;
    for (const auto& b : res.branches) orders.insert(chain_order(b.policy));
    EXPECT_EQ(orders, binary_orders(parse_patterns(pat).patterns()[0].body));
    EXPECT_EQ(orders.size(), 4u);
}

TEST(Refine, SeveralPatternsBranch) {
    std::string pats =
        "refine Protect(target:$x) := Fw(target:$x) /\\ Av(target:$x) type=basic-flex-conj\n"
        "refine Protect(target:$x) := Fw(target:$x) ; Av(target:$x) type=basic-seq\n";
    auto res = refine(obligation("Protect"), pats);
    ASSERT_EQ(res.branches.size(), 3u);
    EXPECT_EQ(res.branches[0].log_str(), "r1 - / = Protect.1\nr1 Protect.1 /Protect.1 = 12\n");
    EXPECT_EQ(res.branches[1].log_str(), "r1 - / = Protect.1\nr1 Protect.1 /Protect.1 = 21\n");
    EXPECT_EQ(res.branches[2].log_str(), "r1 - / = Protect.2\n");
}

TEST(Refine, RefinesThroughIntermediatePatterns) {
    std::string pats =
        "refine Protect(target:$x) := Pick(target:$x) ; C(target:$x) type=basic-seq\n"
        "refine Pick(target:$x) := A(target:$x) \\/ B(target:$x) type=basic-flex-choice\n";
    auto res = refine(obligation("Protect"), pats);
    ASSERT_EQ(res.branches.size(), 2u);
    EXPECT_EQ(res.branches[0].log_str(), "r1 Pick.1 /Protect.1.L/Pick.1 = 1\n");
    // C follows whichever alternative of Pick was completed.
    auto rules = rules_with_prefix(res.branches[0].policy, "r1_");
    ASSERT_EQ(rules.size(), 3u);
    EXPECT_NE(rules[1].find("done($s, $_o1, A((target,$x)), $_t1)"), std::string::npos);
    EXPECT_NE(rules[2].find("done($s, $_o1, B((target,$x)), $_t1)"), std::string::npos);
    for (const auto& b : res.branches)
        for (const auto& r : b.policy.rules)
            if (r.kind() == PredicateKind::DerhasObligation && r.id.rfind("r1_", 0) == 0)
                EXPECT_NE(r.head.args[1].name(), "Pick");
}

TEST(Refine, DerivedObligationRootIsReplaced) {
    std::string text = "derhasObligation($s, Pick((target,$x)), true) :- owns($s, $x).\n";
    auto res = refine(text, "refine Pick(target:$x) := A(target:$x) ; B(target:$x) type=basic-seq\n");
    ASSERT_EQ(res.branches.size(), 1u);
    const Policy& p = res.branches[0].policy;
    EXPECT_EQ(p.find("r1"), nullptr);
    EXPECT_EQ(p.find("r1_2")->str(),
              "@r1_2 derhasObligation($s, B((target,$x)), true) :- done($s, $_o1, A((target,$x)), $_t1) & owns($s, $x).");
}

TEST(Refine, BranchLimit) {
    std::string pat = "refine Both(target:$x) := (A(target:$x) /\\ B(target:$x)) /\\ C(target:$x)\n";
    RefineOptions opts;
    opts.max_branches = 3;
    try {
        refine(obligation("Both"), pat, opts);
        FAIL() << "expected BranchLimitError";
    } catch (const BranchLimitError& e) {
        EXPECT_NE(std::string(e.what()).find("Both.1"), std::string::npos);
    }
    opts.max_branches = 4;
    EXPECT_EQ(refine(obligation("Both"), pat, opts).branches.size(), 4u);
}

TEST(Refine, ReplayRejectsForeignLog) {
    Ontology o = onto();
    Policy p = parse_policy(obligation("Pick"));
    PatternSet ps = parse_patterns("refine Pick(target:$x) := A(target:$x) \\/ B(target:$x) type=basic-flex-choice\n", &o);
    EXPECT_THROW(replay(p, ps, o, {}), PatternError);
    EXPECT_THROW(replay(p, ps, o, {ChoiceEntry{"r1", "Pick.1", "/Pick.1", "3"}}), PatternError);
    EXPECT_THROW(replay(p, ps, o, {ChoiceEntry{"r1", "Pick.1", "/Pick.1", "1"}, ChoiceEntry{"r9", "", "", "1"}}),
                 PatternError);
    EXPECT_EQ(replay(p, ps, o, {ChoiceEntry{"r1", "Pick.1", "/Pick.1", "2"}}).policy.str(),
              enumerate_refinements(p, ps, o).branches[1].policy.str());
}

namespace {

Term target_action(const std::string& name) { return Term::action(name, {Binding{"target", Term::variable("x")}}); }

Composition random_body(std::mt19937& rng, int leaves, int& splits) {
    if (leaves == 1) {
        static const char* names[] = {"A", "B", "C", "D", "Fw", "Av"};
        return Composition::atomic(target_action(names[rng() % 6]));
    }
    int k = 1 + static_cast<int>(rng() % (leaves - 1));
    Composition l = random_body(rng, k, splits), r = random_body(rng, leaves - k, splits);
    Operator op = static_cast<Operator>(rng() % 3);
    if (op != Operator::Sequence) ++splits;
    if (op != Operator::Choice && rng() % 3 == 0)
        return Composition::guarded(op, l, r, StateSpace::concise({{"fw", "yes"}}), GuardSide::Right);
    return Composition::make(op, l, r);
}

}  // namespace

TEST(Refine, RandomPatternsStaySafeAndReplay) {
    Ontology o = onto();
    DataSystem ds = parse_facts(kFacts, o);
    Policy p = parse_policy(obligation("Both") + "derhasObligation($s, Both((target,$x)), true) :- supervises($s, $x).\n");
    std::mt19937 rng(20261015);
    for (int round = 0; round < 60; ++round) {
        int splits = 0;
        Composition body = random_body(rng, 2 + static_cast<int>(rng() % 3), splits);
        PatternSet ps({RefinementPattern{"Both.1", target_action("Both"), body, CompositionType::BasicSeq}});
        auto res = enumerate_refinements(p, ps, o);
        SCOPED_TRACE(body.str());
        // Two refinable rules share the pattern.
        EXPECT_LE(res.branches.size(), std::size_t{1} << (2 * splits));
        std::set<std::vector<ChoiceEntry>> logs;
        for (const auto& b : res.branches) {
            logs.insert(b.choice_log);
            EXPECT_TRUE(check_stratification(b.policy).empty()) << b.policy.str();
            EXPECT_TRUE(check_safety(b.policy).empty()) << b.policy.str();
            EXPECT_EQ(replay(p, ps, o, b.choice_log).policy.str(), b.policy.str());
            EXPECT_NO_THROW(evaluate(b.policy, ds, o));
            EXPECT_EQ(parse_policy(b.policy.str()), b.policy);
            for (const auto& r : b.policy.rules)
                if (r.kind() == PredicateKind::DerhasObligation) EXPECT_NE(r.head.args[1].name(), "Both");
        }
        EXPECT_EQ(logs.size(), res.branches.size());
    }
}

TEST(Templates, AuthorizationsFromMustdo) {
    Policy p = derive_authorizations(Policy{});
    std::set<Atom> facts;
    EXPECT_TRUE(evaluate(p, facts).atoms.empty());
    for (const char* f : {"mustdo(Bob, Encrypt((target,F1)), true)", "resource(Encrypt((target,F1)), R1)",
                          "instrument(Encrypt((target,F1)), I1)"})
        facts.insert(parse_atom_text(f));
    Model m = evaluate(p, facts);
    for (const char* a : {"cando(Encrypt((target,F1)), Bob, +execute)", "cando(R1, Bob, +modify)",
                          "cando(I1, Bob, +read)", "do(Encrypt((target,F1)), Bob, +execute)", "do(R1, Bob, +modify)",
                          "do(I1, Bob, +read)"})
        EXPECT_TRUE(m.contains(parse_atom_text(a))) << a;
    EXPECT_EQ(m.atoms.size(), facts.size() + 6);
    // Authored prohibitions pass through.
    Policy authored = parse_policy("cando($o, $s, -write) :- type($o, Secret) & type($s, Agent).\n");
    Policy q = derive_authorizations(authored);
    EXPECT_EQ(q.rules.front(), authored.rules.front());
    EXPECT_TRUE(check_stratification(q).empty());
    Model mq = evaluate(q, {parse_atom_text("type(F1, Secret)"), parse_atom_text("type(Bob, Agent)")});
    EXPECT_TRUE(mq.contains(parse_atom_text("do(F1, Bob, -write)")));
}

TEST(Templates, HierarchyPropagation) {
    Ontology o = onto();
    Policy p = parse_policy("hasDispensation($s, A((target,$x))) :- owns($s, $x).\n"
                            "hasObligation($s, B((target,$x)), true) :- owns($s, $x).\n");
    auto res = enumerate_refinements(p, PatternSet{}, o);
    ASSERT_EQ(res.branches.size(), 1u);
    const Policy& b = res.branches[0].policy;
    for (const char* id : {"hie_supervises_hasObligation", "hie_supervises_derhasObligation",
                           "hie_supervises_hasDispensation", "hie_supervises_derhasDispensation"})
        EXPECT_NE(b.find(id), nullptr) << id;

    // supervises(s, t): s inherits from t. Chain Cid -> Bea -> Ann, Dan unrelated.
    std::vector<std::pair<std::string, std::string>> edges = {{"Bea", "Ann"}, {"Cid", "Bea"}};
    std::set<Atom> facts{parse_atom_text("owns(Ann, PC1)")};
    for (const auto& [s, t] : edges) facts.insert(parse_atom_text("supervises(" + s + ", " + t + ")"));
    facts.insert(parse_atom_text("supervises(Dan, Eve)"));
    std::set<std::string> reach{"Ann"};
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& [s, t] : edges)
            if (reach.count(t) && reach.insert(s).second) grew = true;
    }
    Model m = evaluate(b, facts);
    std::set<std::string> disp, obl;
    for (const auto& a : m.atoms) {
        if (a.predicate == "derhasDispensation") disp.insert(a.args[0].name());
        if (a.predicate == "derhasObligation") obl.insert(a.args[0].name());
    }
    EXPECT_EQ(disp, reach);
    EXPECT_EQ(obl, reach);
    EXPECT_TRUE(propagate_hierarchy(p, parse_ontology("class X\n")).rules == p.rules);
}

TEST(Templates, DispensationPrecedence) {
    Ontology o = onto();
    DataSystem ds = parse_facts(kFacts, o);
    std::string text = obligation("A") + obligation("B") + "hasDispensation($s, A((target,$x))) :- owns($s, $x).\n";
    auto res = enumerate_refinements(parse_policy(text), PatternSet{}, o);
    const Policy& b = res.branches[0].policy;
    ASSERT_NE(b.find("default_mustdo"), nullptr);
    EXPECT_EQ(b.find("default_mustdo")->str(),
              "@default_mustdo mustdo($s, $a, $q) :- derhasObligation($s, $a, $q) & !derhasDispensation($s, $a).");
    EXPECT_EQ(mustdo_of(b, ds, o), std::set<Atom>{parse_atom_text("mustdo(Bob, B((target,PC1)), true)")});

    RefineOptions custom;
    custom.conflict = ConflictMode::Custom;
    auto c = enumerate_refinements(parse_policy(text), PatternSet{}, o, custom);
    EXPECT_EQ(c.branches[0].policy.find("default_mustdo"), nullptr);
    EXPECT_TRUE(mustdo_of(c.branches[0].policy, ds, o).empty());
}
