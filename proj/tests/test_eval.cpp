#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "polcheck/error.hpp"
#include "polcheck/eval.hpp"
#include "polcheck/ontology.hpp"
#include "generators.hpp"
#include "test_util.hpp"

using namespace polcheck;
using namespace gen;

namespace {

Atom atom(const std::string& text) { return parse_atom_text(text); }

std::set<Atom> atoms(std::initializer_list<const char*> texts) {
    std::set<Atom> out;
    for (auto t : texts) out.insert(atom(t));
    return out;
}

const char* kObligationRule =
    "hasObligation($s, Protect((target,$x)), hasInstalled($x, $y) & type($y, Firewall)) :- "
    "type($x, Computer) & type($s, Employee) & owner($x, $s).\n";

std::set<Atom> pc_facts() {
    return atoms({"type(pc1, Computer)", "type(emp1, Employee)", "type(pc2, Computer)", "type(emp2, Employee)",
                  "type(pc3, Computer)", "owner(pc1, emp1)", "owner(pc2, emp2)", "owner(pc3, emp1)"});
}

}  // namespace

TEST(Ground, ObligationExampleYieldsThreeInstances) {
    Policy p = parse_policy(kObligationRule);
    auto g = ground(p, pc_facts());
    ASSERT_EQ(g.size(), 3u);
    Model m = evaluate(p, pc_facts());
    std::set<Atom> obligations;
    for (const auto& a : m.atoms)
        if (a.predicate == "hasObligation") obligations.insert(a);
    EXPECT_EQ(obligations,
              atoms({"hasObligation(emp1, Protect((target,pc1)), hasInstalled(pc1, $y) & type($y, Firewall))",
                     "hasObligation(emp2, Protect((target,pc2)), hasInstalled(pc2, $y) & type($y, Firewall))",
                     "hasObligation(emp1, Protect((target,pc3)), hasInstalled(pc3, $y) & type($y, Firewall))"}));
}

TEST(Ground, TrivialCases) {
    Policy p = parse_policy("hasDispensation(bob, Audit()) :- type(bob, Employee).");
    auto g = ground(p, atoms({"type(bob, Employee)"}));
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].head, atom("hasDispensation(bob, Audit())"));
    EXPECT_TRUE(ground(parse_policy(kObligationRule), {}).empty());
}

TEST(Evaluate, FactsOnly) {
    EXPECT_EQ(evaluate(Policy{}, pc_facts()).atoms, pc_facts());
}

TEST(Evaluate, AliceExampleWithRefinedRules) {
    Ontology o = parse_ontology(testutil::read_file("samples/alice/alice.onto"));
    DataSystem ds = parse_facts(testutil::read_file("samples/alice/alice.facts"), o);
    Policy p = parse_policy(testutil::read_file("samples/alice/high.pol") +
                            "derhasObligation($s, InstallFirewall((target,$x)), true) :- type($s, Employee) & owns($s, $x) & type($x, Computer).\n"
                            "derhasObligation($s, InstallAntiVirus((target,$x)), true) :- type($s, Employee) & owns($s, $x) & type($x, Computer).\n"
                            "derhasDispensation($s, $a) :- hasDispensation($s, $a).\n");
    Model m = evaluate(p, ds, o);
    DecisionView v = decision_view(m);
    EXPECT_EQ(v.mustdo_atoms, std::vector<Atom>{atom("mustdo(Alice, InstallAntiVirus((target,NB1)), true)")});
    EXPECT_FALSE(m.contains(atom("mustdo(Alice, InstallFirewall((target,NB1)), true)")));
    EXPECT_TRUE(m.contains(atom("derhasObligation(Alice, InstallFirewall((target,NB1)), true)")));
}

TEST(Evaluate, DecisionViewReportsBothSigns) {
    Policy p = parse_policy("do(f, $s, +read) :- p($s).\ndo(f, $s, -read) :- q($s).");
    DecisionView v = decision_view(evaluate(p, atoms({"p(bob)", "q(bob)"})));
    EXPECT_EQ(v.do_atoms, (std::vector<Atom>{atom("do(f, bob, +read)"), atom("do(f, bob, -read)")}));
    EXPECT_TRUE(decision_view(Model{}).do_atoms.empty());
}

TEST(Evaluate, IntegrityRule) {
    Policy p = parse_policy("mustdo($s, $a, true) :- derhasObligation($s, $a, true).\n"
                            "derhasObligation(bob, Encrypt((target,m1)), true) :- type(bob, Employee).\n"
                            "@modal error :- mustdo($s, $a, $q) & !do($a, $s, +execute).\n");
    IntegrityResult r = check_integrity(evaluate(p, atoms({"type(bob, Employee)"})));
    EXPECT_FALSE(r.consistent);
    ASSERT_EQ(r.witnesses.size(), 1u);
    EXPECT_EQ(r.witnesses[0].rule_id, "modal");
    EXPECT_TRUE(check_integrity(evaluate(p, atoms({"type(bob, Employee)", "do(Encrypt((target,m1)), bob, +execute)"}))).consistent);
    EXPECT_TRUE(check_integrity(evaluate(parse_policy("error :- p(z)."), atoms({"p(a)"}))).consistent);
    EXPECT_TRUE(check_integrity(evaluate(Policy{}, {})).consistent);
}

TEST(Evaluate, ClosedDefaultDeniesUngranted) {
    Policy p = parse_policy("cando($o, $s, +read) :- wants($s, $o).\n"
                            "do($o, $s, +$a) :- cando($o, $s, +$a) & trusted($s).\n"
                            "do($o, $s, -$a) :- !do($o, $s, +$a).\n");
    Model m = evaluate(p, atoms({"wants(bob, f1)", "wants(eve, f2)", "trusted(bob)"}));
    EXPECT_TRUE(m.contains(atom("do(f1, bob, +read)")));
    EXPECT_TRUE(m.contains(atom("do(f2, eve, -read)")));
    EXPECT_FALSE(m.contains(atom("do(f1, bob, -read)")));
}

TEST(Evaluate, NegativeCycleRejected) {
    EXPECT_THROW(evaluate(parse_policy("p($x) :- r($x) & !q($x).\nq($x) :- r($x) & !p($x)."), atoms({"r(a)"})),
                 StructureError);
}

TEST(Evaluate, RecursionReachesFixpoint) {
    Policy p = parse_policy("derhasObligation($s, $a, $q) :- hasObligation($t, $a, $q) & hie($s, $t).\n"
                            "derhasObligation($s, $a, $q) :- derhasObligation($t, $a, $q) & hie($s, $t).\n");
    Model m = evaluate(p, atoms({"hasObligation(A, Act(), true)", "hie(B, A)", "hie(C, B)", "hie(D, C)"}));
    EXPECT_TRUE(m.contains(atom("derhasObligation(D, Act(), true)")));
    EXPECT_EQ(m.strata().at(3).size(), 3u);
}

TEST(Evaluate, MatchesNaiveOracle) {
    std::mt19937 rng(2026);
    int nonempty = 0;
    for (int i = 0; i < 100; ++i) {
        auto rules = random_rules(rng);
        std::set<Atom> facts = random_base_facts(rng);
        std::set<Atom> expected = oracle_model(rules, facts, {"c0", "c1", "c2", "c3"});
        ASSERT_LE(expected.size(), 200u);
        Policy p = parse_policy(program_text(rules));
        Model m = evaluate(p, facts);
        ASSERT_EQ(m.atoms, expected) << program_text(rules);
        nonempty += expected.size() > facts.size();
        for (int k = 0; k < 3; ++k) {
            Policy q = p;
            std::shuffle(q.rules.begin(), q.rules.end(), rng);
            Model mq = evaluate(q, facts);
            ASSERT_EQ(mq.atoms, m.atoms);
            ASSERT_EQ(mq.provenance, m.provenance);
        }
    }
    EXPECT_GT(nonempty, 30);
}

TEST(Evaluate, NoNegativeDependencyOnSameOrHigherStratum) {
    Policy p = parse_policy(testutil::read_file("tests/fixtures/strata.pol"));
    Model m = evaluate(p, atoms({"type(pc1, Computer)", "type(ann, Employee)", "owner(pc1, ann)", "owns(ann, pc1)",
                                 "hasRole(ann, Manager)", "type(bob, Manager)", "type(m1, EmailMessage)",
                                 "messagetype(m1, PlainText)", "hasClassification(m1, Confidential)"}));
    EXPECT_FALSE(m.atoms.size() == m.facts.size());
    for (const auto& [head, ds] : m.provenance)
        for (const auto& d : ds)
            for (const auto& n : d.negative) ASSERT_LT(atom_stratum(n), atom_stratum(head)) << head << " / " << n;
}

TEST(Explain, Trees) {
    Policy p = parse_policy("@a q($x) :- p($x).\n@b q($x) :- r($x) & !s($x).\n@c t($x) :- q($x).");
    Model m = evaluate(p, atoms({"p(k)", "r(k)"}));
    EXPECT_EQ(explain(m, atom("t(k)")), "t(k)  <- c\n  q(k)  <- a\n    p(k)  [fact]\n");
    EXPECT_EQ(explain(m, atom("q(k)")),
              "q(k)  <- a\n  p(k)  [fact]\n\nq(k)  <- b\n  r(k)  [fact]\n  not s(k)\n");
    EXPECT_EQ(explain(m, atom("t(z)")), "not derivable\n");
    EXPECT_EQ(dump(m), "p(k)\nq(k)\nr(k)\nt(k)\n");
}
