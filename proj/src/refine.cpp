#include "polcheck/refine.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "polcheck/error.hpp"

namespace polcheck {

std::string ChoiceEntry::str() const {
    return rule_id + " " + (pattern_id.empty() ? "-" : pattern_id) + " " + (node.empty() ? "/" : node) + " = " + branch;
}

std::string RefinementBranch::log_str() const {
    std::string out;
    for (const auto& e : choice_log) out += e.str() + "\n";
    return out;
}

namespace {

using Conj = std::vector<Literal>;
using Dnf = std::vector<Conj>;

const Dnf kTrue{Conj{}};

Dnf dnf_and(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& x : a)
        for (const auto& y : b) {
            Conj c = x;
            c.insert(c.end(), y.begin(), y.end());
            out.push_back(std::move(c));
        }
    return out;
}

Dnf dnf_or(Dnf a, const Dnf& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

Dnf dnf_not(const Dnf& a) {
    Dnf out = kTrue;
    for (const auto& conj : a) {
        Dnf choice;
        for (const auto& l : conj) choice.push_back(Conj{Literal{!l.positive, l.atom}});
        out = dnf_and(out, choice);
    }
    return out;
}

Term var(const std::string& n) { return Term::variable(n); }
Atom make_atom(std::string p, std::vector<Term> args) { return Atom{std::move(p), std::move(args)}; }
Literal pos(Atom a) { return Literal{true, std::move(a)}; }
Literal neg(Atom a) { return Literal{false, std::move(a)}; }

std::string strip(const std::string& v) { return !v.empty() && v[0] == '$' ? v.substr(1) : v; }

// Value of the object a variable maps to, looked up through the action parameters.
Term resolve_object(const VariableDef& v, const std::vector<Term>& context, const Ontology& onto) {
    if (!v.object_is_parameter()) return Term::constant(v.object);
    std::string param = strip(v.object);
    for (const auto& t : context) {
        if (!t.is_action()) continue;
        const ActionClassDef* def = onto.action(t.name());
        if (!def) continue;
        for (const auto& [prop, pv] : def->params) {
            if (strip(pv) != param) continue;
            for (const auto& b : t.bindings())
                if (b.property == prop) return b.value;
        }
    }
    return var("_" + param);
}

Dnf space_literals(const StateSpace& s, const std::vector<Term>& context, const Ontology& onto) {
    Dnf out;
    for (const auto& part : s.parts) {
        Conj c;
        for (const auto& [name, val] : part) {
            const VariableDef* v = onto.variable(name);
            if (!v) continue;
            c.push_back(pos(make_atom(v->property, {resolve_object(*v, context, onto), Term::constant(val)})));
        }
        out.push_back(std::move(c));
    }
    return out;
}

void collect_leaves(const Composition& c, std::vector<Term>& out) {
    if (c.is_atomic()) out.push_back(c.action);
    for (const auto& ch : c.children) collect_leaves(ch, out);
}

std::vector<Term> leaves(const Composition& c) {
    std::vector<Term> out;
    collect_leaves(c, out);
    return out;
}

const ActionClassDef* node_action(const Composition& c, const Ontology& onto) {
    if (c.is_atomic()) return onto.action(c.action.name());
    if (c.label) return onto.action(*c.label);
    return nullptr;
}

StateSpace init_space(const Composition& c, const Ontology& onto);

StateSpace final_space(const Composition& c, const Ontology& onto) {
    if (const ActionClassDef* a = node_action(c, onto)) return a->final_space;
    if (!c.is_op()) return StateSpace::everything();
    if (c.op == Operator::Sequence) return final_space(c.right(), onto);
    return space_join(final_space(c.left(), onto), final_space(c.right(), onto), onto);
}

StateSpace init_space(const Composition& c, const Ontology& onto) {
    if (const ActionClassDef* a = node_action(c, onto)) return a->init;
    if (!c.is_op()) return StateSpace::everything();
    if (c.op == Operator::Sequence) return init_space(c.left(), onto);
    return space_join(init_space(c.left(), onto), init_space(c.right(), onto), onto);
}

Composition substitute(const Composition& c, const Substitution& s) {
    Composition out = c;
    if (c.is_atomic()) out.action = polcheck::substitute(c.action, s);
    for (auto& ch : out.children) ch = substitute(ch, s);
    return out;
}

Rule template_rule(std::string id, Atom head, Conj body) { return Rule{std::move(id), std::move(head), std::move(body), 0}; }

bool has_equivalent(const Policy& p, const Rule& r) {
    for (const auto& x : p.rules)
        if (x.head == r.head && x.body == r.body) return true;
    return false;
}

void add_template(Policy& p, const Rule& r) {
    if (!has_equivalent(p, r)) p.rules.push_back(r);
}

}  // namespace

Formula compile_space(const StateSpace& s, const std::vector<Term>& context, const Ontology& onto) {
    std::vector<Formula> parts;
    for (const auto& conj : space_literals(s, context, onto)) {
        std::vector<Formula> atoms;
        for (const auto& l : conj) atoms.push_back(Formula::of(l.atom));
        Formula f = Formula::conjunction(std::move(atoms));
        if (f.kind == Formula::Kind::True) return f;
        parts.push_back(std::move(f));
    }
    if (parts.empty()) return Formula::falsity();
    if (parts.size() == 1) return parts.front();
    Formula f;
    f.kind = Formula::Kind::Or;
    f.children = std::move(parts);
    return f;
}

Policy propagate_hierarchy(const Policy& p, const Ontology& onto) {
    Policy out = p;
    for (const auto& [pred, fam] : onto.families()) {
        if (fam != PredicateFamily::Hierarchical) continue;
        Atom h = make_atom(pred, {var("s"), var("t")});
        for (const char* src : {"hasObligation", "derhasObligation"})
            add_template(out, template_rule("hie_" + pred + "_" + src, make_atom("derhasObligation", {var("s"), var("a"), var("q")}),
                                            {pos(make_atom(src, {var("t"), var("a"), var("q")})), pos(h)}));
        for (const char* src : {"hasDispensation", "derhasDispensation"})
            add_template(out, template_rule("hie_" + pred + "_" + src, make_atom("derhasDispensation", {var("s"), var("a")}),
                                            {pos(make_atom(src, {var("t"), var("a")})), pos(h)}));
    }
    return out;
}

Policy derive_authorizations(const Policy& p) {
    Policy out = p;
    Atom mustdo = make_atom("mustdo", {var("s"), var("a"), var("q")});
    auto plus = [](const std::string& a) { return Term::signed_term('+', Term::constant(a)); };
    add_template(out, template_rule("auth_execute", make_atom("cando", {var("a"), var("s"), plus("execute")}), {pos(mustdo)}));
    add_template(out, template_rule("auth_modify", make_atom("cando", {var("r"), var("s"), plus("modify")}),
                                    {pos(mustdo), pos(make_atom("resource", {var("a"), var("r")}))}));
    add_template(out, template_rule("auth_read", make_atom("cando", {var("i"), var("s"), plus("read")}),
                                    {pos(mustdo), pos(make_atom("instrument", {var("a"), var("i")}))}));
    for (char sign : {'+', '-'})
        for (const char* src : {"cando", "dercando"}) {
            Term act = Term::signed_term(sign, var("x"));
            add_template(out, template_rule(std::string("decide_") + src + (sign == '+' ? "_grant" : "_deny"),
                                            make_atom("do", {var("o"), var("s"), act}),
                                            {pos(make_atom(src, {var("o"), var("s"), act}))}));
        }
    return out;
}

Policy install_conflict_resolution(const Policy& p, ConflictMode mode) {
    if (mode == ConflictMode::Custom) return p;
    Policy out = p;
    add_template(out, template_rule("default_mustdo", make_atom("mustdo", {var("s"), var("a"), var("q")}),
                                    {pos(make_atom("derhasObligation", {var("s"), var("a"), var("q")})),
                                     neg(make_atom("derhasDispensation", {var("s"), var("a")}))}));
    return out;
}

namespace {

using ChoiceKey = std::tuple<std::string, std::string, std::string>;
using Forced = std::map<ChoiceKey, std::string>;

struct Alt {
    std::vector<Rule> rules;
    std::vector<ChoiceEntry> log;
};

std::vector<Alt> product(const std::vector<Alt>& a, const std::vector<Alt>& b) {
    std::vector<Alt> out;
    for (const auto& x : a)
        for (const auto& y : b) {
            Alt z = x;
            z.rules.insert(z.rules.end(), y.rules.begin(), y.rules.end());
            z.log.insert(z.log.end(), y.log.begin(), y.log.end());
            out.push_back(std::move(z));
        }
    return out;
}

struct Ctx {
    Term s;
    Term q;
    Dnf bodies;  // alternatives for the body of the next emitted obligation
    Dnf root;    // source of chained obligations: the hasObligation head or the original body
    Dnf extra;   // guards collected on the way down
    std::string pattern_id;
    std::string path;
};

class Refiner {
public:
    Refiner(const PatternSet& ps, const Ontology& onto, const Forced* forced, std::vector<std::string>& warnings)
        : ps_(ps), onto_(onto), forced_(forced), warnings_(warnings) {}

    std::vector<Alt> refine_rule(const Rule& r) {
        rule_ = &r;
        used_.clear();
        const Term& act = r.head.args[1];
        Ctx ctx{r.head.args[0], r.head.args[2], {r.body}, {}, kTrue, "", ""};
        ctx.root = r.kind() == PredicateKind::HasObligation ? Dnf{Conj{pos(r.head)}} : ctx.bodies;
        auto alts = emit(ctx, Composition::atomic(act), {act});
        for (auto& alt : alts)
            for (std::size_t i = 0; i < alt.rules.size(); ++i) {
                alt.rules[i].id = r.id + "_" + std::to_string(i + 1);
                canonicalize(alt.rules[i]);
            }
        return alts;
    }

    bool refinable(const Rule& r) const {
        auto k = r.kind();
        if (k != PredicateKind::HasObligation && k != PredicateKind::DerhasObligation) return false;
        if (r.head.args.size() != 3) return false;
        return !matching(r.head.args[1]).empty();
    }

    const std::set<std::string>& used_patterns() const { return used_; }

private:
    std::vector<std::pair<const RefinementPattern*, Substitution>> matching(const Term& act) const {
        std::vector<std::pair<const RefinementPattern*, Substitution>> out;
        if (!act.is_action()) return out;
        for (const RefinementPattern* p : ps_.for_root(act.name())) {
            Substitution s;
            if (match(p->root, act, s)) out.emplace_back(p, std::move(s));
        }
        return out;
    }

    void pick(const Ctx& ctx, std::vector<std::string> options, std::vector<std::string>& chosen) {
        if (forced_) {
            auto it = forced_->find({rule_->id, ctx.pattern_id, ctx.path});
            if (it == forced_->end())
                throw PatternError("replay log has no entry for rule " + rule_->id + " at " +
                                   (ctx.path.empty() ? "/" : ctx.path));
            if (std::find(options.begin(), options.end(), it->second) == options.end())
                throw PatternError("replay log names unknown branch " + it->second + " for rule " + rule_->id);
            chosen = {it->second};
        } else {
            chosen = std::move(options);
        }
    }

    ChoiceEntry entry(const Ctx& ctx, const std::string& branch) const {
        return ChoiceEntry{rule_->id, ctx.pattern_id, ctx.path, branch};
    }

    Atom done_atom(const Term& s, const Term& act) {
        Term o = var("_g" + std::to_string(++fresh_));
        Term t = var("_g" + std::to_string(++fresh_));
        return make_atom("done", {s, o, act, t});
    }

    Dnf guard_dnf(const StateSpace& g, const std::vector<Term>& context) {
        return space_literals(g, context, onto_);
    }

    // Done literals that hold once c has been carried out.
    Dnf completion(const Composition& c, const Term& s, const std::vector<Term>& context) {
        if (c.is_empty()) return kTrue;
        if (c.is_atomic()) {
            auto pats = matching(c.action);
            if (pats.empty()) return Dnf{Conj{pos(done_atom(s, c.action))}};
            Dnf out;
            for (const auto& [p, sub] : pats) {
                Composition body = substitute(p->body, sub);
                out = dnf_or(out, completion(body, s, leaves(body)));
            }
            return out;
        }
        Dnf l = completion(c.left(), s, context);
        Dnf r = completion(c.right(), s, context);
        if (c.guard) {
            Dnf skip = dnf_not(guard_dnf(*c.guard, context));
            if (c.guard_side == GuardSide::Left) l = dnf_or(l, skip);
            else r = dnf_or(r, skip);
        }
        switch (c.op) {
        case Operator::Sequence:
            return r;
        case Operator::Choice:
            return dnf_or(l, r);
        case Operator::Conjunction:
            return dnf_and(l, r);
        }
        return r;
    }

    std::vector<Alt> emit(const Ctx& ctx, const Composition& c, const std::vector<Term>& context) {
        if (c.is_empty()) return {Alt{}};
        if (c.is_atomic()) return emit_atomic(ctx, c.action);
        Ctx lc = ctx, rc = ctx;
        lc.path = ctx.path + ".L";
        rc.path = ctx.path + ".R";
        std::optional<Dnf> lg, rg;
        if (c.guard) (c.guard_side == GuardSide::Left ? lg : rg) = guard_dnf(*c.guard, context);
        if (c.op == Operator::Sequence) return emit_seq(ctx, c.left(), lc, lg, c.right(), rc, rg, context);
        if (c.op == Operator::Choice) {
            std::vector<std::string> chosen;
            pick(ctx, {"1", "2"}, chosen);
            std::vector<Alt> out;
            for (const auto& b : chosen) {
                bool first = b == "1";
                Ctx bc = first ? lc : rc;
                Dnf other = dnf_not(completion(first ? c.right() : c.left(), ctx.s, context));
                bc.bodies = dnf_and(bc.bodies, other);
                bc.extra = dnf_and(bc.extra, other);
                const auto& g = first ? lg : rg;
                if (g) {
                    bc.bodies = dnf_and(bc.bodies, *g);
                    bc.extra = dnf_and(bc.extra, *g);
                }
                for (auto alt : emit(bc, first ? c.left() : c.right(), context)) {
                    alt.log.insert(alt.log.begin(), entry(ctx, b));
                    out.push_back(std::move(alt));
                }
            }
            return out;
        }
        std::vector<std::string> chosen;
        pick(ctx, {"12", "21"}, chosen);
        std::vector<Alt> out;
        for (const auto& b : chosen) {
            auto alts = b == "12" ? emit_seq(ctx, c.left(), lc, lg, c.right(), rc, rg, context)
                                  : emit_seq(ctx, c.right(), rc, rg, c.left(), lc, lg, context);
            for (auto& alt : alts) {
                alt.log.insert(alt.log.begin(), entry(ctx, b));
                out.push_back(std::move(alt));
            }
        }
        return out;
    }

    std::vector<Alt> emit_seq(const Ctx& ctx, const Composition& l, Ctx lc, const std::optional<Dnf>& lg,
                              const Composition& r, Ctx rc, const std::optional<Dnf>& rg,
                              const std::vector<Term>& context) {
        StateSpace mid = space_meet(final_space(l, onto_), init_space(r, onto_), onto_);
        Formula q1 = compile_space(mid, context, onto_);
        if (q1.kind == Formula::Kind::False)
            warnings_.push_back("rule " + rule_->id + ": no state satisfies both the end of " + l.str() +
                                " and the start of " + r.str());
        lc.q = Term::formula(q1);
        if (lg) {
            lc.bodies = dnf_and(lc.bodies, *lg);
            lc.extra = dnf_and(lc.extra, *lg);
        }
        Dnf after = completion(l, ctx.s, context);
        if (lg) after = dnf_or(after, dnf_not(*lg));
        rc.bodies = dnf_and(dnf_and(after, ctx.root), ctx.extra);
        if (rg) {
            rc.bodies = dnf_and(rc.bodies, *rg);
            rc.extra = dnf_and(rc.extra, *rg);
        }
        return product(emit(lc, l, context), emit(rc, r, context));
    }

    std::vector<Alt> emit_atomic(const Ctx& ctx, const Term& act) {
        auto pats = matching(act);
        if (pats.empty()) {
            Alt alt;
            for (const auto& body : ctx.bodies)
                alt.rules.push_back(Rule{"", make_atom("derhasObligation", {ctx.s, act, ctx.q}), body, 0});
            return {alt};
        }
        std::vector<std::string> ids;
        for (const auto& pm : pats) ids.push_back(pm.first->id);
        std::vector<std::string> chosen = ids;
        if (pats.size() > 1) pick(ctx, ids, chosen);
        std::vector<Alt> out;
        for (const auto& [p, sub] : pats) {
            if (std::find(chosen.begin(), chosen.end(), p->id) == chosen.end()) continue;
            used_.insert(p->id);
            Ctx pc = ctx;
            pc.pattern_id = p->id;
            pc.path = ctx.path + "/" + p->id;
            Composition body = substitute(p->body, sub);
            std::vector<Term> context = leaves(body);
            context.insert(context.begin(), act);
            for (auto alt : emit(pc, body, context)) {
                if (pats.size() > 1) alt.log.insert(alt.log.begin(), entry(ctx, p->id));
                out.push_back(std::move(alt));
            }
        }
        return out;
    }

    // Generated done variables are renumbered per rule.
    static void canonicalize(Rule& r) {
        Substitution s;
        int n = 0;
        for (const auto& l : r.body)
            for (const auto& t : l.atom.args) {
                std::set<std::string> vs;
                collect_variables(t, vs);
                for (const auto& v : vs) {
                    if (v.rfind("_g", 0) != 0 || s.count(v)) continue;
                    s[v] = var((n % 2 == 0 ? "_o" : "_t") + std::to_string(n / 2 + 1));
                    ++n;
                }
            }
        for (auto& l : r.body) l.atom = polcheck::substitute(l.atom, s);
    }

    const PatternSet& ps_;
    const Ontology& onto_;
    const Forced* forced_;
    std::vector<std::string>& warnings_;
    const Rule* rule_ = nullptr;
    int fresh_ = 0;
    std::set<std::string> used_;
};

Policy install_templates(Policy p, const Ontology& onto, const RefineOptions& opts) {
    add_template(p, template_rule("disp_lift", make_atom("derhasDispensation", {var("s"), var("a")}),
                                  {pos(make_atom("hasDispensation", {var("s"), var("a")}))}));
    p = propagate_hierarchy(p, onto);
    p = install_conflict_resolution(p, opts.conflict);
    return derive_authorizations(p);
}

Rule lift(const Rule& r) {
    Rule out = r;
    out.id = r.id + "_lift";
    out.head.predicate = "derhasObligation";
    out.line = 0;
    return out;
}

struct Plan {
    std::vector<const Rule*> rules;                // policy order
    std::map<const Rule*, std::vector<Alt>> alts;  // refinable rules only
};

Policy assemble(const Policy& p, const Plan& plan, const std::map<const Rule*, const Alt*>& pick,
                const Ontology& onto, const RefineOptions& opts) {
    Policy out;
    out.scope = p.scope;
    out.environment = p.environment;
    for (const Rule* r : plan.rules) {
        auto it = pick.find(r);
        if (it == pick.end()) {
            out.rules.push_back(*r);
            if (r->kind() == PredicateKind::HasObligation) out.rules.push_back(lift(*r));
            continue;
        }
        if (r->kind() == PredicateKind::HasObligation) out.rules.push_back(*r);
        for (const auto& e : it->second->rules) out.rules.push_back(e);
    }
    for (auto& r : out.rules) r.line = 0;
    return install_templates(std::move(out), onto, opts);
}

}  // namespace

RefinementResult enumerate_refinements(const Policy& p, const PatternSet& patterns, const Ontology& onto,
                                       const RefineOptions& opts) {
    RefinementResult result;
    Refiner refiner(patterns, onto, nullptr, result.warnings);
    Plan plan;
    std::vector<const Rule*> refinable;
    std::size_t total = 1;
    std::set<std::string> multiplying;
    for (const auto& r : p.rules) {
        plan.rules.push_back(&r);
        if (!refiner.refinable(r)) continue;
        auto alts = refiner.refine_rule(r);
        if (alts.size() > 1) multiplying.insert(refiner.used_patterns().begin(), refiner.used_patterns().end());
        total *= alts.size();
        if (total > opts.max_branches) {
            std::string names;
            for (const auto& n : multiplying) names += (names.empty() ? "" : ", ") + n;
            throw BranchLimitError("refinement exceeds " + std::to_string(opts.max_branches) +
                                   " branches; multiplying patterns: " + names);
        }
        plan.alts[&r] = std::move(alts);
        refinable.push_back(&r);
    }
    std::vector<std::size_t> odo(refinable.size(), 0);
    while (true) {
        std::map<const Rule*, const Alt*> pick;
        RefinementBranch b;
        for (std::size_t i = 0; i < refinable.size(); ++i) {
            const Alt& a = plan.alts[refinable[i]][odo[i]];
            pick[refinable[i]] = &a;
            b.choice_log.insert(b.choice_log.end(), a.log.begin(), a.log.end());
        }
        b.policy = assemble(p, plan, pick, onto, opts);
        result.branches.push_back(std::move(b));
        std::size_t i = refinable.size();
        while (i > 0) {
            --i;
            if (++odo[i] < plan.alts[refinable[i]].size()) break;
            odo[i] = 0;
            if (i == 0) return result;
        }
        if (refinable.empty()) return result;
    }
}

RefinementBranch replay(const Policy& p, const PatternSet& patterns, const Ontology& onto,
                        const std::vector<ChoiceEntry>& log, const RefineOptions& opts) {
    Forced forced;
    for (const auto& e : log) forced[{e.rule_id, e.pattern_id, e.node}] = e.branch;
    std::vector<std::string> warnings;
    Refiner refiner(patterns, onto, &forced, warnings);
    Plan plan;
    std::map<const Rule*, const Alt*> pick;
    RefinementBranch b;
    for (const auto& r : p.rules) {
        plan.rules.push_back(&r);
        if (!refiner.refinable(r)) continue;
        auto alts = refiner.refine_rule(r);
        if (alts.size() != 1) throw PatternError("replay log does not determine a branch for rule " + r.id);
        plan.alts[&r] = std::move(alts);
        pick[&r] = &plan.alts[&r].front();
        b.choice_log.insert(b.choice_log.end(), pick[&r]->log.begin(), pick[&r]->log.end());
    }
    if (b.choice_log != log) throw PatternError("replay log contains entries that match no choice");
    b.policy = assemble(p, plan, pick, onto, opts);
    return b;
}

}  // namespace polcheck
