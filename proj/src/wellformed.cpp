#include <functional>

#include "polcheck/action.hpp"
#include "polcheck/error.hpp"

namespace polcheck {

namespace {

const ActionClassDef& empty_action() {
    static const ActionClassDef e = [] {
        ActionClassDef a;
        a.name = "empty";
        return a;
    }();
    return e;
}

std::string operand_name(const Composition& c) {
    if (c.label) return *c.label;
    if (c.is_atomic()) return c.action.name();
    return {};
}

const ActionClassDef& operand_action(const Composition& c, const Ontology& onto) {
    if (c.is_empty() && !c.label) return empty_action();
    std::string name = operand_name(c);
    if (name.empty()) throw StructureError("operand '" + c.str() + "' is neither atomic nor labeled");
    const ActionClassDef* a = onto.action(name);
    if (!a) throw NameError("unknown action '" + name + "'");
    return *a;
}

// Operands and guard of a top-level node, with the guarded operand second.
struct Shape {
    CompositionType type;
    const ActionClassDef* a = nullptr;
    const ActionClassDef* a1 = nullptr;
    const ActionClassDef* a2 = nullptr;
    StateSpace guard = StateSpace::everything();
    std::string node;
};

Shape shape_of(const RefinementPattern& p, const Ontology& onto) {
    if (!p.body.is_op()) throw StructureError("pattern " + p.id + " body is not a composition");
    CompositionType inferred = infer_type(p.body);
    if (inferred != p.declared_type)
        throw TaxonomyError("pattern " + p.id + " is declared " + to_string(p.declared_type) + " but its body is " +
                            to_string(inferred));
    Shape s;
    s.type = p.declared_type;
    s.a = onto.action(p.root_name());
    if (!s.a) throw NameError("unknown action '" + p.root_name() + "'");
    s.a1 = &operand_action(p.body.left(), onto);
    s.a2 = &operand_action(p.body.right(), onto);
    if (p.body.guard) {
        s.guard = *p.body.guard;
        if (p.body.guard_side == GuardSide::Left) std::swap(s.a1, s.a2);
    }
    s.node = p.root_name();
    return s;
}

class Recorder {
public:
    Recorder(Verdict& v, std::string node) : v_(v), node_(std::move(node)) {}

    void fail(const std::string& id, std::optional<State> witness = std::nullopt) {
        if (!seen_.insert(id).second) return;
        v_.violations.push_back({id, std::move(witness), node_});
    }

private:
    Verdict& v_;
    std::string node_;
    std::set<std::string> seen_;
};

std::optional<State> app(const ActionClassDef& a, const std::optional<State>& d, const Ontology& onto) {
    if (!d || !space_refines_state(a.init, *d, onto)) return std::nullopt;
    return apply_transformer(a, *d, onto);
}

bool in(const StateSpace& s, const std::optional<State>& d, const Ontology& onto) {
    return d && space_refines_state(s, *d, onto);
}

std::optional<State> refinement_witness(const StateSpace& abstract, const StateSpace& concrete, const Ontology& onto) {
    for (const auto& d : expand_space(concrete, onto))
        if (!space_refines_state(abstract, d, onto)) return d;
    return std::nullopt;
}

}  // namespace

Verdict check_well_formed(const RefinementPattern& p, const Ontology& onto) {
    Shape s = shape_of(p, onto);
    Verdict v;
    Recorder r(v, s.node);
    const ActionClassDef &a = *s.a, &a1 = *s.a1, &a2 = *s.a2;
    const StateSpace& D = a.init;
    const StateSpace& G = a.final_space;
    const StateSpace& Dp = s.guard;

    auto require = [&](const StateSpace& abs, const StateSpace& con, const std::string& id) {
        if (!space_refines(abs, con, onto)) r.fail(id, refinement_witness(abs, con, onto));
    };
    auto nonempty = [&](const StateSpace& x, const std::string& id) {
        if (expand_space(x, onto).empty()) r.fail(id);
    };

    switch (s.type) {
    case CompositionType::BasicSeq:
        require(a1.init, D, "Δ1⊑Δ");
        require(a2.init, a1.final_space, "Δ2⊑Γ1");
        require(G, a2.final_space, "Γ⊑Γ2");
        return v;
    case CompositionType::BasicStrictChoice:
        require(space_meet(a1.init, a2.init, onto), D, "Δ1⊓Δ2⊑Δ");
        require(G, a1.final_space, "Γ⊑Γ1");
        require(G, a2.final_space, "Γ⊑Γ2");
        return v;
    case CompositionType::BasicFlexChoice:
        require(space_join(a1.init, a2.init, onto), D, "Δ1⊔Δ2⊑Δ");
        nonempty(space_meet(a1.init, D, onto), "Δ1⊓Δ≠∅");
        nonempty(space_meet(a2.init, D, onto), "Δ2⊓Δ≠∅");
        require(G, a1.final_space, "Γ⊑Γ1");
        require(G, a2.final_space, "Γ⊑Γ2");
        return v;
    case CompositionType::BasicStrictConj:
        require(a1.init, D, "Δ1⊑Δ");
        require(a2.init, D, "Δ2⊑Δ");
        break;
    case CompositionType::BasicFlexConj:
        require(space_join(a1.init, a2.init, onto), D, "Δ1⊔Δ2⊑Δ");
        break;
    case CompositionType::AdvSeq:
        require(a1.init, D, "Δ1⊑Δ");
        break;
    case CompositionType::AdvStrictConj:
        require(a1.init, D, "Δ1⊑Δ");
        nonempty(space_meet(D, Dp, onto), "Δ⊓Δ′≠∅");
        break;
    case CompositionType::AdvFlexConj:
        require(space_join(a1.init, Dp, onto), D, "Δ1⊔Δ′⊑Δ");
        break;
    }

    const StateSpace guard_meet = space_meet(D, Dp, onto);
    for (const auto& start : cone(D, onto)) {
        std::optional<State> d = start;
        auto x1 = app(a1, d, onto);
        auto x2 = app(a2, d, onto);
        auto x12 = app(a2, x1, onto);
        auto x21 = app(a1, x2, onto);
        switch (s.type) {
        case CompositionType::BasicStrictConj:
            if (!in(G, x21, onto)) r.fail("Γ⊑a1(a2(δ))", start);
            if (!in(G, x12, onto)) r.fail("Γ⊑a2(a1(δ))", start);
            break;
        case CompositionType::BasicFlexConj:
            if (in(a1.init, d, onto)) {
                if (!in(a2.init, x1, onto)) r.fail("Δ1⊑δ⇒Δ2⊑a1(δ)", start);
                if (!in(G, x12, onto)) r.fail("Δ1⊑δ⇒Γ⊑a2(a1(δ))", start);
            }
            if (in(a2.init, d, onto)) {
                if (!in(a1.init, x2, onto)) r.fail("Δ2⊑δ⇒Δ1⊑a2(δ)", start);
                if (!in(G, x21, onto)) r.fail("Δ2⊑δ⇒Γ⊑a1(a2(δ))", start);
            }
            break;
        case CompositionType::AdvSeq:
            if (!x1) break;
            if (in(Dp, x1, onto)) {
                if (!in(G, x12, onto)) r.fail("Δ′⊑a1(δ)⇒Γ⊑a2(a1(δ))", start);
            } else if (!in(G, x1, onto)) {
                r.fail("Δ′⋢a1(δ)⇒Γ⊑a1(δ)", start);
            }
            break;
        case CompositionType::AdvStrictConj:
            if (!in(guard_meet, d, onto)) {
                if (!in(G, x1, onto)) r.fail("Δ⊓Δ′⋢δ⇒Γ⊑a1(δ)", start);
            } else {
                if (!in(a1.init, d, onto)) r.fail("Δ⊓Δ′⊑δ⇒Δ1⊑δ", start);
                if (!in(Dp, x1, onto)) r.fail("Δ⊓Δ′⊑δ⇒Δ′⊑a1(δ)", start);
                if (!in(G, x12, onto)) r.fail("Δ⊓Δ′⊑δ⇒Γ⊑a2(a1(δ))", start);
                if (!in(a1.init, x2, onto)) r.fail("Δ⊓Δ′⊑δ⇒Δ1⊑a2(δ)", start);
                if (!in(G, x21, onto)) r.fail("Δ⊓Δ′⊑δ⇒Γ⊑a1(a2(δ))", start);
            }
            break;
        case CompositionType::AdvFlexConj:
            if (in(a1.init, d, onto) && in(Dp, x1, onto) && !in(G, x12, onto))
                r.fail("Δ1⊑δ∧Δ′⊑a1(δ)⇒Γ⊑a2(a1(δ))", start);
            if (in(a1.init, d, onto) && !in(Dp, d, onto) && !in(Dp, x1, onto) && !in(G, x1, onto))
                r.fail("Δ1⊑δ∧Δ′⋢δ∧Δ′⋢a1(δ)⇒Γ⊑a1(δ)", start);
            if (in(Dp, d, onto) && in(a1.init, x2, onto) && !in(G, x21, onto))
                r.fail("Δ′⊑δ∧Δ1⊑a2(δ)⇒Γ⊑a1(a2(δ))", start);
            break;
        default: break;
        }
    }
    return v;
}

Verdict check_well_formed_complex(const RefinementPattern& p, const Ontology& onto) {
    Verdict out;
    std::function<void(const RefinementPattern&, const std::string&)> visit = [&](const RefinementPattern& sub,
                                                                                  const std::string& path) {
        bool operands_ok = true;
        for (const auto& child : sub.body.children) {
            if (!child.is_op()) continue;
            if (!child.label) {
                out.violations.push_back({"unlabeled-node", std::nullopt, path + "/" + child.str()});
                operands_ok = false;
                continue;
            }
            RefinementPattern inner;
            inner.id = sub.id + "/" + *child.label;
            inner.root = Term::constant(*child.label);
            inner.body = child;
            inner.body.label.reset();
            inner.declared_type = infer_type(inner.body);
            visit(inner, path + "/" + *child.label);
        }
        if (!operands_ok) return;
        Verdict v = check_well_formed(sub, onto);
        for (auto& x : v.violations) {
            x.node = path;
            out.violations.push_back(std::move(x));
        }
    };
    visit(p, p.root_name());
    return out;
}

Verdict oracle_well_formed(const RefinementPattern& p, const Ontology& onto, std::size_t bound) {
    Shape s = shape_of(p, onto);
    Verdict v;
    if (onto.universe_size() > std::size_t{1} << 22)
        throw OracleScaleError("state universe of " + std::to_string(onto.universe_size()) + " states is out of scale");
    std::vector<State> starts = cone(s.a->init, onto);
    if (starts.size() > bound)
        throw OracleScaleError("start space has " + std::to_string(starts.size()) + " states, bound is " +
                               std::to_string(bound));
    if (starts.empty()) {
        v.warnings.push_back("pattern " + p.id + ": empty start space, vacuously well-formed");
        return v;
    }
    Recorder r(v, s.node);
    auto ref = [](const ActionClassDef& a) { return &a == &empty_action() ? Trace{} : Trace{Term::constant(a.name)}; };
    Trace t1 = ref(*s.a1), t2 = ref(*s.a2);
    Trace t12 = t1, t21 = t2;
    t12.insert(t12.end(), t2.begin(), t2.end());
    t21.insert(t21.end(), t1.begin(), t1.end());
    const StateSpace& G = s.a->final_space;
    const StateSpace& Dp = s.guard;
    auto ends_in_goal = [&](const TraceResult& res) { return res.feasible && space_refines_state(G, res.state, onto); };
    auto check_run = [&](const Trace& t, const State& d, const std::string& name) {
        TraceResult res = apply_trace(t, d, onto);
        if (!res.feasible) r.fail("trace " + name + " infeasible", d);
        else if (!space_refines_state(G, res.state, onto)) r.fail("trace " + name + " ends outside Γ", d);
    };
    auto guard_holds = [&](const State& d) { return space_refines_state(Dp, d, onto); };

    bool a1_somewhere = false, a2_somewhere = false;
    const StateSpace guard_meet = space_meet(s.a->init, Dp, onto);
    for (const auto& d : starts) {
        TraceResult r1 = apply_trace(t1, d, onto);
        TraceResult r2 = apply_trace(t2, d, onto);
        a1_somewhere = a1_somewhere || r1.feasible;
        a2_somewhere = a2_somewhere || r2.feasible;
        switch (s.type) {
        case CompositionType::BasicSeq: check_run(t12, d, "a1;a2"); break;
        case CompositionType::BasicStrictChoice:
            check_run(t1, d, "a1");
            check_run(t2, d, "a2");
            break;
        case CompositionType::BasicFlexChoice:
            if (!r1.feasible && !r2.feasible) r.fail("no alternative feasible", d);
            if (r1.feasible && !ends_in_goal(r1)) r.fail("trace a1 ends outside Γ", d);
            if (r2.feasible && !ends_in_goal(r2)) r.fail("trace a2 ends outside Γ", d);
            break;
        case CompositionType::BasicStrictConj:
            check_run(t12, d, "a1;a2");
            check_run(t21, d, "a2;a1");
            break;
        case CompositionType::BasicFlexConj:
            if (!r1.feasible && !r2.feasible) r.fail("no order startable", d);
            if (r1.feasible) check_run(t12, d, "a1;a2");
            if (r2.feasible) check_run(t21, d, "a2;a1");
            break;
        case CompositionType::AdvSeq:
            if (!r1.feasible) r.fail("trace a1 infeasible", d);
            else if (guard_holds(r1.state)) check_run(t12, d, "a1;a2");
            else if (!ends_in_goal(r1)) r.fail("trace a1 ends outside Γ", d);
            break;
        case CompositionType::AdvStrictConj:
            if (!r1.feasible) r.fail("trace a1 infeasible", d);
            if (space_refines_state(guard_meet, d, onto)) {
                check_run(t12, d, "a1;a2");
                check_run(t21, d, "a2;a1");
            } else if (r1.feasible && !ends_in_goal(r1)) {
                r.fail("trace a1 ends outside Γ", d);
            }
            break;
        case CompositionType::AdvFlexConj: {
            bool g = guard_holds(d);
            if (!r1.feasible && !g) r.fail("no order startable", d);
            if (r1.feasible) {
                if (guard_holds(r1.state)) check_run(t12, d, "a1;a2");
                else if (!g && !ends_in_goal(r1)) r.fail("trace a1 ends outside Γ", d);
            }
            if (g && r2.feasible && apply_trace(t1, r2.state, onto).feasible) check_run(t21, d, "a2;a1");
            break;
        }
        }
    }
    if (s.type == CompositionType::BasicFlexChoice) {
        if (!a1_somewhere) r.fail("a1 never applicable");
        if (!a2_somewhere) r.fail("a2 never applicable");
    }
    if (s.type == CompositionType::AdvStrictConj && expand_space(guard_meet, onto).empty()) r.fail("guard unreachable");
    return v;
}

}  // namespace polcheck
