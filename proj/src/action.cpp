#include "polcheck/action.hpp"

#include <algorithm>
#include <functional>

#include "polcheck/error.hpp"

namespace polcheck {

Composition Composition::atomic(Term action) {
    Composition c;
    c.kind = Kind::Atomic;
    c.action = std::move(action);
    return c;
}

Composition Composition::empty() { return Composition{}; }

Composition Composition::make(Operator op, Composition left, Composition right, bool strict) {
    Composition c;
    c.kind = Kind::Op;
    c.op = op;
    c.strict = strict;
    c.children.push_back(std::move(left));
    c.children.push_back(std::move(right));
    return c;
}

Composition Composition::guarded(Operator op, Composition left, Composition right, StateSpace guard, GuardSide side,
                                 bool strict) {
    Composition c = make(op, std::move(left), std::move(right), strict);
    c.guard = std::move(guard);
    c.guard_side = side;
    return c;
}

std::size_t Composition::depth() const {
    if (!is_op()) return 0;
    return 1 + std::max(left().depth(), right().depth());
}

std::size_t Composition::leaf_count() const {
    if (!is_op()) return 1;
    return left().leaf_count() + right().leaf_count();
}

namespace {

std::string action_ref_str(const Term& t) {
    if (!t.is_action() || t.bindings().empty()) return t.name();
    std::string out = t.name() + "(";
    for (std::size_t i = 0; i < t.bindings().size(); ++i) {
        if (i) out += ", ";
        out += t.bindings()[i].property + ":" + t.bindings()[i].value.str();
    }
    return out + ")";
}

std::string guard_str(const StateSpace& g) {
    if (g.is_concise()) {
        std::string out = "[";
        bool first = true;
        for (const auto& [k, v] : g.parts.front()) {
            if (!first) out += ", ";
            first = false;
            out += k + "=" + v;
        }
        return out + "] ";
    }
    return "[" + g.str() + "] ";
}

std::string op_str(Operator op, bool strict) {
    std::string s = op == Operator::Sequence ? ";" : op == Operator::Choice ? "\\/" : "/\\";
    return strict ? s + "_s" : s;
}

}  // namespace

std::string Composition::str() const {
    std::string out;
    switch (kind) {
    case Kind::Empty: out = "empty"; break;
    case Kind::Atomic: out = action_ref_str(action); break;
    case Kind::Op: {
        std::string l = left().str(), r = right().str();
        if (guard) (guard_side == GuardSide::Left ? l : r) = guard_str(*guard) + (guard_side == GuardSide::Left ? l : r);
        out = "(" + l + " " + op_str(op, strict) + " " + r + ")";
        break;
    }
    }
    if (label) {
        if (!is_op()) out = "(" + out + ")";
        out += " as " + *label;
    }
    return out;
}

bool operator==(const Composition& a, const Composition& b) {
    return a.kind == b.kind && a.action == b.action && a.op == b.op && a.strict == b.strict && a.guard == b.guard &&
           (!a.guard || a.guard_side == b.guard_side) && a.label == b.label && a.children == b.children;
}

std::string to_string(CompositionType t) {
    switch (t) {
    case CompositionType::BasicSeq: return "basic-seq";
    case CompositionType::BasicStrictChoice: return "basic-strict-choice";
    case CompositionType::BasicStrictConj: return "basic-strict-conj";
    case CompositionType::BasicFlexChoice: return "basic-flex-choice";
    case CompositionType::BasicFlexConj: return "basic-flex-conj";
    case CompositionType::AdvSeq: return "adv-seq";
    case CompositionType::AdvStrictConj: return "adv-strict-conj";
    case CompositionType::AdvFlexConj: return "adv-flex-conj";
    }
    return {};
}

CompositionType parse_composition_type(std::string_view id) {
    for (int i = 0; i <= static_cast<int>(CompositionType::AdvFlexConj); ++i) {
        auto t = static_cast<CompositionType>(i);
        if (to_string(t) == id) return t;
    }
    throw TaxonomyError("unknown composition type '" + std::string(id) + "'");
}

CompositionType infer_type(const Composition& node) {
    if (!node.is_op()) throw StructureError("'" + node.str() + "' is not an operator node");
    switch (node.op) {
    case Operator::Sequence:
        if (node.strict) throw StructureError("strictness does not apply to sequences: " + node.str());
        if (node.guard && node.guard_side == GuardSide::Left)
            throw StructureError("a sequence guard must be on the second operand: " + node.str());
        return node.guard ? CompositionType::AdvSeq : CompositionType::BasicSeq;
    case Operator::Choice:
        if (node.guard) throw StructureError("guards do not apply to choices: " + node.str());
        return node.strict ? CompositionType::BasicStrictChoice : CompositionType::BasicFlexChoice;
    case Operator::Conjunction:
        if (node.guard) return node.strict ? CompositionType::AdvStrictConj : CompositionType::AdvFlexConj;
        return node.strict ? CompositionType::BasicStrictConj : CompositionType::BasicFlexConj;
    }
    throw StructureError("unknown operator");
}

std::string RefinementPattern::str() const {
    return id + ": " + action_ref_str(root) + " := " + body.str() + " type=" + to_string(declared_type);
}

namespace {

void collect_refs(const Composition& c, std::set<std::string>& out) {
    if (c.is_atomic()) out.insert(c.action.name());
    if (c.label) out.insert(*c.label);
    for (const auto& ch : c.children) collect_refs(ch, out);
}

void collect_label_edges(const Composition& c, std::map<std::string, std::set<std::string>>& graph) {
    if (c.label && c.is_op()) {
        std::set<std::string> inner;
        for (const auto& ch : c.children) collect_refs(ch, inner);
        graph[*c.label].insert(inner.begin(), inner.end());
    }
    for (const auto& ch : c.children) collect_label_edges(ch, graph);
}

}  // namespace

PatternSet::PatternSet(std::vector<RefinementPattern> patterns) : patterns_(std::move(patterns)) {
    std::set<std::string> ids;
    std::map<std::string, std::set<std::string>> graph;
    for (const auto& p : patterns_) {
        if (!ids.insert(p.id).second) throw PatternError("duplicate pattern id '" + p.id + "'");
        collect_refs(p.body, graph[p.root_name()]);
        collect_label_edges(p.body, graph);
    }
    std::map<std::string, int> color;
    std::vector<std::string> path;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        color[n] = 1;
        path.push_back(n);
        for (const auto& m : graph[n]) {
            if (color[m] == 1) {
                std::string cycle;
                for (auto it = std::find(path.begin(), path.end(), m); it != path.end(); ++it) cycle += *it + " -> ";
                throw PatternError("pattern cycle: " + cycle + m);
            }
            if (color[m] == 0) visit(m);
        }
        path.pop_back();
        color[n] = 2;
    };
    for (const auto& p : patterns_)
        if (color[p.root_name()] == 0) visit(p.root_name());
}

std::vector<const RefinementPattern*> PatternSet::for_root(std::string_view action) const {
    std::vector<const RefinementPattern*> out;
    for (const auto& p : patterns_)
        if (p.root_name() == action) out.push_back(&p);
    return out;
}

const RefinementPattern* PatternSet::find(std::string_view id) const {
    for (const auto& p : patterns_)
        if (p.id == id) return &p;
    return nullptr;
}

std::string trace_str(const Trace& t) {
    std::string out = "[";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ", ";
        out += action_ref_str(t[i]);
    }
    return out + "]";
}

namespace {

// Alternatives of a conjunction chain as lists of operands. Choices directly under a conjunction are
// distributed first; a guarded operand may also be left out.
using Blocks = std::vector<const Composition*>;

std::vector<Blocks> conj_alternatives(const Composition& c) {
    if (c.is_op() && c.op == Operator::Choice) {
        auto l = conj_alternatives(c.left());
        auto r = conj_alternatives(c.right());
        l.insert(l.end(), r.begin(), r.end());
        return l;
    }
    if (!c.is_op() || c.op != Operator::Conjunction) return {Blocks{&c}};
    std::vector<Blocks> sides[2];
    for (std::size_t i = 0; i < 2; ++i) {
        sides[i] = conj_alternatives(c.children[i]);
        if (c.guard && (c.guard_side == GuardSide::Left) == (i == 0)) sides[i].push_back(Blocks{});
    }
    std::vector<Blocks> out;
    for (const auto& l : sides[0])
        for (const auto& r : sides[1]) {
            Blocks b = l;
            b.insert(b.end(), r.begin(), r.end());
            out.push_back(std::move(b));
        }
    return out;
}

Composition seq_normal(const Composition& l, const Composition& r) {
    if (l.is_op() && l.op == Operator::Choice)
        return Composition::make(Operator::Choice, seq_normal(l.left(), r), seq_normal(l.right(), r));
    if (r.is_op() && r.op == Operator::Choice)
        return Composition::make(Operator::Choice, seq_normal(l, r.left()), seq_normal(l, r.right()));
    if (l.is_empty()) return r;
    if (r.is_empty()) return l;
    return Composition::make(Operator::Sequence, l, r);
}

Composition rewrite(const Composition& c);

Composition rewrite(const Composition& c) {
    if (!c.is_op()) {
        Composition leaf = c;
        leaf.label.reset();
        return leaf;
    }
    if (c.op == Operator::Conjunction) {
        std::optional<Composition> acc;
        for (const auto& blocks : conj_alternatives(c)) {
            std::vector<Composition> ops;
            for (const auto* b : blocks) ops.push_back(rewrite(*b));
            std::vector<std::size_t> order(ops.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            do {
                Composition s = Composition::empty();
                for (std::size_t i : order) s = seq_normal(s, ops[i]);
                acc = acc ? Composition::make(Operator::Choice, *acc, s) : s;
            } while (std::next_permutation(order.begin(), order.end()));
        }
        return *acc;
    }
    Composition l = rewrite(c.left());
    Composition r = rewrite(c.right());
    if (c.guard) {
        Composition& g = c.guard_side == GuardSide::Left ? l : r;
        g = Composition::make(Operator::Choice, g, Composition::empty());
    }
    if (c.op == Operator::Choice) return Composition::make(Operator::Choice, l, r);
    return seq_normal(l, r);
}

void flatten(const Composition& c, Operator op, std::vector<Composition>& out) {
    if (c.is_op() && c.op == op) {
        flatten(c.left(), op, out);
        flatten(c.right(), op, out);
    } else {
        out.push_back(c);
    }
}

Composition fold(const std::vector<Composition>& items, Operator op) {
    Composition acc = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) acc = Composition::make(op, acc, items[i]);
    return acc;
}

}  // namespace

Composition normalize(const Composition& c) {
    std::vector<Composition> alternatives;
    flatten(rewrite(c), Operator::Choice, alternatives);
    std::vector<Composition> unique;
    for (const auto& alt : alternatives) {
        std::vector<Composition> steps;
        flatten(alt, Operator::Sequence, steps);
        Composition s = fold(steps, Operator::Sequence);
        if (std::find(unique.begin(), unique.end(), s) == unique.end()) unique.push_back(std::move(s));
    }
    return fold(unique, Operator::Choice);
}

namespace {

void concat_into(const std::set<Trace>& a, const std::set<Trace>& b, std::set<Trace>& out) {
    for (const auto& x : a)
        for (const auto& y : b) {
            Trace t = x;
            t.insert(t.end(), y.begin(), y.end());
            out.insert(std::move(t));
        }
}

}  // namespace

std::set<Trace> traces(const Composition& c) {
    switch (c.kind) {
    case Composition::Kind::Empty: return {Trace{}};
    case Composition::Kind::Atomic: return {Trace{c.action}};
    case Composition::Kind::Op: break;
    }
    std::set<Trace> out;
    if (c.op == Operator::Conjunction) {
        // A chain of conjunctions performs every operand once, in any order.
        for (const auto& blocks : conj_alternatives(c)) {
            std::vector<std::set<Trace>> ops;
            for (const auto* b : blocks) ops.push_back(traces(*b));
            std::vector<std::size_t> order(ops.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            do {
                std::set<Trace> acc{Trace{}};
                for (std::size_t i : order) {
                    std::set<Trace> next;
                    concat_into(acc, ops[i], next);
                    acc = std::move(next);
                }
                out.insert(acc.begin(), acc.end());
            } while (std::next_permutation(order.begin(), order.end()));
        }
        return out;
    }
    std::set<Trace> l = traces(c.left());
    std::set<Trace> r = traces(c.right());
    if (c.guard) (c.guard_side == GuardSide::Left ? l : r).insert(Trace{});
    if (c.op == Operator::Sequence) {
        concat_into(l, r, out);
    } else {
        out = std::move(l);
        out.insert(r.begin(), r.end());
    }
    return out;
}

TraceResult apply_trace(const Trace& t, const State& start, const Ontology& onto) {
    TraceResult res;
    res.state = start;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const ActionClassDef* a = onto.action(t[i].name());
        if (!a) throw NameError("unknown action '" + t[i].name() + "'");
        if (!space_refines_state(a->init, res.state, onto)) {
            res.feasible = false;
            res.failed_step = i + 1;
            return res;
        }
        res.state = apply_transformer(*a, res.state, onto);
    }
    return res;
}

std::string Violation::str() const {
    std::string out = node + ": " + constraint;
    if (witness) out += " at " + witness->str();
    return out;
}

std::set<std::string> Verdict::constraint_ids() const {
    std::set<std::string> out;
    for (const auto& v : violations) out.insert(v.constraint);
    return out;
}

}  // namespace polcheck
