#include "lexer.hpp"
#include "polcheck/action.hpp"
#include "polcheck/error.hpp"
#include "term_parser.hpp"

namespace polcheck {

using detail::TokenKind;
using detail::TokenStream;

namespace {

struct Operand {
    Composition node;
    std::optional<StateSpace> guard;
};

class ExprParser {
public:
    explicit ExprParser(TokenStream& ts) : ts_(ts) {}

    Composition parse() {
        Operand o = choice();
        if (o.guard) fail("a guard needs an operator node");
        return std::move(o.node);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        const auto& t = ts_.peek();
        throw PatternError(std::to_string(t.line) + ":" + std::to_string(t.column) + ": " + msg);
    }

    Operand combine(Operator op, bool strict, Operand l, Operand r) {
        if (l.guard && r.guard) fail("both operands are guarded");
        Composition node = Composition::make(op, std::move(l.node), std::move(r.node), strict);
        if (l.guard || r.guard) {
            if (op == Operator::Choice) fail("guards do not apply to choices");
            node.guard = l.guard ? std::move(l.guard) : std::move(r.guard);
            node.guard_side = l.guard ? GuardSide::Left : GuardSide::Right;
            if (op == Operator::Sequence && node.guard_side == GuardSide::Left)
                fail("a sequence guard must be on the second operand");
        }
        return {std::move(node), std::nullopt};
    }

    Operand choice() {
        Operand acc = seq();
        while (ts_.is_punct("\\/") || ts_.is_punct("\\/_s")) {
            bool strict = ts_.next().text == "\\/_s";
            acc = combine(Operator::Choice, strict, std::move(acc), seq());
        }
        return acc;
    }

    Operand seq() {
        Operand acc = conj();
        while (ts_.accept(";")) acc = combine(Operator::Sequence, false, std::move(acc), conj());
        return acc;
    }

    Operand conj() {
        Operand acc = unary();
        while (ts_.is_punct("/\\") || ts_.is_punct("/\\_s")) {
            bool strict = ts_.next().text == "/\\_s";
            acc = combine(Operator::Conjunction, strict, std::move(acc), unary());
        }
        return acc;
    }

    Operand unary() {
        std::optional<StateSpace> guard;
        if (ts_.accept("[")) {
            guard = StateSpace{};
            if (ts_.is_punct("{")) {
                do guard->parts.push_back(assignment_braced());
                while (ts_.accept("|"));
            } else {
                guard->parts.push_back(assignment_until("]"));
            }
            ts_.expect("]");
        }
        Composition node = primary();
        return {std::move(node), std::move(guard)};
    }

    Assignment assignment_braced() {
        ts_.expect("{");
        Assignment a = ts_.is_punct("}") ? Assignment{} : assignment_until("}");
        ts_.expect("}");
        return a;
    }

    Assignment assignment_until(std::string_view close) {
        Assignment a;
        if (ts_.is_punct(close)) return a;
        do {
            std::string var = ts_.expect_ident("guard variable");
            ts_.expect("=");
            const auto& t = ts_.peek();
            if (t.kind != TokenKind::Ident && t.kind != TokenKind::String) ts_.fail("expected guard value");
            a[var] = ts_.next().text;
        } while (ts_.accept(","));
        return a;
    }

    Composition primary() {
        if (ts_.accept("(")) {
            Operand inner = choice();
            if (inner.guard) fail("a guard needs an operator node");
            ts_.expect(")");
            if (ts_.accept_ident("as")) inner.node.label = ts_.expect_ident("label");
            return std::move(inner.node);
        }
        if (ts_.accept_ident("empty")) return Composition::empty();
        return Composition::atomic(action_ref(ts_));
    }

public:
    static Term action_ref(TokenStream& ts) {
        std::string name = ts.expect_ident("action name");
        std::vector<Binding> bindings;
        if (ts.accept("(")) {
            if (!ts.accept(")")) {
                do {
                    std::string prop = ts.expect_ident("property");
                    ts.expect(":");
                    bindings.push_back({prop, detail::parse_term(ts)});
                } while (ts.accept(","));
                ts.expect(")");
            }
        }
        return Term::action(std::move(name), std::move(bindings));
    }

private:
    TokenStream& ts_;
};

void check_names(const Composition& c, const Ontology& onto) {
    if (c.is_atomic() && !onto.action(c.action.name())) throw NameError("unknown action '" + c.action.name() + "'");
    if (c.label && !onto.action(*c.label)) throw NameError("label '" + *c.label + "' is not a declared action");
    for (const auto& ch : c.children) check_names(ch, onto);
}

void check_node_types(const Composition& c) {
    if (!c.is_op()) return;
    infer_type(c);
    for (const auto& ch : c.children) check_node_types(ch);
}

void body_variables(const Composition& c, std::set<std::string>& out) {
    if (c.is_atomic()) collect_variables(c.action, out);
    for (const auto& ch : c.children) body_variables(ch, out);
}

}  // namespace

PatternSet parse_patterns(std::string_view text, const Ontology* onto) {
    TokenStream ts(detail::tokenize(text));
    std::vector<RefinementPattern> out;
    std::map<std::string, int> per_root;
    while (!ts.at_end()) {
        if (!ts.accept_ident("refine")) ts.fail("expected 'refine'");
        RefinementPattern p;
        if (ts.peek().kind == TokenKind::Ident && ts.is_punct(":", 1)) {
            p.id = ts.next().text;
            ts.next();
        }
        p.root = ExprParser::action_ref(ts);
        ts.expect(":=");
        p.body = ExprParser(ts).parse();
        if (!p.body.is_op()) throw PatternError("pattern for " + p.root_name() + " must refine into a composition");
        try {
            check_node_types(p.body);
        } catch (const StructureError& e) {
            throw PatternError(e.what());
        }
        CompositionType inferred = infer_type(p.body);
        if (ts.accept_ident("type")) {
            ts.expect("=");
            p.declared_type = parse_composition_type(ts.expect_ident("composition type"));
            if (p.declared_type != inferred)
                throw PatternError("pattern for " + p.root_name() + " is declared " + to_string(p.declared_type) +
                                   " but its body is " + to_string(inferred));
        } else {
            p.declared_type = inferred;
        }
        ts.accept(".");
        int k = ++per_root[p.root_name()];
        if (p.id.empty()) p.id = p.root_name() + "." + std::to_string(k);
        std::set<std::string> root_vars, vars;
        collect_variables(p.root, root_vars);
        body_variables(p.body, vars);
        for (const auto& v : vars)
            if (!root_vars.count(v)) throw PatternError("pattern " + p.id + " uses unbound variable $" + v);
        if (onto) {
            if (!onto->action(p.root_name())) throw NameError("unknown action '" + p.root_name() + "'");
            check_names(p.body, *onto);
        }
        out.push_back(std::move(p));
    }
    return PatternSet(std::move(out));
}

}  // namespace polcheck
