#include <algorithm>

#include "lexer.hpp"
#include "polcheck/error.hpp"
#include "polcheck/ontology.hpp"
#include "term_parser.hpp"

namespace polcheck {

using detail::TokenKind;
using detail::TokenStream;

namespace {

std::string parse_value(TokenStream& ts) {
    const auto& t = ts.peek();
    if (t.kind == TokenKind::Ident || t.kind == TokenKind::String) return ts.next().text;
    ts.fail("expected value");
}

Assignment parse_assignment(TokenStream& ts) {
    Assignment a;
    ts.expect("{");
    if (ts.accept("}")) return a;
    do {
        int line = ts.peek().line, col = ts.peek().column;
        std::string var = ts.expect_ident("variable name");
        ts.expect("=");
        std::string val = parse_value(ts);
        if (!a.emplace(var, val).second) throw ParseError("variable '" + var + "' assigned twice", line, col);
    } while (ts.accept(","));
    ts.expect("}");
    return a;
}

StateSpace parse_space_tokens(TokenStream& ts) {
    if (ts.accept_ident("empty")) return StateSpace::nothing();
    if (ts.accept_ident("any")) return StateSpace::everything();
    StateSpace s;
    do s.parts.push_back(parse_assignment(ts));
    while (ts.accept("|"));
    return s;
}

std::vector<std::string> parse_name_list(TokenStream& ts) {
    std::vector<std::string> out;
    do out.push_back(ts.expect_ident("name"));
    while (ts.accept(","));
    return out;
}

std::vector<std::string> parse_braced_names(TokenStream& ts) {
    ts.expect("{");
    std::vector<std::string> out;
    if (ts.accept("}")) return out;
    out = parse_name_list(ts);
    ts.expect("}");
    return out;
}

bool at_keyword(const TokenStream& ts) {
    static const char* kw[] = {"class", "prop", "subprop", "var", "individual", "hie", "rel", "action"};
    for (const char* k : kw)
        if (ts.is_ident(k)) return true;
    return ts.at_end();
}

ActionClassDef parse_action(TokenStream& ts) {
    ActionClassDef a;
    a.name = ts.expect_ident("action name");
    if (ts.accept("(")) {
        if (!ts.accept(")")) {
            do {
                std::string prop = ts.expect_ident("parameter property");
                ts.expect(":");
                if (ts.peek().kind != TokenKind::Var) ts.fail("expected parameter variable");
                a.params.emplace_back(prop, ts.next().text);
            } while (ts.accept(","));
            ts.expect(")");
        }
    }
    while (!at_keyword(ts)) {
        if (ts.accept_ident("init")) a.init = parse_space_tokens(ts);
        else if (ts.accept_ident("final")) a.final_space = parse_space_tokens(ts);
        else if (ts.accept_ident("when")) {
            GuardedAssignment ga;
            ga.guard = parse_space_tokens(ts);
            if (!ts.accept_ident("set")) ts.fail("expected 'set' after guard");
            ga.effects = parse_assignment(ts);
            a.transformer.push_back(std::move(ga));
        } else if (ts.accept_ident("set")) {
            a.transformer.push_back({StateSpace::everything(), parse_assignment(ts)});
        } else if (ts.accept_ident("causes")) a.causes = parse_braced_names(ts);
        else if (ts.accept_ident("prevents")) a.prevents = parse_braced_names(ts);
        else if (ts.accept_ident("effect")) a.effect = detail::parse_formula(ts);
        else if (ts.accept(".")) break;
        else ts.fail("unexpected token in action declaration");
    }
    return a;
}

}  // namespace

StateSpace parse_space(std::string_view text) {
    TokenStream ts(detail::tokenize(text));
    StateSpace s = parse_space_tokens(ts);
    if (!ts.at_end()) ts.fail("trailing input after state space");
    return s;
}

Ontology parse_ontology(std::string_view text) {
    Ontology onto;
    TokenStream ts(detail::tokenize(text));
    while (!ts.at_end()) {
        if (ts.accept_ident("class")) {
            std::string name = ts.expect_ident("class name");
            std::vector<std::string> parents;
            if (ts.accept_ident("subclassOf")) parents = parse_name_list(ts);
            onto.add_class(name, parents);
        } else if (ts.accept_ident("individual")) {
            std::string id = ts.expect_ident("individual name");
            ts.expect(":");
            onto.add_individual(id, ts.expect_ident("class name"));
        } else if (ts.accept_ident("prop")) {
            PropertyDef p;
            p.name = ts.expect_ident("property name");
            while (true) {
                if (ts.accept_ident("dom")) p.dom = parse_name_list(ts);
                else if (ts.accept_ident("range")) p.range = parse_name_list(ts);
                else break;
            }
            onto.add_property(std::move(p));
        } else if (ts.accept_ident("subprop")) {
            std::string child = ts.expect_ident("property name");
            onto.add_subproperty(child, ts.expect_ident("property name"));
        } else if (ts.accept_ident("var")) {
            VariableDef v;
            v.name = ts.expect_ident("variable name");
            if (!ts.accept_ident("maps")) ts.fail("expected 'maps'");
            if (ts.peek().kind == TokenKind::Var) v.object = "$" + ts.next().text;
            else v.object = ts.expect_ident("object name");
            ts.expect(".");
            v.property = ts.expect_ident("property name");
            if (!ts.accept_ident("range")) ts.fail("expected 'range'");
            ts.expect("{");
            do v.range.push_back(parse_value(ts));
            while (ts.accept(","));
            ts.expect("}");
            onto.add_variable(std::move(v));
        } else if (ts.accept_ident("hie")) {
            for (const auto& n : parse_name_list(ts)) onto.declare_family(n, PredicateFamily::Hierarchical);
        } else if (ts.accept_ident("rel")) {
            for (const auto& n : parse_name_list(ts)) onto.declare_family(n, PredicateFamily::Relational);
        } else if (ts.accept_ident("action")) {
            onto.add_action(parse_action(ts));
        } else {
            ts.fail("expected declaration");
        }
        ts.accept(".");
    }
    onto.finalize();
    return onto;
}

namespace {

bool in_range(const std::string& value, const std::vector<std::string>& range, const Ontology& onto) {
    if (range.empty()) return true;
    for (const auto& r : range) {
        if (r == "Literal" && !onto.is_known(value)) return true;
        if (onto.is_known(value) && onto.is_subclass(value, r)) return true;
    }
    return false;
}

}  // namespace

DataSystem parse_facts(std::string_view text, const Ontology& onto) {
    DataSystem ds;
    TokenStream ts(detail::tokenize(text));
    while (!ts.at_end()) {
        int line = ts.peek().line, col = ts.peek().column;
        if (ts.is_ident("obj") && ts.peek(1).kind == TokenKind::Ident && ts.is_punct(":", 2)) {
            ts.next();
            ObjectInstance o;
            o.id = ts.expect_ident("object id");
            ts.expect(":");
            o.type = ts.expect_ident("class name");
            if (ts.is_punct("{"))
                for (auto& [k, v] : parse_assignment(ts)) o.props.emplace_back(k, v);
            if (ds.object(o.id)) throw SchemaError("object '" + o.id + "' declared twice");
            ds.objects.push_back(std::move(o));
        } else if (ts.is_ident("set") && ts.peek(1).kind == TokenKind::Ident && ts.is_punct("=", 2)) {
            ts.next();
            std::string var = ts.expect_ident("variable name");
            ts.expect("=");
            std::string val = parse_value(ts);
            const VariableDef* v = onto.variable(var);
            if (!v) throw SchemaError("state assigns undeclared variable '" + var + "'");
            if (std::find(v->range.begin(), v->range.end(), val) == v->range.end())
                throw SchemaError("value '" + val + "' is outside the range of '" + var + "'");
            ds.assignments[var] = val;
        } else {
            Atom a = detail::parse_atom(ts);
            if (!is_ground(a)) throw ParseError("fact " + a.str() + " is not ground", line, col);
            static const char* extra[] = {"done", "over_AS", "over_AO"};
            bool known = onto.family(a.predicate).has_value() ||
                         std::any_of(std::begin(extra), std::end(extra), [&](const char* p) { return a.predicate == p; });
            if (!known) throw SchemaError("fact " + a.str() + " uses unknown predicate '" + a.predicate + "'");
            ds.base_atoms.push_back(std::move(a));
        }
        ts.accept(".");
    }
    Ontology full = onto;
    for (const auto& o : ds.objects) {
        if (!onto.has_class(o.type)) throw SchemaError("object '" + o.id + "' has undeclared type '" + o.type + "'");
        full.add_individual(o.id, o.type);
    }
    for (const auto& o : ds.objects) {
        for (const auto& [prop, val] : o.props) {
            const PropertyDef* p = onto.property(prop);
            if (!p) throw SchemaError("object '" + o.id + "' uses undeclared property '" + prop + "'");
            if (!p->dom.empty() && !std::any_of(p->dom.begin(), p->dom.end(),
                                                [&](const std::string& d) { return full.is_subclass(o.type, d); }))
                throw SchemaError("object '" + o.id + "' of type '" + o.type + "' is outside the domain of '" + prop + "'");
            if (!in_range(val, p->range, full))
                throw SchemaError("value '" + val + "' of " + o.id + "." + prop + " is outside the property range");
        }
    }
    return ds;
}

}  // namespace polcheck
