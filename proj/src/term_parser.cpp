#include "term_parser.hpp"

namespace polcheck::detail {

bool formula_position(const std::string& predicate, std::size_t index) {
    return index == 2 && (predicate == "hasObligation" || predicate == "derhasObligation" || predicate == "mustdo");
}

namespace {

std::string property_name(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.kind == TokenKind::Ident) return ts.next().text;
    ts.fail("expected property name");
}

Term parse_action_args(std::string functor, TokenStream& ts) {
    std::vector<Binding> bindings;
    ts.expect("(");
    if (ts.accept(")")) return Term::action(std::move(functor), std::move(bindings));
    do {
        ts.expect("(");
        std::string prop = property_name(ts);
        ts.expect(",");
        Term value = parse_term(ts);
        ts.expect(")");
        bindings.push_back({std::move(prop), std::move(value)});
    } while (ts.accept(","));
    ts.expect(")");
    return Term::action(std::move(functor), std::move(bindings));
}

Formula parse_unary(TokenStream& ts);

Formula parse_and(TokenStream& ts) {
    std::vector<Formula> parts{parse_unary(ts)};
    while (ts.accept("&")) parts.push_back(parse_unary(ts));
    if (parts.size() == 1) return parts.front();
    Formula f;
    f.kind = Formula::Kind::And;
    f.children = std::move(parts);
    return f;
}

Formula parse_unary(TokenStream& ts) {
    if (ts.accept("!") || ts.accept("~") || ts.accept_ident("not")) {
        Formula f;
        f.kind = Formula::Kind::Not;
        f.children.push_back(parse_unary(ts));
        return f;
    }
    if (ts.accept("(")) {
        Formula f = parse_formula(ts);
        ts.expect(")");
        return f;
    }
    if (ts.is_ident("true") && !ts.is_punct("(", 1)) {
        ts.next();
        return Formula::truth();
    }
    if (ts.is_ident("false") && !ts.is_punct("(", 1)) {
        ts.next();
        return Formula::falsity();
    }
    return Formula::of(parse_atom(ts));
}

}  // namespace

Term parse_term(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.kind == TokenKind::Var) return Term::variable(ts.next().text);
    if (t.kind == TokenKind::String) return Term::constant(ts.next().text);
    if (ts.is_punct("+") || ts.is_punct("-")) {
        char sign = ts.next().text[0];
        return Term::signed_term(sign, parse_term(ts));
    }
    if (t.kind == TokenKind::Ident) {
        std::string name = ts.next().text;
        if (ts.is_punct("(")) return parse_action_args(std::move(name), ts);
        return Term::constant(std::move(name));
    }
    ts.fail("expected term");
}

Formula parse_formula(TokenStream& ts) {
    std::vector<Formula> parts{parse_and(ts)};
    while (ts.accept("|")) parts.push_back(parse_and(ts));
    if (parts.size() == 1) return parts.front();
    Formula f;
    f.kind = Formula::Kind::Or;
    f.children = std::move(parts);
    return f;
}

Atom parse_atom(TokenStream& ts) {
    Atom a;
    a.predicate = ts.expect_ident("predicate name");
    if (!ts.accept("(")) return a;
    if (ts.accept(")")) return a;
    do {
        std::size_t idx = a.args.size();
        if (formula_position(a.predicate, idx) && ts.peek().kind != TokenKind::Var)
            a.args.push_back(Term::formula(parse_formula(ts)));
        else
            a.args.push_back(parse_term(ts));
    } while (ts.accept(","));
    ts.expect(")");
    return a;
}

}  // namespace polcheck::detail
