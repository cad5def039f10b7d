#include <set>

#include "lexer.hpp"
#include "polcheck/error.hpp"
#include "polcheck/ontology.hpp"
#include "polcheck/policy.hpp"
#include "term_parser.hpp"

namespace polcheck {

namespace {

using detail::TokenKind;
using detail::TokenStream;

const std::map<std::string, std::size_t>& builtin_arity() {
    static const std::map<std::string, std::size_t> m = {
        {"hasObligation", 3}, {"hasDispensation", 2}, {"derhasObligation", 3}, {"derhasDispensation", 2},
        {"mustdo", 3},        {"cando", 3},           {"dercando", 3},         {"do", 3},
        {"done", 4},          {"error", 0}};
    return m;
}

bool authorization_predicate(const std::string& p) { return p == "cando" || p == "dercando" || p == "do"; }

bool contains_signed(const Term& t) {
    if (t.is_signed()) return true;
    for (const auto& b : t.bindings())
        if (contains_signed(b.value)) return true;
    return false;
}

void check_atom(const Atom& a, const detail::Token& at, const Ontology* onto) {
    auto fail = [&](const std::string& msg) -> void { throw ParseError(msg, at.line, at.column); };
    auto it = builtin_arity().find(a.predicate);
    if (it != builtin_arity().end()) {
        if (a.args.size() != it->second)
            fail(a.predicate + " expects " + std::to_string(it->second) + " arguments, got " +
                 std::to_string(a.args.size()));
    } else if (a.predicate != "over_AS" && a.predicate != "over_AO" && onto && !onto->family(a.predicate)) {
        throw NameError(std::to_string(at.line) + ":" + std::to_string(at.column) + ": unknown predicate '" +
                        a.predicate + "'");
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        const Term& t = a.args[i];
        bool sign_slot = authorization_predicate(a.predicate) && i == 2;
        if (sign_slot && !t.is_signed() && !t.is_variable())
            fail(a.predicate + " needs a signed action as third argument");
        if (!sign_slot && contains_signed(t)) fail("signed action outside cando/dercando/do");
    }
}

Literal parse_literal(TokenStream& ts, const Ontology* onto) {
    Literal lit;
    const detail::Token& first = ts.peek();
    lit.line = first.line;
    lit.column = first.column;
    if (ts.accept("!") || ts.accept("~") || (ts.is_ident("not") && !ts.is_punct("(", 1) && ts.accept_ident("not")))
        lit.positive = false;
    detail::Token at = ts.peek();
    lit.atom = detail::parse_atom(ts);
    check_atom(lit.atom, at, onto);
    return lit;
}

std::string value_token(TokenStream& ts) {
    const detail::Token& t = ts.peek();
    if (t.kind == TokenKind::Ident || t.kind == TokenKind::String) return ts.next().text;
    ts.fail("expected value");
}

}  // namespace

Policy parse_policy(const std::string& text, const Ontology* onto) {
    TokenStream ts(detail::tokenize(text));
    Policy p;
    std::set<std::string> ids;
    while (!ts.at_end()) {
        if (ts.is_ident("scope") && !ts.is_punct("(", 1)) {
            ts.next();
            do p.scope.push_back(value_token(ts));
            while (ts.accept(","));
            ts.expect(".");
            continue;
        }
        if (ts.is_ident("env") && !ts.is_punct("(", 1)) {
            ts.next();
            do {
                std::string key = ts.expect_ident("environment key");
                ts.expect("=");
                p.environment[key] = value_token(ts);
            } while (ts.accept(","));
            ts.expect(".");
            continue;
        }
        Rule r;
        r.line = ts.peek().line;
        if (ts.accept("@")) r.id = ts.expect_ident("rule id");
        const detail::Token at = ts.peek();
        if (ts.is_punct("!") || ts.is_punct("~")) ts.fail("rule head must be positive");
        r.head = detail::parse_atom(ts);
        check_atom(r.head, at, onto);
        if (ts.accept(":-") || ts.accept("<-")) {
            do r.body.push_back(parse_literal(ts, onto));
            while (ts.accept("&") || ts.accept(","));
        }
        ts.expect(".");
        if (r.id.empty()) r.id = "r" + std::to_string(p.rules.size() + 1);
        if (!ids.insert(r.id).second)
            throw ParseError("duplicate rule id '" + r.id + "'", r.line, at.column);
        p.rules.push_back(std::move(r));
    }
    for (const auto& v : check_safety(p)) {
        const Rule* r = p.find(v.rule_id);
        throw SafetyError("line " + std::to_string(r->line) + ": rule " + v.rule_id + ": " + v.message);
    }
    return p;
}

Atom parse_atom_text(const std::string& text) {
    TokenStream ts(detail::tokenize(text));
    detail::Token at = ts.peek();
    Atom a = detail::parse_atom(ts);
    ts.accept(".");
    if (!ts.at_end()) ts.fail("unexpected input after atom");
    check_atom(a, at, nullptr);
    return a;
}

}  // namespace polcheck
