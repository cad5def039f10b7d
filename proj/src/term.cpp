#include "polcheck/term.hpp"

#include <algorithm>
#include <sstream>

namespace polcheck {

namespace {

template <class T>
std::strong_ordering compare_ranges(const std::vector<T>& a, const std::vector<T>& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Term Term::constant(std::string name) {
    Term t;
    t.kind_ = Kind::Constant;
    t.name_ = std::move(name);
    return t;
}

Term Term::variable(std::string name) {
    Term t;
    t.kind_ = Kind::Variable;
    t.name_ = std::move(name);
    return t;
}

Term Term::action(std::string functor, std::vector<Binding> bindings) {
    Term t;
    t.kind_ = Kind::Action;
    t.name_ = std::move(functor);
    t.bindings_ = std::move(bindings);
    return t;
}

Term Term::signed_term(char sign, Term inner) {
    Term t;
    t.kind_ = Kind::Signed;
    t.sign_ = sign;
    t.children_.push_back(std::move(inner));
    return t;
}

Term Term::formula(Formula f) {
    Term t;
    t.kind_ = Kind::Formula;
    t.formula_ = std::make_shared<const Formula>(std::move(f));
    return t;
}

std::optional<std::string> Term::action_name() const {
    if (kind_ == Kind::Action || kind_ == Kind::Constant) return name_;
    return std::nullopt;
}

std::string Term::str() const {
    switch (kind_) {
    case Kind::Constant: return name_;
    case Kind::Variable: return "$" + name_;
    case Kind::Signed: return std::string(1, sign_) + children_.front().str();
    case Kind::Formula: return formula_->str();
    case Kind::Action: {
        std::string out = name_ + "(";
        for (std::size_t i = 0; i < bindings_.size(); ++i) {
            if (i) out += ",";
            out += "(" + bindings_[i].property + "," + bindings_[i].value.str() + ")";
        }
        return out + ")";
    }
    }
    return {};
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    switch (a.kind_) {
    case Term::Kind::Constant:
    case Term::Kind::Variable:
        return a.name_ <=> b.name_;
    case Term::Kind::Signed:
        if (auto c = a.sign_ <=> b.sign_; c != 0) return c;
        return a.children_.front() <=> b.children_.front();
    case Term::Kind::Action:
        if (auto c = a.name_ <=> b.name_; c != 0) return c;
        return compare_ranges(a.bindings_, b.bindings_);
    case Term::Kind::Formula:
        return *a.formula_ <=> *b.formula_;
    }
    return std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Binding& a, const Binding& b) {
    if (auto c = a.property <=> b.property; c != 0) return c;
    return a.value <=> b.value;
}

std::string Atom::str() const {
    if (args.empty()) return predicate;
    std::string out = predicate + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += args[i].str();
    }
    return out + ")";
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return compare_ranges(a.args, b.args);
}

Formula Formula::conjunction(std::vector<Formula> parts) {
    std::erase_if(parts, [](const Formula& f) { return f.kind == Kind::True; });
    if (parts.empty()) return truth();
    for (const auto& p : parts)
        if (p.kind == Kind::False) return falsity();
    if (parts.size() == 1) return parts.front();
    Formula f;
    f.kind = Kind::And;
    f.children = std::move(parts);
    return f;
}

bool Formula::is_conjunctive() const {
    switch (kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom: return true;
    case Kind::And:
        return std::all_of(children.begin(), children.end(), [](const Formula& f) { return f.is_conjunctive(); });
    default: return false;
    }
}

std::string Formula::str() const {
    switch (kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: return atom.str();
    case Kind::Not: {
        const Formula& c = children.front();
        bool wrap = c.kind == Kind::And || c.kind == Kind::Or;
        return "!" + (wrap ? "(" + c.str() + ")" : c.str());
    }
    case Kind::And:
    case Kind::Or: {
        std::string sep = kind == Kind::And ? " & " : " | ";
        std::string out;
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) out += sep;
            const Formula& c = children[i];
            // '&' binds tighter than '|'; parenthesize anything looser than the parent.
            bool wrap = (kind == Kind::And && c.kind == Kind::Or) || c.kind == kind;
            out += wrap ? "(" + c.str() + ")" : c.str();
        }
        return out;
    }
    }
    return {};
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (a.kind == Formula::Kind::Atom) return a.atom <=> b.atom;
    return compare_ranges(a.children, b.children);
}

Term substitute(const Term& t, const Substitution& s) {
    switch (t.kind()) {
    case Term::Kind::Constant: return t;
    case Term::Kind::Variable: {
        auto it = s.find(t.name());
        return it == s.end() ? t : it->second;
    }
    case Term::Kind::Signed: return Term::signed_term(t.sign(), substitute(t.inner(), s));
    case Term::Kind::Action: {
        std::vector<Binding> bs;
        bs.reserve(t.bindings().size());
        for (const auto& b : t.bindings()) bs.push_back({b.property, substitute(b.value, s)});
        return Term::action(t.name(), std::move(bs));
    }
    case Term::Kind::Formula: return Term::formula(substitute(t.as_formula(), s));
    }
    return t;
}

Atom substitute(const Atom& a, const Substitution& s) {
    Atom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(substitute(t, s));
    return out;
}

Formula substitute(const Formula& f, const Substitution& s) {
    Formula out = f;
    if (f.kind == Formula::Kind::Atom) out.atom = substitute(f.atom, s);
    for (auto& c : out.children) c = substitute(c, s);
    return out;
}

void collect_variables(const Term& t, std::set<std::string>& out, bool skip_formulas) {
    switch (t.kind()) {
    case Term::Kind::Constant: break;
    case Term::Kind::Variable: out.insert(t.name()); break;
    case Term::Kind::Signed: collect_variables(t.inner(), out, skip_formulas); break;
    case Term::Kind::Action:
        for (const auto& b : t.bindings()) collect_variables(b.value, out, skip_formulas);
        break;
    case Term::Kind::Formula:
        if (!skip_formulas) collect_variables(t.as_formula(), out);
        break;
    }
}

void collect_variables(const Atom& a, std::set<std::string>& out, bool skip_formulas) {
    for (const auto& t : a.args) collect_variables(t, out, skip_formulas);
}

void collect_variables(const Formula& f, std::set<std::string>& out) {
    if (f.kind == Formula::Kind::Atom) collect_variables(f.atom, out);
    for (const auto& c : f.children) collect_variables(c, out);
}

namespace {

bool match_formula(const Formula& p, const Formula& v, Substitution& s);

bool match_atom(const Atom& p, const Atom& v, Substitution& s) {
    if (p.predicate != v.predicate || p.args.size() != v.args.size()) return false;
    for (std::size_t i = 0; i < p.args.size(); ++i)
        if (!match(p.args[i], v.args[i], s)) return false;
    return true;
}

bool match_formula(const Formula& p, const Formula& v, Substitution& s) {
    if (p.kind != v.kind || p.children.size() != v.children.size()) return false;
    if (p.kind == Formula::Kind::Atom) return match_atom(p.atom, v.atom, s);
    for (std::size_t i = 0; i < p.children.size(); ++i)
        if (!match_formula(p.children[i], v.children[i], s)) return false;
    return true;
}

}  // namespace

bool match(const Term& pattern, const Term& value, Substitution& s) {
    if (pattern.is_variable()) {
        auto [it, inserted] = s.try_emplace(pattern.name(), value);
        return inserted || it->second == value;
    }
    if (pattern.kind() != value.kind()) return false;
    switch (pattern.kind()) {
    case Term::Kind::Constant: return pattern.name() == value.name();
    case Term::Kind::Signed:
        return pattern.sign() == value.sign() && match(pattern.inner(), value.inner(), s);
    case Term::Kind::Action: {
        if (pattern.name() != value.name() || pattern.bindings().size() != value.bindings().size()) return false;
        for (std::size_t i = 0; i < pattern.bindings().size(); ++i) {
            if (pattern.bindings()[i].property != value.bindings()[i].property) return false;
            if (!match(pattern.bindings()[i].value, value.bindings()[i].value, s)) return false;
        }
        return true;
    }
    case Term::Kind::Formula: return match_formula(pattern.as_formula(), value.as_formula(), s);
    case Term::Kind::Variable: break;
    }
    return false;
}

bool match(const Atom& pattern, const Atom& value, Substitution& s) { return match_atom(pattern, value, s); }

bool is_ground(const Atom& a) {
    std::set<std::string> vars;
    collect_variables(a, vars, /*skip_formulas=*/true);
    return vars.empty();
}

}  // namespace polcheck
