#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace polcheck {

struct Binding;
struct Formula;

/// A term of the policy language.
///
/// Action terms carry property bindings, e.g. `Protect((target,$x))`. Signed terms wrap an
/// action with `+`/`-` and appear only in authorization predicates. Formula terms hold the
/// postcondition of obligation-family atoms.
class Term {
public:
    enum class Kind { Constant, Variable, Action, Signed, Formula };

    static Term constant(std::string name);
    static Term variable(std::string name);
    static Term action(std::string functor, std::vector<Binding> bindings);
    static Term signed_term(char sign, Term inner);
    static Term formula(Formula f);

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    bool is_variable() const { return kind_ == Kind::Variable; }
    bool is_action() const { return kind_ == Kind::Action; }
    bool is_signed() const { return kind_ == Kind::Signed; }
    bool is_formula() const { return kind_ == Kind::Formula; }

    /// Constant text, variable name (without `$`) or action functor.
    const std::string& name() const { return name_; }
    char sign() const { return sign_; }
    const Term& inner() const { return children_.front(); }
    const std::vector<Binding>& bindings() const { return bindings_; }
    const Formula& as_formula() const { return *formula_; }

    /// Variables starting with `_` are anonymous: existential in negative literals.
    bool is_anonymous() const { return kind_ == Kind::Variable && !name_.empty() && name_[0] == '_'; }

    /// Functor of an action term or name of a constant; empty otherwise.
    std::optional<std::string> action_name() const;

    std::string str() const;

    friend std::strong_ordering operator<=>(const Term& a, const Term& b);
    friend bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

private:
    Kind kind_ = Kind::Constant;
    std::string name_;
    char sign_ = '+';
    std::vector<Binding> bindings_;
    std::vector<Term> children_;
    std::shared_ptr<const Formula> formula_;
};

struct Binding {
    std::string property;
    Term value;

    friend std::strong_ordering operator<=>(const Binding& a, const Binding& b);
    friend bool operator==(const Binding& a, const Binding& b) { return (a <=> b) == 0; }
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    std::string str() const;
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
    friend bool operator==(const Atom& a, const Atom& b) { return (a <=> b) == 0; }
};

struct Formula {
    enum class Kind { True, False, Atom, And, Or, Not };
    Kind kind = Kind::True;
    polcheck::Atom atom;
    std::vector<Formula> children;

    static Formula truth() { return {}; }
    static Formula falsity() { Formula f; f.kind = Kind::False; return f; }
    static Formula of(polcheck::Atom a) { Formula f; f.kind = Kind::Atom; f.atom = std::move(a); return f; }
    static Formula conjunction(std::vector<Formula> parts);

    /// True when the formula uses only atoms, `&`, `true` and `false`.
    bool is_conjunctive() const;
    std::string str() const;

    friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);
    friend bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }
};

using Substitution = std::map<std::string, Term>;

Term substitute(const Term& t, const Substitution& s);
Atom substitute(const Atom& a, const Substitution& s);
Formula substitute(const Formula& f, const Substitution& s);

/// Collects variable names. With `skip_formulas`, variables inside formula terms are ignored.
void collect_variables(const Term& t, std::set<std::string>& out, bool skip_formulas = false);
void collect_variables(const Atom& a, std::set<std::string>& out, bool skip_formulas = false);
void collect_variables(const Formula& f, std::set<std::string>& out);

/// One-way matching of `pattern` against `value`. Variables in `value` are treated as opaque
/// values, so formula-local variables survive grounding.
bool match(const Term& pattern, const Term& value, Substitution& s);
bool match(const Atom& pattern, const Atom& value, Substitution& s);

inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << t.str(); }
inline std::ostream& operator<<(std::ostream& os, const Atom& a) { return os << a.str(); }
inline std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << f.str(); }

/// True when no variables occur outside formula positions.
bool is_ground(const Atom& a);

}  // namespace polcheck
