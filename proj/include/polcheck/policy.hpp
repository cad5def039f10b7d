#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polcheck/term.hpp"

namespace polcheck {

class Ontology;

/// Predicate categories of the policy language. Base covers hie- and rel- predicates.
enum class PredicateKind {
    Base,
    Done,
    Over,
    HasObligation,
    HasDispensation,
    DerhasDispensation,
    DerhasObligation,
    Mustdo,
    Cando,
    Dercando,
    Do,
    Error
};

PredicateKind predicate_kind(const std::string& predicate);
std::string to_string(PredicateKind k);

struct Literal {
    bool positive = true;
    Atom atom;
    int line = 0;
    int column = 0;

    std::string str() const;
    friend bool operator==(const Literal& a, const Literal& b) {
        return a.positive == b.positive && a.atom == b.atom;
    }
};

enum class RuleGroup { H, A, M };

struct Rule {
    std::string id;
    Atom head;
    std::vector<Literal> body;
    int line = 0;

    PredicateKind kind() const { return predicate_kind(head.predicate); }
    RuleGroup group() const;
    std::string str() const;
    friend bool operator==(const Rule& a, const Rule& b) {
        return a.id == b.id && a.head == b.head && a.body == b.body;
    }
};

struct Policy {
    std::vector<Rule> rules;
    std::vector<std::string> scope;
    std::map<std::string, std::string> environment;

    std::vector<const Rule*> group(RuleGroup g) const;
    const Rule* find(const std::string& id) const;
    /// Concrete syntax; parse_policy(p.str()) == p.
    std::string str() const;

    friend bool operator==(const Policy& a, const Policy& b) {
        return a.rules == b.rules && a.scope == b.scope && a.environment == b.environment;
    }
};

/// Parses a policy file. With an ontology, non-builtin predicates must belong to a declared
/// hie- or rel- family. Unsafe rules raise SafetyError.
Policy parse_policy(const std::string& text, const Ontology* onto = nullptr);

/// Parses a single ground or non-ground atom, e.g. for `explain`.
Atom parse_atom_text(const std::string& text);

/// Stratification row of the head of `r`: 0 to 9.
int rule_stratum(const Rule& r);
/// Level of a ground atom, splitting do by the sign of its action.
int atom_stratum(const Atom& a);

struct StratificationViolation {
    std::string rule_id;
    int row = 0;
    std::string literal;
    std::string message;
    std::vector<std::string> allowed;
};

std::vector<StratificationViolation> check_stratification(const Policy& p);

struct SafetyViolation {
    std::string rule_id;
    std::string variable;
    std::string message;
};

std::vector<SafetyViolation> check_safety(const Policy& p);

struct HighLevelViolation {
    std::string rule_id;
    std::string message;
};

/// A high-level policy must not author positive authorizations.
std::vector<HighLevelViolation> validate_high_level(const Policy& p);

inline std::ostream& operator<<(std::ostream& os, const Rule& r) { return os << r.str(); }

}  // namespace polcheck
