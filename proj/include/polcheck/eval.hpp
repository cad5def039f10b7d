#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "polcheck/policy.hpp"

namespace polcheck {

class Ontology;
struct DataSystem;

/// One ground rule instance that fired.
struct Derivation {
    std::string rule_id;
    std::vector<Atom> positive;
    std::vector<Atom> negative;

    friend std::strong_ordering operator<=>(const Derivation&, const Derivation&) = default;
    friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct Model {
    std::set<Atom> facts;
    std::set<Atom> atoms;
    std::map<Atom, std::set<Derivation>> provenance;

    bool contains(const Atom& a) const { return atoms.count(a) > 0; }
    /// Atoms grouped by their stratification row.
    std::map<int, std::set<Atom>> strata() const;
    bool error_flag() const;
};

struct GroundRule {
    std::string rule_id;
    Atom head;
    std::vector<Literal> body;

    friend bool operator==(const GroundRule& a, const GroundRule& b) {
        return a.rule_id == b.rule_id && a.head == b.head && a.body == b.body;
    }
};

/// Bottom-up evaluation. Strata come from the predicate dependency graph; a negative cycle
/// raises StructureError. Within a stratum evaluation is semi-naive.
Model evaluate(const Policy& p, const std::set<Atom>& facts);
Model evaluate(const Policy& p, const DataSystem& ds, const Ontology& onto);

/// Rule instances whose positive body holds in the model, with ground body literals.
std::vector<GroundRule> ground(const Policy& p, const std::set<Atom>& facts);

struct DecisionView {
    std::vector<Atom> do_atoms;
    std::vector<Atom> mustdo_atoms;
};

DecisionView decision_view(const Model& m);

struct IntegrityResult {
    bool consistent = true;
    std::vector<Derivation> witnesses;
};

IntegrityResult check_integrity(const Model& m);

/// Sorted ground atoms, one per line.
std::string dump(const Model& m);

/// Derivation trees of `a`, one per way it is derived, in lexicographic order; "not derivable"
/// when absent.
std::string explain(const Model& m, const Atom& a);

}  // namespace polcheck
