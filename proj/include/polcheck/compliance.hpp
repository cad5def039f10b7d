#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polcheck/eval.hpp"
#include "polcheck/ontology.hpp"
#include "polcheck/refine.hpp"

namespace polcheck {

/// Live system state: ground atoms plus variable assignments.
struct CurrentState {
    std::set<Atom> atoms;
    Assignment assignments;
};

/// Reads a state file in the facts syntax: objects, ground atoms and `set var = value` lines.
CurrentState parse_state(std::string_view text, const Ontology& onto);

enum class ComplianceVerdict { Compliant, NonCompliant, InconsistentInput };

enum class ConflictCategory {
    ModalAuthorizationViolation,
    ObligationViolation,
    ResourceCapabilityConflict,
    ModalCapabilityConflict,
};

std::string to_string(ComplianceVerdict v);
std::string to_string(ConflictCategory c);

struct Conflict {
    ConflictCategory category;
    std::vector<Atom> witness;
    std::vector<std::string> rule_ids;

    std::string str() const;
    friend bool operator==(const Conflict& a, const Conflict& b) {
        return a.category == b.category && a.witness == b.witness && a.rule_ids == b.rule_ids;
    }
};

struct Satisfaction {
    bool satisfied = false;
    bool released = false;
    bool postcondition = false;
    bool effect = false;
};

/// σ ⇒ q and σ ⇒ e_a for a ground mustdo atom, by closed-world lookup over σ and the data
/// system's base atoms. The obligation is released when σ assigns every variable and the
/// action's initial space is not refined by that state. Throws EntailmentError for predicates
/// that neither the ontology nor the facts know.
Satisfaction obligation_satisfied(const Atom& mustdo, const CurrentState& sigma, const DataSystem& ds,
                                  const Ontology& onto);

/// do(o,s,+a) in the low view against do(o,s,-a) in the high view.
std::vector<Conflict> detect_modal_authorization_violation(const Model& high, const Model& low);

/// High-level mustdo atoms that the low view does not carry and σ does not satisfy.
std::vector<Conflict> detect_obligation_violation(const Model& high, const Model& low, const CurrentState& sigma,
                                                  const DataSystem& ds, const Ontology& onto);

/// mustdo atoms whose action names a resource that is not an object of the data system.
std::vector<Conflict> detect_resource_capability_conflict(const Model& high, const DataSystem& ds);

/// mustdo(s,a,q) without do(a,s,+execute) in the low view.
std::vector<Conflict> detect_modal_capability_conflict(const Model& high, const Model& low);

/// High do atoms missing from the low view: a missing prohibition is an authorization violation,
/// a missing grant a capability conflict.
std::vector<Conflict> detect_missing_decisions(const Model& high, const Model& low);

struct ComplianceStats {
    std::size_t branches_total = 0;
    std::size_t branches_examined = 0;
    std::size_t atoms_derived = 0;
    /// Obligations accepted only because the low view also carries them.
    std::size_t obligations_met_by_low = 0;
};

struct ComplianceReport {
    ComplianceVerdict verdict = ComplianceVerdict::NonCompliant;
    std::optional<std::vector<ChoiceEntry>> matched_branch;
    /// Branch with the fewest conflicts when non-compliant.
    std::optional<std::vector<ChoiceEntry>> nearest_branch;
    std::vector<Conflict> conflicts;
    std::vector<Atom> released;
    std::vector<std::string> messages;
    ComplianceStats stats;

    std::string to_text() const;
    std::string to_json() const;
};

inline constexpr int kReportSchemaVersion = 1;

/// Evaluates the low policy once, refines the high policy and checks each branch in order; stops
/// at the first branch without conflicts.
ComplianceReport check_compliance(const Policy& high, const Policy& low, const DataSystem& ds,
                                  const PatternSet& patterns, const Ontology& onto, const CurrentState& sigma,
                                  const RefineOptions& opts = {});

}  // namespace polcheck
