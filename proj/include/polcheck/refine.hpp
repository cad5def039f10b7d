#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "polcheck/action.hpp"
#include "polcheck/policy.hpp"

namespace polcheck {

/// One decision taken while refining: which alternative of a choice or conjunction node, or
/// which of several patterns for the same action.
struct ChoiceEntry {
    std::string rule_id;
    std::string pattern_id;
    std::string node;
    std::string branch;

    std::string str() const;
    friend std::strong_ordering operator<=>(const ChoiceEntry&, const ChoiceEntry&) = default;
    friend bool operator==(const ChoiceEntry&, const ChoiceEntry&) = default;
};

struct RefinementBranch {
    Policy policy;
    std::vector<ChoiceEntry> choice_log;

    std::string log_str() const;
};

struct RefinementResult {
    std::vector<RefinementBranch> branches;
    std::vector<std::string> warnings;
};

enum class ConflictMode { DispensationPrecedence, Custom };

struct RefineOptions {
    std::size_t max_branches = 1024;
    ConflictMode conflict = ConflictMode::DispensationPrecedence;
};

/// Adds the four subject-hierarchy propagation rules for every hierarchical predicate.
Policy propagate_hierarchy(const Policy& p, const Ontology& onto);

/// Adds +execute/+modify/+read authorizations derived from mustdo, and do decisions from
/// cando/dercando.
Policy derive_authorizations(const Policy& p);

/// Dispensation precedence installs the default mustdo rule unless already present.
Policy install_conflict_resolution(const Policy& p, ConflictMode mode);

/// Compiles a state space into a postcondition over the rel atoms of the mapped variables. `$`
/// parameters are resolved through the bindings of `context` actions.
Formula compile_space(const StateSpace& s, const std::vector<Term>& context, const Ontology& onto);

/// Refines every obligation whose action has a pattern until only atomic actions remain, then
/// installs the derivation templates. Throws BranchLimitError past `max_branches`.
RefinementResult enumerate_refinements(const Policy& p, const PatternSet& patterns, const Ontology& onto,
                                       const RefineOptions& opts = {});

/// Rebuilds the branch selected by `log`.
RefinementBranch replay(const Policy& p, const PatternSet& patterns, const Ontology& onto,
                        const std::vector<ChoiceEntry>& log, const RefineOptions& opts = {});

}  // namespace polcheck
