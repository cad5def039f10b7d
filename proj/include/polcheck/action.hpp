#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "polcheck/ontology.hpp"
#include "polcheck/state.hpp"
#include "polcheck/term.hpp"

namespace polcheck {

enum class Operator { Sequence, Choice, Conjunction };
enum class GuardSide { Left, Right };

/// Action tree node: an atomic action term, the empty action, or a binary operator.
///
/// An advanced node carries a guard Δ' on one operand: the guarded operand must be performed
/// when the guard holds and may be skipped otherwise.
struct Composition {
    enum class Kind { Atomic, Empty, Op };

    Kind kind = Kind::Empty;
    Term action;
    Operator op = Operator::Sequence;
    bool strict = false;
    std::optional<StateSpace> guard;
    GuardSide guard_side = GuardSide::Right;
    std::optional<std::string> label;
    std::vector<Composition> children;

    static Composition atomic(Term action);
    static Composition empty();
    static Composition make(Operator op, Composition left, Composition right, bool strict = false);
    static Composition guarded(Operator op, Composition left, Composition right, StateSpace guard,
                               GuardSide side = GuardSide::Right, bool strict = false);

    bool is_atomic() const { return kind == Kind::Atomic; }
    bool is_empty() const { return kind == Kind::Empty; }
    bool is_op() const { return kind == Kind::Op; }
    const Composition& left() const { return children.at(0); }
    const Composition& right() const { return children.at(1); }

    /// 0 for leaves, 1 for an operator over leaves.
    std::size_t depth() const;
    std::size_t leaf_count() const;
    std::string str() const;

    friend bool operator==(const Composition& a, const Composition& b);
};

enum class CompositionType {
    BasicSeq,
    BasicStrictChoice,
    BasicStrictConj,
    BasicFlexChoice,
    BasicFlexConj,
    AdvSeq,
    AdvStrictConj,
    AdvFlexConj,
};

std::string to_string(CompositionType t);
/// Throws TaxonomyError for unknown ids.
CompositionType parse_composition_type(std::string_view id);
/// Type of an operator node from its operator, strictness and guard. Throws StructureError for
/// combinations outside the taxonomy.
CompositionType infer_type(const Composition& node);

struct RefinementPattern {
    std::string id;
    Term root;  // action term whose bindings name the pattern parameters
    Composition body;
    CompositionType declared_type = CompositionType::BasicSeq;

    std::string root_name() const { return root.name(); }
    std::string str() const;
};

/// Patterns in file order, checked for cycles between roots and body actions.
class PatternSet {
public:
    PatternSet() = default;
    explicit PatternSet(std::vector<RefinementPattern> patterns);

    const std::vector<RefinementPattern>& patterns() const { return patterns_; }
    std::vector<const RefinementPattern*> for_root(std::string_view action) const;
    const RefinementPattern* find(std::string_view id) const;
    bool empty() const { return patterns_.empty(); }

private:
    std::vector<RefinementPattern> patterns_;
};

/// Reads `refine [Id :] Root(p:$x, ...) := expr [type=<id>]` declarations. Operators: `;`, `\/`,
/// `/\` with `_s` for strict, `[x=v, ...]` guards and `(expr) as Name` labels. When an ontology is
/// given, every action name must be declared.
PatternSet parse_patterns(std::string_view text, const Ontology* onto = nullptr);

using Trace = std::vector<Term>;

std::string trace_str(const Trace& t);

/// Equivalent composition that is a choice of sequences of atomic actions.
Composition normalize(const Composition& c);

std::set<Trace> traces(const Composition& c);

struct TraceResult {
    bool feasible = true;
    State state;
    std::size_t failed_step = 0;  // 1-based, valid when infeasible
};

TraceResult apply_trace(const Trace& t, const State& start, const Ontology& onto);

struct Violation {
    std::string constraint;
    std::optional<State> witness;
    std::string node;  // pattern root or label path of the failing node

    std::string str() const;
};

struct Verdict {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;

    bool well_formed() const { return violations.empty(); }
    std::set<std::string> constraint_ids() const;
};

/// Evaluates the constraint row of the declared composition type over the start states of the
/// root's initial space. Operands must be atomic, empty or labeled with a declared action.
Verdict check_well_formed(const RefinementPattern& p, const Ontology& onto);

/// Checks every labeled operator node as its own pattern and the top node against the labels.
Verdict check_well_formed_complex(const RefinementPattern& p, const Ontology& onto);

/// Brute-force check by simulating the traces of the composition from every start state.
/// Throws OracleScaleError when the start space exceeds `bound` states.
Verdict oracle_well_formed(const RefinementPattern& p, const Ontology& onto, std::size_t bound = 4096);

}  // namespace polcheck
