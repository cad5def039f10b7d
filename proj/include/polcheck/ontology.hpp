#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polcheck/state.hpp"
#include "polcheck/term.hpp"

namespace polcheck {

struct ClassDef {
    std::string name;
    std::vector<std::string> parents;
};

struct PropertyDef {
    std::string name;
    std::vector<std::string> dom;
    std::vector<std::string> range;
};

/// State variable bound to `object.property`. The object may be an action parameter (`$x`),
/// resolved against the action term's bindings.
struct VariableDef {
    std::string name;
    std::string object;
    std::string property;
    std::vector<std::string> range;

    bool object_is_parameter() const { return !object.empty() && object[0] == '$'; }
};

struct GuardedAssignment {
    StateSpace guard;
    Assignment effects;
};

/// Action class as a state transformer from `init` to `final_space`.
///
/// The transformer applies the effects of the first entry whose guard is refined by the input
/// state; with no matching entry the state is unchanged.
struct ActionClassDef {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;  // (property, variable name)
    StateSpace init = StateSpace::everything();
    StateSpace final_space = StateSpace::everything();
    std::vector<GuardedAssignment> transformer;
    Formula effect = Formula::truth();
    std::vector<std::string> causes;
    std::vector<std::string> prevents;
};

enum class PredicateFamily { Hierarchical, Relational };

class Ontology {
public:
    Ontology();

    void add_class(const std::string& name, const std::vector<std::string>& parents = {});
    void add_individual(const std::string& id, const std::string& type);
    void add_property(PropertyDef p);
    void add_subproperty(const std::string& child, const std::string& parent);
    void add_variable(VariableDef v);
    void add_action(ActionClassDef a);
    void declare_family(const std::string& predicate, PredicateFamily family);

    /// Validates cross references, rejects subclass cycles and checks every action's transformer
    /// invariants by enumeration. Throws SchemaError.
    void finalize();

    bool has_class(std::string_view name) const;
    bool has_individual(std::string_view id) const;
    std::optional<std::string> type_of(std::string_view id) const;
    bool is_known(std::string_view name) const { return has_class(name) || has_individual(name); }

    /// Reflexive-transitive subclass test; individuals first step to their type. Throws NameError
    /// naming the offender when either name is unknown.
    bool is_subclass(const std::string& child, const std::string& parent) const;

    /// `concrete <=_h abstract` for state values; literals refine only themselves.
    bool value_refines(const std::string& concrete, const std::string& abstract) const;

    /// Strict ancestors of a class, sorted.
    std::vector<std::string> ancestors(const std::string& cls) const;

    const std::map<std::string, ClassDef>& classes() const { return classes_; }
    const std::map<std::string, std::string>& individuals() const { return individuals_; }
    const std::map<std::string, PropertyDef>& properties() const { return properties_; }
    const std::vector<std::pair<std::string, std::string>>& subproperties() const { return subproperties_; }
    const std::vector<VariableDef>& variables() const { return variables_; }
    const std::map<std::string, ActionClassDef>& actions() const { return actions_; }
    const std::map<std::string, PredicateFamily>& families() const { return families_; }

    const VariableDef* variable(std::string_view name) const;
    const ActionClassDef* action(std::string_view name) const;
    const PropertyDef* property(std::string_view name) const;
    std::optional<PredicateFamily> family(std::string_view predicate) const;

    /// Number of states in the full variable space (saturating).
    std::size_t universe_size() const;
    /// Every total state over the declared variables, sorted.
    std::vector<State> universe() const;

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    void check_cycles() const;
    void check_action(const ActionClassDef& a);
    void check_space(const StateSpace& s, const std::string& where) const;

    std::map<std::string, ClassDef> classes_;
    std::map<std::string, std::string> individuals_;
    std::map<std::string, PropertyDef> properties_;
    std::vector<std::pair<std::string, std::string>> subproperties_;
    std::vector<VariableDef> variables_;
    std::map<std::string, ActionClassDef> actions_;
    std::map<std::string, PredicateFamily> families_;
    std::map<std::string, std::set<std::string>> ancestors_;
    std::vector<std::string> warnings_;
};

struct ObjectInstance {
    std::string id;
    std::string type;
    std::vector<std::pair<std::string, std::string>> props;
};

/// Objects, explicit base atoms and (for current-state files) variable assignments.
struct DataSystem {
    std::vector<ObjectInstance> objects;
    std::vector<Atom> base_atoms;
    Assignment assignments;

    const ObjectInstance* object(std::string_view id) const;
};

bool is_subclass(const std::string& child, const std::string& parent, const Ontology& onto);

/// `abstract ⊑ concrete`: every variable of `concrete` refines the same variable of `abstract`.
/// Throws StructureError when the variable sets differ.
bool state_refines(const State& abstract, const State& concrete, const Ontology& onto);

/// All states of the space, sorted and deduplicated. Throws ExpansionError on undeclared variables
/// or values outside a variable's range.
std::set<State> expand_space(const StateSpace& space, const Ontology& onto);

/// `abstract ⊑ concrete`: every state of `concrete` has an abstraction in `abstract`.
/// Decided per variable when `abstract` is concise, by enumeration otherwise.
bool space_refines(const StateSpace& abstract, const StateSpace& concrete, const Ontology& onto);

/// `space ⊑ {state}`.
bool space_refines_state(const StateSpace& space, const State& state, const Ontology& onto);

StateSpace space_meet(const StateSpace& a, const StateSpace& b, const Ontology& onto);
StateSpace space_join(const StateSpace& a, const StateSpace& b, const Ontology& onto);

/// Canonical explicit form, so spaces denoting the same set compare equal.
StateSpace normalize_space(const StateSpace& s, const Ontology& onto);

/// States of the universe refined from `space` (its upward cone under ⊑).
std::vector<State> cone(const StateSpace& space, const Ontology& onto);

/// Applies the transformer; does not check the initial space.
State apply_transformer(const ActionClassDef& action, const State& state, const Ontology& onto);

/// Objects whose type is below `base` and whose restricted property values refine the given
/// values. Restriction values outside the property's range yield no members and a warning.
std::vector<ObjectInstance> restricted_subclass_members(
    const std::string& base, const std::map<std::string, std::string>& restrictions,
    const DataSystem& ds, const Ontology& onto, std::vector<std::string>* warnings = nullptr);

/// Ground atoms of the data system: explicit atoms, `type` atoms for each object and all its
/// supertypes, `isa` atoms for strict subclass pairs, and one atom per object property.
std::set<Atom> base_facts(const DataSystem& ds, const Ontology& onto);

/// Copy of the ontology that also knows the data system's objects as individuals.
Ontology with_individuals(const Ontology& onto, const DataSystem& ds);

Ontology parse_ontology(std::string_view text);
DataSystem parse_facts(std::string_view text, const Ontology& onto);

/// Space syntax used by the file formats: `{x=v, ...}` parts joined by `|`, or `empty`.
StateSpace parse_space(std::string_view text);

}  // namespace polcheck
