#include "polcheck/ontology.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "polcheck/error.hpp"

namespace polcheck {

namespace {

constexpr std::size_t kMaxExpansion = std::size_t{1} << 22;
constexpr std::size_t kMaxInvariantUniverse = std::size_t{1} << 16;

std::size_t saturating_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
    return a * b;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace

Ontology::Ontology() {
    add_class("Entity");
    add_class("Literal");
    for (const char* c : {"Object", "Agent", "Process", "Predicate"}) add_class(c, {"Entity"});
    add_class("Action", {"Process"});
    auto builtin = [&](const char* name, const char* range) {
        add_property(PropertyDef{name, {"Action"}, {range}});
    };
    builtin("agent", "Agent");
    builtin("instrument", "Object");
    builtin("resource", "Object");
    builtin("target", "Entity");
    builtin("evidence", "Predicate");
    builtin("subAction", "Action");
    builtin("causes", "Process");
    builtin("prevents", "Process");
}

void Ontology::add_class(const std::string& name, const std::vector<std::string>& parents) {
    auto& def = classes_[name];
    def.name = name;
    for (const auto& p : parents) push_unique(def.parents, p);
}

void Ontology::add_individual(const std::string& id, const std::string& type) {
    auto [it, inserted] = individuals_.emplace(id, type);
    if (!inserted && it->second != type)
        throw SchemaError("individual '" + id + "' declared with types '" + it->second + "' and '" + type + "'");
    if (classes_.count(id)) throw SchemaError("'" + id + "' is both a class and an individual");
}

void Ontology::add_property(PropertyDef p) {
    auto& def = properties_[p.name];
    def.name = p.name;
    for (const auto& d : p.dom) push_unique(def.dom, d);
    for (const auto& r : p.range) push_unique(def.range, r);
}

void Ontology::add_subproperty(const std::string& child, const std::string& parent) {
    subproperties_.emplace_back(child, parent);
}

void Ontology::add_variable(VariableDef v) {
    if (variable(v.name)) throw SchemaError("variable '" + v.name + "' declared twice");
    if (v.range.empty()) throw SchemaError("variable '" + v.name + "' has an empty range");
    variables_.push_back(std::move(v));
    std::sort(variables_.begin(), variables_.end(),
              [](const VariableDef& a, const VariableDef& b) { return a.name < b.name; });
}

void Ontology::add_action(ActionClassDef a) {
    if (actions_.count(a.name)) throw SchemaError("action '" + a.name + "' declared twice");
    add_class(a.name, {"Action"});
    actions_.emplace(a.name, std::move(a));
}

void Ontology::declare_family(const std::string& predicate, PredicateFamily family) {
    auto [it, inserted] = families_.emplace(predicate, family);
    if (!inserted && it->second != family)
        throw SchemaError("predicate '" + predicate + "' declared both hierarchical and relational");
}

bool Ontology::has_class(std::string_view name) const { return classes_.count(std::string(name)) > 0; }

bool Ontology::has_individual(std::string_view id) const { return individuals_.count(std::string(id)) > 0; }

std::optional<std::string> Ontology::type_of(std::string_view id) const {
    auto it = individuals_.find(std::string(id));
    if (it == individuals_.end()) return std::nullopt;
    return it->second;
}

const VariableDef* Ontology::variable(std::string_view name) const {
    for (const auto& v : variables_)
        if (v.name == name) return &v;
    return nullptr;
}

const ActionClassDef* Ontology::action(std::string_view name) const {
    auto it = actions_.find(std::string(name));
    return it == actions_.end() ? nullptr : &it->second;
}

const PropertyDef* Ontology::property(std::string_view name) const {
    auto it = properties_.find(std::string(name));
    return it == properties_.end() ? nullptr : &it->second;
}

std::optional<PredicateFamily> Ontology::family(std::string_view predicate) const {
    std::string p(predicate);
    if (auto it = families_.find(p); it != families_.end()) return it->second;
    if (p == "type" || p == "isa") return PredicateFamily::Hierarchical;
    if (properties_.count(p)) return PredicateFamily::Relational;
    return std::nullopt;
}

std::vector<std::string> Ontology::ancestors(const std::string& cls) const {
    if (auto it = ancestors_.find(cls); it != ancestors_.end()) return {it->second.begin(), it->second.end()};
    std::set<std::string> seen;
    std::vector<std::string> stack{cls};
    while (!stack.empty()) {
        std::string c = stack.back();
        stack.pop_back();
        auto it = classes_.find(c);
        if (it == classes_.end()) continue;
        for (const auto& p : it->second.parents)
            if (p != cls && seen.insert(p).second) stack.push_back(p);
    }
    return {seen.begin(), seen.end()};
}

bool Ontology::is_subclass(const std::string& child, const std::string& parent) const {
    if (!is_known(child)) throw NameError("unknown class or individual '" + child + "'");
    if (!is_known(parent)) throw NameError("unknown class or individual '" + parent + "'");
    if (child == parent) return true;
    if (has_individual(parent)) return false;
    std::string cls = child;
    if (auto t = type_of(child)) {
        cls = *t;
        if (cls == parent) return true;
    }
    if (auto it = ancestors_.find(cls); it != ancestors_.end()) return it->second.count(parent) > 0;
    auto anc = ancestors(cls);
    return std::binary_search(anc.begin(), anc.end(), parent);
}

bool Ontology::value_refines(const std::string& concrete, const std::string& abstract) const {
    if (concrete == abstract) return true;
    if (!is_known(concrete) || !is_known(abstract)) return false;
    return is_subclass(concrete, abstract);
}

std::size_t Ontology::universe_size() const {
    std::size_t n = 1;
    for (const auto& v : variables_) n = saturating_mul(n, v.range.size());
    return n;
}

std::vector<State> Ontology::universe() const {
    if (universe_size() > kMaxExpansion)
        throw ExpansionError("state universe too large to enumerate (" + std::to_string(universe_size()) + " states)");
    std::vector<State> out{State{}};
    for (const auto& v : variables_) {
        std::vector<State> next;
        next.reserve(out.size() * v.range.size());
        for (const auto& s : out)
            for (const auto& val : v.range) {
                State t = s;
                t.values[v.name] = val;
                next.push_back(std::move(t));
            }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void Ontology::check_cycles() const {
    std::map<std::string, int> color;
    std::vector<std::string> path;
    std::function<void(const std::string&)> visit = [&](const std::string& c) {
        color[c] = 1;
        path.push_back(c);
        auto it = classes_.find(c);
        if (it != classes_.end()) {
            for (const auto& p : it->second.parents) {
                if (color[p] == 1) {
                    auto start = std::find(path.begin(), path.end(), p);
                    std::string cycle;
                    for (auto i = start; i != path.end(); ++i) cycle += *i + " -> ";
                    throw SchemaError("subclass cycle: " + cycle + p);
                }
                if (color[p] == 0) visit(p);
            }
        }
        path.pop_back();
        color[c] = 2;
    };
    for (const auto& [name, def] : classes_)
        if (color[name] == 0) visit(name);
}

void Ontology::check_space(const StateSpace& s, const std::string& where) const {
    for (const auto& part : s.parts)
        for (const auto& [var, val] : part) {
            const VariableDef* v = variable(var);
            if (!v) throw SchemaError(where + ": undeclared variable '" + var + "'");
            if (std::find(v->range.begin(), v->range.end(), val) == v->range.end())
                throw SchemaError(where + ": value '" + val + "' outside the range of '" + var + "'");
        }
}

void Ontology::check_action(const ActionClassDef& a) {
    const std::string where = "action " + a.name;
    for (const auto& [prop, var] : a.params)
        if (!properties_.count(prop)) throw SchemaError(where + ": undeclared parameter property '" + prop + "'");
    check_space(a.init, where + " init");
    check_space(a.final_space, where + " final");
    for (const auto& ga : a.transformer) {
        check_space(ga.guard, where + " guard");
        check_space(StateSpace::concise(ga.effects), where + " effect");
    }
    // Without a transformer the action is abstract; its effect comes from its refinements.
    if (a.transformer.empty()) return;
    if (universe_size() > kMaxInvariantUniverse) {
        warnings_.push_back(where + ": state universe too large, transformer invariants not checked");
        return;
    }
    auto states = cone(a.init, *this);
    std::vector<State> images;
    images.reserve(states.size());
    for (const auto& d : states) {
        State img = apply_transformer(a, d, *this);
        if (!space_refines_state(a.final_space, img, *this))
            throw SchemaError(where + ": state " + d.str() + " is mapped to " + img.str() +
                              ", outside the final space " + a.final_space.str());
        images.push_back(std::move(img));
    }
    bool flat = true;
    for (const auto& v : variables_)
        for (const auto& x : v.range)
            for (const auto& y : v.range)
                if (x != y && value_refines(x, y)) flat = false;
    if (flat) return;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j)
            if (i != j && state_refines(states[i], states[j], *this) && !state_refines(images[i], images[j], *this))
                throw SchemaError(where + ": transformer is not monotone on " + states[i].str() + " and " +
                                  states[j].str());
}

void Ontology::finalize() {
    for (const auto& [name, def] : classes_)
        for (const auto& p : def.parents)
            if (!classes_.count(p)) throw SchemaError("class '" + name + "' has undeclared parent '" + p + "'");
    check_cycles();
    ancestors_.clear();
    for (const auto& [name, def] : classes_) {
        auto anc = ancestors(name);
        ancestors_[name] = {anc.begin(), anc.end()};
    }
    for (const auto& [id, type] : individuals_)
        if (!classes_.count(type)) throw SchemaError("individual '" + id + "' has undeclared type '" + type + "'");
    for (const auto& [name, p] : properties_) {
        for (const auto& d : p.dom)
            if (!classes_.count(d)) throw SchemaError("property '" + name + "' has undeclared domain '" + d + "'");
        for (const auto& r : p.range)
            if (!classes_.count(r)) throw SchemaError("property '" + name + "' has undeclared range '" + r + "'");
    }
    for (const auto& [c, p] : subproperties_)
        if (!properties_.count(c) || !properties_.count(p))
            throw SchemaError("subproperty edge '" + c + "' -> '" + p + "' names an undeclared property");
    for (const auto& v : variables_)
        if (!properties_.count(v.property))
            throw SchemaError("variable '" + v.name + "' maps undeclared property '" + v.property + "'");
    warnings_.clear();
    for (const auto& [name, a] : actions_) check_action(a);
}

const ObjectInstance* DataSystem::object(std::string_view id) const {
    for (const auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

bool is_subclass(const std::string& child, const std::string& parent, const Ontology& onto) {
    return onto.is_subclass(child, parent);
}

bool state_refines(const State& abstract, const State& concrete, const Ontology& onto) {
    if (abstract.values.size() != concrete.values.size())
        throw StructureError("states over different variables: " + abstract.str() + " and " + concrete.str());
    auto a = abstract.values.begin();
    for (auto c = concrete.values.begin(); c != concrete.values.end(); ++c, ++a) {
        if (a->first != c->first)
            throw StructureError("states over different variables: " + abstract.str() + " and " + concrete.str());
        if (!onto.value_refines(c->second, a->second)) return false;
    }
    return true;
}

namespace {

void validate_space(const StateSpace& s, const Ontology& onto) {
    for (const auto& part : s.parts)
        for (const auto& [var, val] : part) {
            const VariableDef* v = onto.variable(var);
            if (!v) throw ExpansionError("undeclared variable '" + var + "'");
            if (std::find(v->range.begin(), v->range.end(), val) == v->range.end())
                throw ExpansionError("value '" + val + "' is outside the range of '" + var + "'");
        }
}

// `part ⊑ δ` for a total state δ.
bool part_refines_state(const Assignment& part, const State& d, const Ontology& onto) {
    for (const auto& [var, val] : part) {
        auto it = d.values.find(var);
        if (it == d.values.end()) throw StructureError("state " + d.str() + " lacks variable '" + var + "'");
        if (!onto.value_refines(it->second, val)) return false;
    }
    return true;
}

std::optional<Assignment> merge_parts(const Assignment& a, const Assignment& b) {
    Assignment out = a;
    for (const auto& [k, v] : b) {
        auto [it, inserted] = out.emplace(k, v);
        if (!inserted && it->second != v) return std::nullopt;
    }
    return out;
}

}  // namespace

std::set<State> expand_space(const StateSpace& space, const Ontology& onto) {
    validate_space(space, onto);
    std::set<State> out;
    for (const auto& part : space.parts) {
        std::size_t n = 1;
        for (const auto& v : onto.variables())
            if (!part.count(v.name)) n = saturating_mul(n, v.range.size());
        if (n > kMaxExpansion || out.size() + n > kMaxExpansion)
            throw ExpansionError("state space too large to expand: " + space.str());
        std::vector<State> acc{State{}};
        for (const auto& v : onto.variables()) {
            std::vector<State> next;
            if (auto it = part.find(v.name); it != part.end()) {
                for (auto& s : acc) {
                    s.values[v.name] = it->second;
                    next.push_back(std::move(s));
                }
            } else {
                for (const auto& s : acc)
                    for (const auto& val : v.range) {
                        State t = s;
                        t.values[v.name] = val;
                        next.push_back(std::move(t));
                    }
            }
            acc = std::move(next);
        }
        out.insert(acc.begin(), acc.end());
    }
    return out;
}

bool space_refines(const StateSpace& abstract, const StateSpace& concrete, const Ontology& onto) {
    validate_space(abstract, onto);
    validate_space(concrete, onto);
    if (concrete.parts.empty()) return true;
    if (abstract.parts.empty()) return false;
    if (abstract.is_concise()) {
        const Assignment& p = abstract.parts.front();
        for (const auto& q : concrete.parts)
            for (const auto& [var, val] : p) {
                if (auto it = q.find(var); it != q.end()) {
                    if (!onto.value_refines(it->second, val)) return false;
                } else {
                    for (const auto& v : onto.variable(var)->range)
                        if (!onto.value_refines(v, val)) return false;
                }
            }
        return true;
    }
    for (const auto& d : expand_space(concrete, onto)) {
        bool found = false;
        for (const auto& part : abstract.parts)
            if (part_refines_state(part, d, onto)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

bool space_refines_state(const StateSpace& space, const State& state, const Ontology& onto) {
    for (const auto& part : space.parts)
        if (part_refines_state(part, state, onto)) return true;
    return false;
}

StateSpace space_meet(const StateSpace& a, const StateSpace& b, const Ontology& onto) {
    validate_space(a, onto);
    validate_space(b, onto);
    std::set<Assignment> parts;
    for (const auto& p : a.parts)
        for (const auto& q : b.parts)
            if (auto m = merge_parts(p, q)) parts.insert(std::move(*m));
    return StateSpace{{parts.begin(), parts.end()}};
}

StateSpace space_join(const StateSpace& a, const StateSpace& b, const Ontology& onto) {
    validate_space(a, onto);
    validate_space(b, onto);
    std::set<Assignment> parts(a.parts.begin(), a.parts.end());
    parts.insert(b.parts.begin(), b.parts.end());
    if (parts.count(Assignment{})) return StateSpace::everything();
    return StateSpace{{parts.begin(), parts.end()}};
}

StateSpace normalize_space(const StateSpace& s, const Ontology& onto) {
    auto states = expand_space(s, onto);
    if (states.empty()) return StateSpace::nothing();
    if (states.size() == onto.universe_size()) return StateSpace::everything();
    return StateSpace::explicit_states(states);
}

std::vector<State> cone(const StateSpace& space, const Ontology& onto) {
    validate_space(space, onto);
    std::vector<State> out;
    for (auto& d : onto.universe())
        if (space_refines_state(space, d, onto)) out.push_back(std::move(d));
    return out;
}

State apply_transformer(const ActionClassDef& action, const State& state, const Ontology& onto) {
    for (const auto& ga : action.transformer) {
        if (space_refines_state(ga.guard, state, onto)) {
            State out = state;
            for (const auto& [k, v] : ga.effects) out.values[k] = v;
            return out;
        }
    }
    return state;
}

std::vector<ObjectInstance> restricted_subclass_members(const std::string& base,
                                                        const std::map<std::string, std::string>& restrictions,
                                                        const DataSystem& ds, const Ontology& onto,
                                                        std::vector<std::string>* warnings) {
    for (const auto& [prop, val] : restrictions) {
        const PropertyDef* p = onto.property(prop);
        if (!p) throw NameError("unknown property '" + prop + "'");
        bool in_range = false;
        for (const auto& r : p->range) {
            if (r == "Literal" && !onto.is_known(val)) in_range = true;
            else if (onto.is_known(val) && onto.is_known(r) && onto.is_subclass(val, r)) in_range = true;
        }
        if (!in_range) {
            if (warnings)
                warnings->push_back("restriction " + prop + "=" + val + " on " + base +
                                    " is outside the property range; the subclass is empty");
            return {};
        }
    }
    std::vector<ObjectInstance> out;
    for (const auto& o : ds.objects) {
        if (!onto.is_subclass(o.type, base)) continue;
        bool ok = true;
        for (const auto& [prop, val] : restrictions) {
            auto it = std::find_if(o.props.begin(), o.props.end(), [&](const auto& pv) { return pv.first == prop; });
            if (it == o.props.end() || !onto.value_refines(it->second, val)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(o);
    }
    return out;
}

std::set<Atom> base_facts(const DataSystem& ds, const Ontology& onto) {
    std::set<Atom> out(ds.base_atoms.begin(), ds.base_atoms.end());
    auto c = [](const std::string& s) { return Term::constant(s); };
    for (const auto& o : ds.objects) {
        out.insert(Atom{"type", {c(o.id), c(o.type)}});
        for (const auto& a : onto.ancestors(o.type)) out.insert(Atom{"type", {c(o.id), c(a)}});
        for (const auto& [prop, val] : o.props) out.insert(Atom{prop, {c(o.id), c(val)}});
    }
    for (const auto& [name, def] : onto.classes())
        for (const auto& a : onto.ancestors(name)) out.insert(Atom{"isa", {c(name), c(a)}});
    return out;
}

Ontology with_individuals(const Ontology& onto, const DataSystem& ds) {
    Ontology out = onto;
    for (const auto& o : ds.objects) out.add_individual(o.id, o.type);
    return out;
}

}  // namespace polcheck
